#pragma once

#include "rioneps/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace rioneps {

/// One fixation target: hold `position` for `dwell_s` seconds.
struct Fixation {
    double position = 0.0;
    double dwell_s = 0.0;
};

/// Recipe for a deterministic synthetic gaze trace: fixations joined by
/// linear ramps, plus Gaussian jitter on every sample. A linear ramp is
/// enough here because any monotone segment scores zero inefficiency
/// regardless of its shape.
struct SynthSpec {
    double sample_rate_hz = 500.0;
    double duration_s = 1.0;
    std::vector<Fixation> fixations;
    double saccade_duration_s = 0.03;
    double jitter_sd = 0.0;
    std::uint64_t seed = 0;
};

/// Oscillation to inject: inside each interval the signal switches between
/// the true position and true + false_offset, toggling state with probability
/// switch_probability per sample (two-state telegraph noise), starting
/// displaced. Samples inside an interval may additionally be dropped with
/// missing_probability.
struct NoiseInjection {
    std::vector<std::pair<std::size_t, std::size_t>> intervals;  // inclusive index pairs
    double false_offset = 2.0;
    double switch_probability = 0.5;  // in (0, 1]
    double missing_probability = 0.0;
};

/// Per-sample ground truth: true for every sample inside an injected interval.
struct LabelSet {
    std::vector<bool> labels;

    std::size_t size() const noexcept { return labels.size(); }
    bool operator[](std::size_t i) const { return labels[i]; }
    std::size_t positive_count() const noexcept;
};

struct InjectionResult {
    PositionTrace trace;
    LabelSet labels;
};

/// Deterministic given (spec, spec.seed). Throws ConfigError on an invalid
/// spec, including a duration too short to complete the first fixation.
PositionTrace generate(const SynthSpec& spec);

/// Returns the noisy trace and its ground-truth labels. The output differs
/// from the input only at labeled indices. Deterministic given (inj, seed).
InjectionResult inject(const PositionTrace& trace, const NoiseInjection& inj,
                       std::uint64_t seed);

}  // namespace rioneps
