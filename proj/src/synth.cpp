#include "rioneps/synth.hpp"

#include "rioneps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rioneps {

namespace {

std::size_t sample_count(double seconds, double rate) {
    return static_cast<std::size_t>(std::llround(seconds * rate));
}

void validate(const SynthSpec& spec) {
    if (!std::isfinite(spec.sample_rate_hz) || spec.sample_rate_hz <= 0.0) {
        throw ConfigError("sample rate must be a positive number");
    }
    if (!std::isfinite(spec.duration_s) || spec.duration_s <= 0.0) {
        throw ConfigError("duration must be positive");
    }
    if (spec.fixations.empty()) {
        throw ConfigError("at least one fixation is required");
    }
    for (const Fixation& f : spec.fixations) {
        if (!std::isfinite(f.position)) throw ConfigError("fixation position must be finite");
        if (!std::isfinite(f.dwell_s) || f.dwell_s <= 0.0) {
            throw ConfigError("fixation dwell must be positive");
        }
    }
    if (!std::isfinite(spec.saccade_duration_s) || spec.saccade_duration_s < 0.0) {
        throw ConfigError("saccade duration must be non-negative");
    }
    if (!std::isfinite(spec.jitter_sd) || spec.jitter_sd < 0.0) {
        throw ConfigError("jitter standard deviation must be non-negative");
    }
    if (spec.duration_s < spec.fixations.front().dwell_s) {
        throw ConfigError("duration shorter than the first fixation dwell");
    }
}

}  // namespace

std::size_t LabelSet::positive_count() const noexcept {
    std::size_t n = 0;
    for (bool b : labels) n += b;
    return n;
}

PositionTrace generate(const SynthSpec& spec) {
    validate(spec);
    const double rate = spec.sample_rate_hz;
    const std::size_t n = sample_count(spec.duration_s, rate);
    std::vector<double> x;
    x.reserve(n);

    const std::size_t ramp_len = sample_count(spec.saccade_duration_s, rate);
    for (std::size_t f = 0; f < spec.fixations.size() && x.size() < n; ++f) {
        const double pos = spec.fixations[f].position;
        std::size_t dwell = sample_count(spec.fixations[f].dwell_s, rate);
        while (dwell-- > 0 && x.size() < n) x.push_back(pos);
        if (f + 1 < spec.fixations.size()) {
            // ramp samples sit strictly between the two fixation positions
            const double next = spec.fixations[f + 1].position;
            for (std::size_t k = 1; k <= ramp_len && x.size() < n; ++k) {
                const double frac = static_cast<double>(k) / static_cast<double>(ramp_len + 1);
                x.push_back(pos + (next - pos) * frac);
            }
        }
    }
    // hold the last fixation if the schedule ran out before the duration
    while (x.size() < n) x.push_back(spec.fixations.back().position);

    if (spec.jitter_sd > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> jitter(0.0, spec.jitter_sd);
        for (double& v : x) v += jitter(rng);
    }
    return PositionTrace(std::move(x), rate, Channel::horizontal, "au");
}

InjectionResult inject(const PositionTrace& trace, const NoiseInjection& inj,
                       std::uint64_t seed) {
    if (!std::isfinite(inj.false_offset)) {
        throw ConfigError("false offset must be finite");
    }
    if (!(inj.switch_probability > 0.0) || inj.switch_probability > 1.0) {
        throw ConfigError("switch probability must be in (0, 1]");
    }
    if (inj.missing_probability < 0.0 || inj.missing_probability >= 1.0) {
        throw ConfigError("missing probability must be in [0, 1)");
    }
    const std::size_t n = trace.size();
    auto sorted = inj.intervals;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& [a, b] = sorted[i];
        if (a > b || b >= n) {
            throw std::out_of_range("injection interval [" + std::to_string(a) + ", " +
                                    std::to_string(b) + "] out of range for trace of " +
                                    std::to_string(n));
        }
        if (i > 0 && a <= sorted[i - 1].second) {
            throw ConfigError("injection intervals overlap");
        }
    }

    std::vector<double> noisy = trace.samples();
    LabelSet labels;
    labels.labels.assign(n, false);

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution toggle(inj.switch_probability);
    std::bernoulli_distribution drop(inj.missing_probability);
    for (const auto& [a, b] : sorted) {
        bool displaced = true;  // the burst starts on the false position
        for (std::size_t i = a; i <= b; ++i) {
            if (i > a && toggle(rng)) displaced = !displaced;
            if (displaced && !is_missing_value(noisy[i])) noisy[i] += inj.false_offset;
            if (inj.missing_probability > 0.0 && drop(rng)) noisy[i] = missing_sample();
            labels.labels[i] = true;
        }
    }
    return InjectionResult{
        PositionTrace(std::move(noisy), trace.sample_rate_hz(), trace.channel(),
                      trace.unit_label()),
        std::move(labels)};
}

}  // namespace rioneps
