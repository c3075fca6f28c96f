#pragma once

#include "rioneps/trace.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace rioneps {

/// Window size in samples for a given sample rate: floor(rate / 20), i.e. a
/// 50 ms window (50 samples at 1000 Hz). Throws ConfigError when the result
/// would be < 2, since a window needs at least one adjacent-sample difference.
int window_size(double sample_rate_hz);

/// Detection settings: sample rate, inefficiency threshold (same unit as the
/// position samples, scaled by 1000/window) and an optional window-size
/// override for nonstandard rates. The effective window size is fixed at
/// construction and is always >= 2.
class DetectorConfig {
public:
    DetectorConfig(double sample_rate_hz, double inefficiency_threshold,
                   std::optional<int> window_size_override = std::nullopt);

    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    double inefficiency_threshold() const noexcept { return inefficiency_threshold_; }
    int window_size() const noexcept { return window_size_; }

private:
    double sample_rate_hz_;
    double inefficiency_threshold_;
    int window_size_;
};

/// Per-window statistics of the inefficiency computation.
///
/// tdt sums |difference| over adjacent sample pairs where both samples are
/// present; datcf is |sum of those same differences| (net displacement);
/// valid_count is the number of present samples in the window. The
/// inefficiency metric is (tdt - datcf) * 1000 / valid_count, clamped at zero
/// (the clamp can only trigger through floating-point rounding) and defined
/// as 0 when fewer than two samples are present.
struct WindowStats {
    std::size_t start_index = 0;
    double tdt = 0.0;
    double datcf = 0.0;
    int valid_count = 0;
    double im = 0.0;
};

/// Per-sample noise flags, same length as the source trace.
/// true = the sample lies in at least one window whose metric exceeded the
/// threshold.
struct NoiseMask {
    std::vector<bool> flags;

    std::size_t size() const noexcept { return flags.size(); }
    bool operator[](std::size_t i) const { return flags[i]; }
    std::size_t flagged_count() const noexcept;

    friend bool operator==(const NoiseMask&, const NoiseMask&) = default;
};

/// A maximal run of flagged samples. Indices are inclusive, times are
/// index / sample_rate. peak_im is the largest window metric among windows
/// overlapping the run.
struct NoiseSegment {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double start_time_s = 0.0;
    double end_time_s = 0.0;
    double peak_im = 0.0;
};

/// Statistics for the window starting at start_index covering ws samples.
/// Adjacent pairs with a missing endpoint contribute nothing.
/// Throws std::out_of_range when the window does not fit in the trace.
WindowStats window_stats(const PositionTrace& trace, std::size_t start_index, int ws);

/// Stats for every sliding window, start indices 0 .. size - ws inclusive,
/// so the final sample is covered. Throws std::invalid_argument when the
/// trace is shorter than one window.
std::vector<WindowStats> inefficiency_series(const PositionTrace& trace,
                                             const DetectorConfig& config);

/// Batch detection: flags every sample of every window whose metric strictly
/// exceeds the configured threshold. Marking the whole window dilates true
/// noise regions by up to ws-1 samples on each side.
/// Throws std::invalid_argument when the trace is shorter than one window.
NoiseMask detect(const PositionTrace& trace, const DetectorConfig& config);

/// Builds the detection mask from an already-computed window series; equal to
/// detect() with the same threshold. An empty series (trace shorter than one
/// window) gives an all-false mask, which is the convention the CLI and the
/// streaming path use for short inputs.
NoiseMask mask_from_series(const std::vector<WindowStats>& stats, std::size_t trace_length,
                           double inefficiency_threshold);

/// Run-length view of a mask. stats must be the full window series for the
/// same trace (used for peak_im); pass an empty vector if unavailable, in
/// which case peak_im is 0.
std::vector<NoiseSegment> mask_to_segments(const NoiseMask& mask,
                                           const std::vector<WindowStats>& stats,
                                           double sample_rate_hz);

/// Convenience extension: OR of two per-channel masks (flag if either channel
/// flags). Per-channel analysis is the faithful default; this is provided for
/// callers that want a single combined mask.
NoiseMask union_mask(const NoiseMask& a, const NoiseMask& b);

}  // namespace rioneps
