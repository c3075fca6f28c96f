#include "rioneps/detector.hpp"

#include "rioneps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rioneps {

namespace {

struct WindowAccum {
    double tdt = 0.0;
    double net = 0.0;
    int valid = 0;
};

// Fresh accumulation over one window. The difference of two samples is NaN
// exactly when either endpoint is missing (present samples are always
// finite), so a single NaN test per pair covers the skip rule. The
// conditional adds keep the loop branch-free; adding 0.0 leaves the
// accumulators untouched.
inline WindowAccum accumulate_window(const double* x, std::size_t start, int ws) {
    WindowAccum a;
    double prev = x[start];
    a.valid = !std::isnan(prev);
    for (int k = 1; k < ws; ++k) {
        const double cur = x[start + k];
        a.valid += !std::isnan(cur);
        const double d = cur - prev;
        const bool pair_ok = !std::isnan(d);
        a.tdt += pair_ok ? std::fabs(d) : 0.0;
        a.net += pair_ok ? d : 0.0;
        prev = cur;
    }
    return a;
}

inline WindowStats stats_from_accum(std::size_t start, const WindowAccum& a) {
    WindowStats s;
    s.start_index = start;
    s.valid_count = a.valid;
    if (a.valid < 2) return s;  // no evidence: tdt = datcf = im = 0
    s.tdt = a.tdt;
    s.datcf = std::fabs(a.net);
    const double excess = s.tdt - s.datcf;
    s.im = excess > 0.0 ? excess * 1000.0 / static_cast<double>(a.valid) : 0.0;
    return s;
}

inline double accum_im(const WindowAccum& a) {
    if (a.valid < 2) return 0.0;
    const double excess = a.tdt - std::fabs(a.net);
    return excess > 0.0 ? excess * 1000.0 / static_cast<double>(a.valid) : 0.0;
}

void require_window_fits(std::size_t trace_len, int ws) {
    if (trace_len < static_cast<std::size_t>(ws)) {
        throw std::invalid_argument("trace has " + std::to_string(trace_len) +
                                    " samples, shorter than one window of " +
                                    std::to_string(ws));
    }
}

}  // namespace

int window_size(double sample_rate_hz) {
    if (!std::isfinite(sample_rate_hz) || sample_rate_hz <= 0.0) {
        throw ConfigError("sample rate must be a positive number");
    }
    const int ws = static_cast<int>(std::floor(sample_rate_hz / 20.0));
    if (ws < 2) {
        throw ConfigError("sample rate too low for rate/20 windowing; supply window_size_override");
    }
    return ws;
}

DetectorConfig::DetectorConfig(double sample_rate_hz, double inefficiency_threshold,
                               std::optional<int> window_size_override)
    : sample_rate_hz_(sample_rate_hz), inefficiency_threshold_(inefficiency_threshold) {
    if (!std::isfinite(sample_rate_hz_) || sample_rate_hz_ <= 0.0) {
        throw ConfigError("sample rate must be a positive number");
    }
    // +inf is accepted and simply never flags anything; NaN is rejected.
    if (std::isnan(inefficiency_threshold_) || inefficiency_threshold_ < 0.0) {
        throw ConfigError("inefficiency threshold must be non-negative");
    }
    if (window_size_override) {
        if (*window_size_override < 2) {
            throw ConfigError("window size must be at least 2 samples");
        }
        window_size_ = *window_size_override;
    } else {
        window_size_ = rioneps::window_size(sample_rate_hz_);
    }
}

WindowStats window_stats(const PositionTrace& trace, std::size_t start_index, int ws) {
    if (ws < 2) throw ConfigError("window size must be at least 2 samples");
    if (start_index > trace.size() || trace.size() - start_index < static_cast<std::size_t>(ws)) {
        throw std::out_of_range("window [" + std::to_string(start_index) + ", " +
                                std::to_string(start_index + ws) + ") out of bounds for trace of " +
                                std::to_string(trace.size()));
    }
    return stats_from_accum(start_index, accumulate_window(trace.samples().data(), start_index, ws));
}

std::vector<WindowStats> inefficiency_series(const PositionTrace& trace,
                                             const DetectorConfig& config) {
    const int ws = config.window_size();
    require_window_fits(trace.size(), ws);
    const double* x = trace.samples().data();
    const std::size_t n_windows = trace.size() - static_cast<std::size_t>(ws) + 1;
    std::vector<WindowStats> out;
    out.reserve(n_windows);
    for (std::size_t s = 0; s < n_windows; ++s) {
        out.push_back(stats_from_accum(s, accumulate_window(x, s, ws)));
    }
    return out;
}

NoiseMask detect(const PositionTrace& trace, const DetectorConfig& config) {
    const int ws = config.window_size();
    require_window_fits(trace.size(), ws);
    const double it = config.inefficiency_threshold();
    const double* x = trace.samples().data();
    const std::size_t n = trace.size();
    const std::size_t n_windows = n - static_cast<std::size_t>(ws) + 1;

    NoiseMask mask;
    mask.flags.assign(n, false);
    std::size_t marked_until = 0;  // exclusive end of the flagged prefix so far
    for (std::size_t s = 0; s < n_windows; ++s) {
        if (accum_im(accumulate_window(x, s, ws)) > it) {
            const std::size_t to = s + static_cast<std::size_t>(ws);
            for (std::size_t j = std::max(s, marked_until); j < to; ++j) mask.flags[j] = true;
            marked_until = to;
        }
    }
    return mask;
}

NoiseMask mask_from_series(const std::vector<WindowStats>& stats, std::size_t trace_length,
                           double inefficiency_threshold) {
    NoiseMask mask;
    mask.flags.assign(trace_length, false);
    if (stats.empty()) return mask;
    if (stats.size() > trace_length) {
        throw std::invalid_argument("mask_from_series: more windows than samples");
    }
    const std::size_t ws = trace_length - stats.size() + 1;
    std::size_t marked_until = 0;
    for (const auto& w : stats) {
        if (w.im > inefficiency_threshold) {
            const std::size_t to = w.start_index + ws;
            for (std::size_t j = std::max(w.start_index, marked_until); j < to; ++j) {
                mask.flags[j] = true;
            }
            marked_until = to;
        }
    }
    return mask;
}

std::size_t NoiseMask::flagged_count() const noexcept {
    std::size_t n = 0;
    for (bool f : flags) n += f;
    return n;
}

std::vector<NoiseSegment> mask_to_segments(const NoiseMask& mask,
                                           const std::vector<WindowStats>& stats,
                                           double sample_rate_hz) {
    if (!std::isfinite(sample_rate_hz) || sample_rate_hz <= 0.0) {
        throw ConfigError("sample rate must be a positive number");
    }
    const std::size_t n = mask.size();
    if (stats.size() > n) {
        throw std::invalid_argument("mask_to_segments: more windows than samples");
    }
    // The series covers starts 0 .. n - ws, so its length pins down ws.
    const std::size_t ws = stats.empty() ? 0 : n - stats.size() + 1;

    std::vector<NoiseSegment> segments;
    std::size_t i = 0;
    while (i < n) {
        while (i < n && !mask.flags[i]) ++i;
        if (i >= n) break;
        std::size_t j = i;
        while (j + 1 < n && mask.flags[j + 1]) ++j;

        NoiseSegment seg;
        seg.start_index = i;
        seg.end_index = j;
        seg.start_time_s = static_cast<double>(i) / sample_rate_hz;
        seg.end_time_s = static_cast<double>(j) / sample_rate_hz;
        if (!stats.empty()) {
            const std::size_t first = i + 1 >= ws ? i + 1 - ws : 0;
            const std::size_t last = std::min(j, stats.size() - 1);
            for (std::size_t s = first; s <= last; ++s) {
                seg.peak_im = std::max(seg.peak_im, stats[s].im);
            }
        }
        segments.push_back(seg);
        i = j + 1;
    }
    return segments;
}

NoiseMask union_mask(const NoiseMask& a, const NoiseMask& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("union_mask: mask lengths differ (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    NoiseMask out;
    out.flags.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.flags[i] = a.flags[i] || b.flags[i];
    return out;
}

}  // namespace rioneps
