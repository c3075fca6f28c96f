#include "rioneps/streaming.hpp"

#include <cmath>
#include <stdexcept>

namespace rioneps {

StreamingDetector::StreamingDetector(DetectorConfig config)
    : config_(config),
      ring_(static_cast<std::size_t>(config.window_size()), missing_sample()),
      pending_(static_cast<std::size_t>(config.window_size()), false) {}

void StreamingDetector::reset() {
    std::fill(ring_.begin(), ring_.end(), missing_sample());
    std::fill(pending_.begin(), pending_.end(), false);
    count_ = 0;
    emitted_ = 0;
    flushed_ = false;
}

std::vector<FlagEvent> StreamingDetector::push(double sample) {
    if (flushed_) {
        throw std::logic_error("StreamingDetector: push after flush; call reset() first");
    }
    const std::size_t ws = ring_.size();
    const std::size_t index = count_;
    ring_[index % ws] = std::isfinite(sample) ? sample : missing_sample();
    ++count_;

    std::vector<FlagEvent> events;
    if (count_ < ws) return events;

    // Window [start, index] just completed. Same accumulation order as the
    // batch path, so the metric is bit-identical.
    const std::size_t start = count_ - ws;
    double tdt = 0.0;
    double net = 0.0;
    int valid = 0;
    double prev = ring_[start % ws];
    valid += !std::isnan(prev);
    for (std::size_t j = start + 1; j <= index; ++j) {
        const double cur = ring_[j % ws];
        valid += !std::isnan(cur);
        const double d = cur - prev;
        const bool pair_ok = !std::isnan(d);
        tdt += pair_ok ? std::fabs(d) : 0.0;
        net += pair_ok ? d : 0.0;
        prev = cur;
    }
    double im = 0.0;
    if (valid >= 2) {
        const double excess = tdt - std::fabs(net);
        im = excess > 0.0 ? excess * 1000.0 / static_cast<double>(valid) : 0.0;
    }
    if (im > config_.inefficiency_threshold()) {
        for (std::size_t j = start; j <= index; ++j) pending_[j % ws] = true;
    }

    // No window starting after `start` contains sample `start`, so its flag
    // is final now.
    events.push_back({start, static_cast<bool>(pending_[start % ws])});
    pending_[start % ws] = false;
    ++emitted_;
    return events;
}

std::vector<FlagEvent> StreamingDetector::flush() {
    std::vector<FlagEvent> events;
    if (flushed_) return events;
    flushed_ = true;
    const std::size_t ws = ring_.size();
    for (std::size_t j = emitted_; j < count_; ++j) {
        events.push_back({j, static_cast<bool>(pending_[j % ws])});
        pending_[j % ws] = false;
    }
    emitted_ = count_;
    return events;
}

}  // namespace rioneps
