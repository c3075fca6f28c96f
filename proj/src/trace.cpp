#include "rioneps/trace.hpp"

#include "rioneps/errors.hpp"

#include <utility>

namespace rioneps {

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::horizontal: return "h";
        case Channel::vertical: return "v";
        case Channel::other: return "other";
    }
    return "other";
}

PositionTrace::PositionTrace(std::vector<double> samples, double sample_rate_hz,
                             Channel channel, std::string unit_label)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      channel_(channel),
      unit_label_(std::move(unit_label)) {
    if (!std::isfinite(sample_rate_hz_) || sample_rate_hz_ <= 0.0) {
        throw ConfigError("sample rate must be a positive number");
    }
    for (double& v : samples_) {
        if (!std::isfinite(v)) v = missing_sample();
    }
}

std::size_t PositionTrace::present_count() const noexcept {
    std::size_t n = 0;
    for (double v : samples_) n += !is_missing_value(v);
    return n;
}

}  // namespace rioneps
