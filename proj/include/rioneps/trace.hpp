#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace rioneps {

enum class Channel { horizontal, vertical, other };

const char* channel_name(Channel c);

/// Sentinel used for missing samples throughout the library.
inline double missing_sample() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool is_missing_value(double v) { return std::isnan(v); }

/// One channel (horizontal or vertical) of an eye-position recording.
///
/// Samples are stored as doubles with quiet NaN standing in for a missing
/// sample. Any non-finite input (inf as well as NaN) is normalized to missing
/// on construction, so downstream window math only ever sees finite values or
/// NaN. The unit of the samples (degrees, pixels, ...) is metadata only; the
/// detection threshold is expressed in the same unit.
class PositionTrace {
public:
    PositionTrace(std::vector<double> samples, double sample_rate_hz,
                  Channel channel = Channel::other, std::string unit_label = {});

    const std::vector<double>& samples() const noexcept { return samples_; }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    Channel channel() const noexcept { return channel_; }
    const std::string& unit_label() const noexcept { return unit_label_; }

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    bool is_missing(std::size_t i) const { return is_missing_value(samples_[i]); }

    std::size_t present_count() const noexcept;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
    Channel channel_;
    std::string unit_label_;
};

}  // namespace rioneps
