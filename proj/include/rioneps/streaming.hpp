#pragma once

#include "rioneps/detector.hpp"

#include <cstddef>
#include <vector>

namespace rioneps {

/// A per-sample flag whose value can no longer change.
struct FlagEvent {
    std::size_t index = 0;
    bool flag = false;

    friend bool operator==(const FlagEvent&, const FlagEvent&) = default;
};

/// Online detector. Feed samples one at a time with push(); each call returns
/// the flags that became final, in index order. A sample's flag is final once
/// no future window can contain it, so the emission latency is at most
/// window_size - 1 samples; flush() finalizes the rest at end of stream.
///
/// Output is identical, flag for flag, to batch detect() on the same samples.
/// Streams shorter than one window produce all-false flags on flush, where
/// batch detect() would reject the trace.
///
/// State is O(window_size) regardless of stream length. One logical owner at
/// a time: instances may be moved between threads but not shared for
/// simultaneous mutation; independent instances run in parallel fine.
class StreamingDetector {
public:
    explicit StreamingDetector(DetectorConfig config);

    /// Append one sample. Non-finite values (NaN, inf) count as missing,
    /// matching the batch ingestion rule.
    std::vector<FlagEvent> push(double sample);

    /// Finalize and emit all remaining samples. The detector then rejects
    /// further pushes until reset().
    std::vector<FlagEvent> flush();

    void reset();

    const DetectorConfig& config() const noexcept { return config_; }
    std::size_t samples_pushed() const noexcept { return count_; }
    std::size_t samples_emitted() const noexcept { return emitted_; }

private:
    DetectorConfig config_;
    std::vector<double> ring_;    // last window_size samples, slot = index % ws
    std::vector<bool> pending_;   // accumulated flags for not-yet-final samples
    std::size_t count_ = 0;
    std::size_t emitted_ = 0;
    bool flushed_ = false;
};

}  // namespace rioneps
