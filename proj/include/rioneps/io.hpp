#pragma once

#include "rioneps/calibrate.hpp"
#include "rioneps/detector.hpp"
#include "rioneps/synth.hpp"
#include "rioneps/trace.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rioneps {

/// How to read a delimited-text recording. Column indices are 0-based; at
/// least one position column must be mapped. Vendor exports mark lost
/// tracking in different ways (literal NaN, blank fields, sentinel values
/// like -9999), so both token and numeric-sentinel missing markers are
/// configurable. The declared sample rate is authoritative; when
/// cross_check_timestamps is set and a time column exists, a rate implied by
/// the timestamps that differs by more than 1% only produces a warning.
struct IngestSpec {
    char delimiter = ',';
    bool has_header = true;
    std::optional<std::size_t> time_column;
    std::optional<std::size_t> horizontal_column;
    std::optional<std::size_t> vertical_column;
    std::optional<std::size_t> pupil_column;
    std::vector<std::string> missing_tokens;  // compared after trimming; blank fields and
                                              // NaN/inf text are missing regardless
    std::vector<double> missing_sentinels;
    double sample_rate_hz = 0.0;
    bool cross_check_timestamps = false;
    std::string unit_label;
};

/// Result of ingesting one file. Pupil diameter, when mapped, is passed
/// through untouched (never analyzed). row_count equals every trace's length.
struct LoadedTraces {
    std::optional<PositionTrace> horizontal;
    std::optional<PositionTrace> vertical;
    std::vector<double> pupil;
    std::vector<std::string> warnings;
    std::size_t row_count = 0;
};

/// Detection results for one channel, ready for export.
struct ChannelReport {
    std::string name;  // "h", "v" or "union"
    NoiseMask mask;
    std::vector<NoiseSegment> segments;
    std::size_t window_count = 0;
    double max_im = 0.0;
    double flagged_fraction = 0.0;
    std::vector<double> im_series;  // filled only when the caller asked for it
};

struct DetectionReport {
    double sample_rate_hz = 0.0;
    double inefficiency_threshold = 0.0;
    int window_size = 0;
    std::vector<ChannelReport> channels;
    std::vector<double> pupil;  // pass-through column, appended to the mask file when present
    std::vector<std::string> warnings;
};

struct OutputPaths {
    std::string mask_path;
    std::string segments_path;
    std::string stats_path;
};

/// Reads a delimited-text file per the spec. Missing markers and non-finite
/// numerics become missing samples; every data row maps to exactly one sample
/// per mapped channel. Throws DataError with file/line context on rows that
/// cannot be parsed, ConfigError on an unusable spec.
LoadedTraces load_trace(const std::string& path, const IngestSpec& spec);

/// Writes the mask, segments and stats files.
///   mask:     header `index,flag_<ch>...`, one 0/1 row per sample
///   segments: header `channel,start_index,end_index,start_time_s,end_time_s,peak_im`
///   stats:    JSON with the config echo, warnings and per-channel summary,
///             plus each channel's im series when the report carries one
/// Numeric text uses shortest round-trip formatting, so values reload
/// bit-exactly. Throws DataError when a path cannot be written.
void write_outputs(const DetectionReport& report, const OutputPaths& paths);

/// Writes a trace bundle as `time,h,v` (mapped columns only) with NaN for
/// missing samples; the inverse of load_trace with the matching spec.
void write_trace_csv(const std::string& path, const PositionTrace* horizontal,
                     const PositionTrace* vertical, char delimiter = ',');

/// Ground-truth labels as `index,label` rows.
void write_labels_csv(const std::string& path, const LabelSet& labels);
LabelSet load_labels_csv(const std::string& path);

/// Threshold sweep table as delimited text, one row per threshold.
void write_sweep_csv(const std::string& path, const SweepResult& result);

/// Shortest text representation that parses back to exactly the same double.
/// Missing values print as `NaN`.
std::string format_value(double v);

}  // namespace rioneps
