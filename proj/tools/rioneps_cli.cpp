// rioneps — command-line detection of rapid irregularly oscillating noise in
// eye-position traces. Subcommands: detect (batch files), stream (stdin,
// one sample per line), synth (labeled synthetic traces), calibrate
// (threshold sweep against ground truth).

#include "rioneps/calibrate.hpp"
#include "rioneps/detector.hpp"
#include "rioneps/errors.hpp"
#include "rioneps/io.hpp"
#include "rioneps/streaming.hpp"
#include "rioneps/synth.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace rioneps;

namespace {

struct IngestFlags {
    std::string delimiter = ",";
    std::string columns = "time,h,v";
    std::vector<std::string> missing_values;
    bool no_header = false;
    bool check_timestamps = false;
};

char parse_delimiter(const std::string& text) {
    if (text == "tab" || text == "\\t") return '\t';
    if (text.size() != 1) {
        throw ConfigError("--delimiter must be a single character or 'tab'");
    }
    return text[0];
}

IngestSpec build_ingest_spec(const IngestFlags& flags, double sample_rate) {
    IngestSpec spec;
    spec.delimiter = parse_delimiter(flags.delimiter);
    spec.has_header = !flags.no_header;
    spec.sample_rate_hz = sample_rate;
    spec.cross_check_timestamps = flags.check_timestamps;

    std::size_t index = 0;
    std::stringstream roles(flags.columns);
    std::string role;
    while (std::getline(roles, role, ',')) {
        auto assign = [&](std::optional<std::size_t>& slot, const char* name) {
            if (slot) throw ConfigError(std::string("--columns maps '") + name + "' twice");
            slot = index;
        };
        if (role == "time" || role == "t") {
            assign(spec.time_column, "time");
        } else if (role == "h" || role == "x" || role == "horizontal") {
            assign(spec.horizontal_column, "h");
        } else if (role == "v" || role == "y" || role == "vertical") {
            assign(spec.vertical_column, "v");
        } else if (role == "pupil" || role == "p") {
            assign(spec.pupil_column, "pupil");
        } else if (role == "skip" || role == "-" || role == "_" || role == "ignore") {
            // unmapped column
        } else {
            throw ConfigError("--columns: unknown role '" + role +
                              "' (use time,h,v,pupil,skip)");
        }
        ++index;
    }
    if (!spec.horizontal_column && !spec.vertical_column) {
        throw ConfigError("--columns must map at least one position column (h or v)");
    }

    for (const std::string& marker : flags.missing_values) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(marker.data(), marker.data() + marker.size(), v);
        if (ec == std::errc() && ptr == marker.data() + marker.size()) {
            spec.missing_sentinels.push_back(v);
        } else {
            spec.missing_tokens.push_back(marker);
        }
    }
    return spec;
}

DetectorConfig build_detector_config(double sample_rate, double threshold,
                                     std::optional<int> window_override) {
    try {
        return DetectorConfig(sample_rate, threshold, window_override);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) +
                          " (check --sample-rate, --threshold, --window)");
    }
}

// "lo:hi:step" or a comma-separated list
std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0, step = 0.0;
        std::stringstream ss(text);
        std::string part;
        std::vector<double> parts;
        while (std::getline(ss, part, ':')) parts.push_back(std::stod(part));
        if (parts.size() != 3) throw ConfigError("--thresholds range must be lo:hi:step");
        lo = parts[0];
        hi = parts[1];
        step = parts[2];
        if (step <= 0.0 || lo > hi) throw ConfigError("--thresholds range must be lo:hi:step with step > 0");
        for (double t = lo; t <= hi + step * 1e-9; t += step) out.push_back(t);
    } else {
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    }
    if (out.empty()) throw ConfigError("--thresholds is empty");
    return out;
}

// out.csv -> out_segments.csv / out_stats.json
std::string derive_path(const std::string& base, const std::string& suffix,
                        const std::string& extension) {
    const std::size_t slash = base.find_last_of('/');
    const std::size_t dot = base.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return base + suffix + extension;
    }
    return base.substr(0, dot) + suffix + extension;
}

ChannelReport analyze_channel(const std::string& name, const PositionTrace& trace,
                              const DetectorConfig& config, bool emit_im,
                              std::vector<std::string>& warnings) {
    ChannelReport report;
    report.name = name;
    const std::size_t n = trace.size();
    if (n < static_cast<std::size_t>(config.window_size())) {
        // shorter than one window: no evidence either way, report all-clean
        report.mask.flags.assign(n, false);
        warnings.push_back("channel " + name + ": trace of " + std::to_string(n) +
                           " samples is shorter than one window (" +
                           std::to_string(config.window_size()) + "); no windows evaluated");
        return report;
    }
    const auto series = inefficiency_series(trace, config);
    report.mask = mask_from_series(series, n, config.inefficiency_threshold());
    report.segments = mask_to_segments(report.mask, series, config.sample_rate_hz());
    report.window_count = series.size();
    for (const auto& w : series) report.max_im = std::max(report.max_im, w.im);
    report.flagged_fraction =
        n == 0 ? 0.0 : static_cast<double>(report.mask.flagged_count()) / static_cast<double>(n);
    if (emit_im) {
        report.im_series.reserve(series.size());
        for (const auto& w : series) report.im_series.push_back(w.im);
    }
    return report;
}

// union channel: OR of the two masks; peak_im scans both channels' windows
ChannelReport combine_union(const ChannelReport& h, const ChannelReport& v,
                            const PositionTrace& href, const PositionTrace& vref,
                            const DetectorConfig& config) {
    ChannelReport report;
    report.name = "union";
    report.mask = union_mask(h.mask, v.mask);

    std::vector<WindowStats> merged;
    const std::size_t n = href.size();
    if (n >= static_cast<std::size_t>(config.window_size())) {
        const auto hs = inefficiency_series(href, config);
        const auto vs = inefficiency_series(vref, config);
        merged.resize(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i) {
            merged[i].start_index = i;
            merged[i].im = std::max(hs[i].im, vs[i].im);
        }
        report.window_count = merged.size();
    }
    report.segments = mask_to_segments(report.mask, merged, config.sample_rate_hz());
    report.max_im = std::max(h.max_im, v.max_im);
    report.flagged_fraction =
        n == 0 ? 0.0 : static_cast<double>(report.mask.flagged_count()) / static_cast<double>(n);
    return report;
}

int run_detect(const std::string& input, const std::string& output,
               std::string segments_path, std::string stats_path, double sample_rate,
               double threshold, std::optional<int> window_override,
               const std::string& channel, const IngestFlags& ingest, bool emit_im) {
    const DetectorConfig config = build_detector_config(sample_rate, threshold, window_override);
    IngestSpec spec = build_ingest_spec(ingest, sample_rate);

    if ((channel == "h" && !spec.horizontal_column) ||
        (channel == "v" && !spec.vertical_column)) {
        throw ConfigError("--channel " + channel + " but --columns does not map that channel");
    }
    if (channel == "union" && (!spec.horizontal_column || !spec.vertical_column)) {
        throw ConfigError("--channel union needs both position columns mapped");
    }

    auto loaded = load_trace(input, spec);

    DetectionReport report;
    report.sample_rate_hz = sample_rate;
    report.inefficiency_threshold = threshold;
    report.window_size = config.window_size();
    report.pupil = std::move(loaded.pupil);
    report.warnings = loaded.warnings;

    const bool want_h = (channel == "h" || channel == "both" || channel == "union") &&
                        loaded.horizontal.has_value();
    const bool want_v = (channel == "v" || channel == "both" || channel == "union") &&
                        loaded.vertical.has_value();
    if (want_h) {
        report.channels.push_back(
            analyze_channel("h", *loaded.horizontal, config, emit_im, report.warnings));
    }
    if (want_v) {
        report.channels.push_back(
            analyze_channel("v", *loaded.vertical, config, emit_im, report.warnings));
    }
    if (channel == "union") {
        report.channels.push_back(combine_union(report.channels[0], report.channels[1],
                                                *loaded.horizontal, *loaded.vertical, config));
    }

    if (segments_path.empty()) segments_path = derive_path(output, "_segments", ".csv");
    if (stats_path.empty()) stats_path = derive_path(output, "_stats", ".json");
    write_outputs(report, OutputPaths{output, segments_path, stats_path});

    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int run_stream(double sample_rate, double threshold, std::optional<int> window_override) {
    const DetectorConfig config = build_detector_config(sample_rate, threshold, window_override);
    StreamingDetector detector(config);

    auto emit = [](const std::vector<FlagEvent>& events) {
        for (const auto& e : events) std::cout << e.index << ',' << (e.flag ? 1 : 0) << '\n';
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t lead = 0;
        while (lead < line.size() && line[lead] == ' ') ++lead;
        line.erase(0, lead);
        double value = missing_sample();
        if (!line.empty()) {
            const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
            if (ec != std::errc() || ptr != line.data() + line.size()) {
                std::cerr << "error: stdin:" << line_no << ": cannot parse sample '" << line
                          << "'\n";
                return 2;
            }
        }
        emit(detector.push(value));
        std::cout.flush();
    }
    emit(detector.flush());
    std::cout.flush();
    return 0;
}

std::vector<Fixation> parse_fixations(const std::string& text) {
    std::vector<Fixation> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("--fixations entries must be position:dwell_seconds");
        }
        Fixation f;
        f.position = std::stod(part.substr(0, colon));
        f.dwell_s = std::stod(part.substr(colon + 1));
        out.push_back(f);
    }
    if (out.empty()) throw ConfigError("--fixations is empty");
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_intervals(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const std::size_t colon = part.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("--inject entries must be start:end sample indices");
        }
        out.emplace_back(std::stoull(part.substr(0, colon)),
                         std::stoull(part.substr(colon + 1)));
    }
    return out;
}

int run_synth(const std::string& output, const std::string& labels_path, double sample_rate,
              double duration, const std::string& fixations, double saccade_ms, double jitter,
              std::optional<std::uint64_t> seed_flag, const std::string& inject_spec,
              double offset, double switch_prob, double missing_prob) {
    SynthSpec spec;
    spec.sample_rate_hz = sample_rate;
    spec.duration_s = duration;
    spec.fixations = parse_fixations(fixations);
    spec.saccade_duration_s = saccade_ms / 1000.0;
    spec.jitter_sd = jitter;
    spec.seed = seed_flag ? *seed_flag : std::random_device{}();
    std::cerr << "seed=" << spec.seed << "\n";

    PositionTrace trace = generate(spec);
    LabelSet labels;
    labels.labels.assign(trace.size(), false);

    if (!inject_spec.empty()) {
        NoiseInjection inj;
        inj.intervals = parse_intervals(inject_spec);
        inj.false_offset = offset;
        inj.switch_probability = switch_prob;
        inj.missing_probability = missing_prob;
        auto result = inject(trace, inj, spec.seed + 1);
        trace = std::move(result.trace);
        labels = std::move(result.labels);
    }

    write_trace_csv(output, &trace, nullptr);
    if (!labels_path.empty()) write_labels_csv(labels_path, labels);
    return 0;
}

int run_calibrate(const std::string& input, const std::string& labels_path,
                  const std::string& output, double sample_rate,
                  std::optional<int> window_override, const std::string& thresholds_text,
                  const std::string& channel, const IngestFlags& ingest) {
    IngestSpec spec = build_ingest_spec(ingest, sample_rate);
    auto loaded = load_trace(input, spec);

    const PositionTrace* trace = nullptr;
    if (channel == "h") {
        if (!loaded.horizontal) throw ConfigError("--channel h but no horizontal column mapped");
        trace = &*loaded.horizontal;
    } else if (channel == "v") {
        if (!loaded.vertical) throw ConfigError("--channel v but no vertical column mapped");
        trace = &*loaded.vertical;
    } else {
        throw ConfigError("--channel must be h or v for calibrate");
    }

    LabelSet labels = load_labels_csv(labels_path);
    const std::vector<double> thresholds = parse_thresholds(thresholds_text);

    SweepResult result = sweep(*trace, labels, thresholds, window_override);
    write_sweep_csv(output, result);

    for (const auto& row : result.rows) {
        if (row.threshold == result.best_threshold) {
            std::cout << "best_threshold=" << format_value(result.best_threshold)
                      << " tolerant_f1=" << format_value(row.tolerant_f1)
                      << " recall=" << format_value(row.recall) << "\n";
            break;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detection of rapid irregularly oscillating noise in eye-position signals"};
    app.require_subcommand(1);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "Batch detection on a recorded trace file");
    std::string d_input, d_output, d_segments, d_stats, d_channel = "both";
    double d_rate = 0.0, d_threshold = 0.0;
    std::optional<int> d_window;
    IngestFlags d_ingest;
    bool d_emit_im = false;
    detect_cmd->add_option("--input", d_input, "Input delimited-text file")->required();
    detect_cmd->add_option("--output", d_output, "Mask output file")->required();
    detect_cmd->add_option("--segments", d_segments, "Segments output (default: <output>_segments.csv)");
    detect_cmd->add_option("--stats", d_stats, "Stats output (default: <output>_stats.json)");
    detect_cmd->add_option("--sample-rate", d_rate, "Sample rate in Hz")->required();
    detect_cmd->add_option("--threshold", d_threshold, "Inefficiency threshold (signal units)")->required();
    detect_cmd->add_option("--window", d_window, "Window size override in samples (default: rate/20)");
    detect_cmd->add_option("--channel", d_channel, "Channel to analyze: h, v, both or union")
        ->check(CLI::IsMember({"h", "v", "both", "union"}));
    detect_cmd->add_option("--delimiter", d_ingest.delimiter, "Field delimiter (default ',', 'tab' allowed)");
    detect_cmd->add_option("--columns", d_ingest.columns,
                           "Column roles, e.g. time,h,v or skip,h (default time,h,v)");
    detect_cmd->add_option("--missing-values", d_ingest.missing_values,
                           "Extra tokens or sentinel numbers meaning missing")
        ->delimiter(',');
    detect_cmd->add_flag("--no-header", d_ingest.no_header, "Input has no header row");
    detect_cmd->add_flag("--check-timestamps", d_ingest.check_timestamps,
                         "Warn when timestamps disagree with --sample-rate by more than 1%");
    detect_cmd->add_flag("--emit-im", d_emit_im, "Include the per-window im series in the stats file");

    // stream
    auto* stream_cmd = app.add_subcommand("stream", "Online detection: stdin samples, stdout index,flag");
    double s_rate = 0.0, s_threshold = 0.0;
    std::optional<int> s_window;
    stream_cmd->add_option("--sample-rate", s_rate, "Sample rate in Hz")->required();
    stream_cmd->add_option("--threshold", s_threshold, "Inefficiency threshold (signal units)")->required();
    stream_cmd->add_option("--window", s_window, "Window size override in samples");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic trace");
    std::string y_output, y_labels, y_fixations, y_inject;
    double y_rate = 500.0, y_duration = 0.0, y_saccade_ms = 30.0, y_jitter = 0.0;
    double y_offset = 2.0, y_switch = 0.5, y_missing = 0.0;
    std::optional<std::uint64_t> y_seed;
    synth_cmd->add_option("--output", y_output, "Trace output file (time,h)")->required();
    synth_cmd->add_option("--labels", y_labels, "Ground-truth labels output file");
    synth_cmd->add_option("--sample-rate", y_rate, "Sample rate in Hz");
    synth_cmd->add_option("--duration", y_duration, "Trace duration in seconds")->required();
    synth_cmd->add_option("--fixations", y_fixations, "position:dwell_s list, e.g. 0:1.0,8:1.5")->required();
    synth_cmd->add_option("--saccade-ms", y_saccade_ms, "Saccade ramp duration in ms");
    synth_cmd->add_option("--jitter", y_jitter, "Fixation jitter standard deviation");
    synth_cmd->add_option("--seed", y_seed, "RNG seed (chosen and echoed when omitted)");
    synth_cmd->add_option("--inject", y_inject, "Noise intervals start:end[,start:end...] (sample indices)");
    synth_cmd->add_option("--offset", y_offset, "False-position offset amplitude");
    synth_cmd->add_option("--switch-prob", y_switch, "Per-sample state switch probability (0,1]");
    synth_cmd->add_option("--missing-prob", y_missing, "Missing-sample probability inside intervals");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "Sweep thresholds against labeled data");
    std::string c_input, c_labels, c_output, c_thresholds, c_channel = "h";
    double c_rate = 0.0;
    std::optional<int> c_window;
    IngestFlags c_ingest;
    cal_cmd->add_option("--input", c_input, "Input delimited-text trace file")->required();
    cal_cmd->add_option("--labels", c_labels, "Ground-truth labels file (index,label)")->required();
    cal_cmd->add_option("--output", c_output, "Sweep table output file")->required();
    cal_cmd->add_option("--sample-rate", c_rate, "Sample rate in Hz")->required();
    cal_cmd->add_option("--window", c_window, "Window size override in samples");
    cal_cmd->add_option("--thresholds", c_thresholds, "lo:hi:step or comma list")->required();
    cal_cmd->add_option("--channel", c_channel, "Channel to score: h or v")
        ->check(CLI::IsMember({"h", "v"}));
    cal_cmd->add_option("--delimiter", c_ingest.delimiter, "Field delimiter");
    cal_cmd->add_option("--columns", c_ingest.columns, "Column roles (default time,h,v)");
    cal_cmd->add_option("--missing-values", c_ingest.missing_values,
                        "Extra tokens or sentinel numbers meaning missing")
        ->delimiter(',');
    cal_cmd->add_flag("--no-header", c_ingest.no_header, "Input has no header row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (detect_cmd->parsed()) {
            return run_detect(d_input, d_output, d_segments, d_stats, d_rate, d_threshold,
                              d_window, d_channel, d_ingest, d_emit_im);
        }
        if (stream_cmd->parsed()) {
            return run_stream(s_rate, s_threshold, s_window);
        }
        if (synth_cmd->parsed()) {
            return run_synth(y_output, y_labels, y_rate, y_duration, y_fixations, y_saccade_ms,
                             y_jitter, y_seed, y_inject, y_offset, y_switch, y_missing);
        }
        if (cal_cmd->parsed()) {
            return run_calibrate(c_input, c_labels, c_output, c_rate, c_window, c_thresholds,
                                 c_channel, c_ingest);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
