#include "rioneps/io.hpp"

#include "rioneps/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace rioneps {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t from = 0;
    while (true) {
        const std::size_t at = line.find(delimiter, from);
        if (at == std::string_view::npos) {
            fields.push_back(line.substr(from));
            break;
        }
        fields.push_back(line.substr(from, at - from));
        from = at + 1;
    }
    return fields;
}

bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;  // from_chars rejects a leading '+'
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string location(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

// One field -> present value or missing, honoring token and sentinel markers.
// A blank field is always missing.
double parse_sample(std::string_view raw, const IngestSpec& spec,
                    const std::string& path, std::size_t line_no) {
    const std::string_view field = trim(raw);
    if (field.empty()) return missing_sample();
    for (const std::string& token : spec.missing_tokens) {
        if (field == token) return missing_sample();
    }
    double v = 0.0;
    if (!parse_double(field, v)) {
        throw DataError(location(path, line_no) + ": cannot parse value '" +
                        std::string(field) + "'");
    }
    if (!std::isfinite(v)) return missing_sample();
    for (double sentinel : spec.missing_sentinels) {
        if (v == sentinel) return missing_sample();
    }
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace

std::string format_value(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

LoadedTraces load_trace(const std::string& path, const IngestSpec& spec) {
    if (!spec.horizontal_column && !spec.vertical_column) {
        throw ConfigError("at least one position column must be mapped");
    }
    if (!std::isfinite(spec.sample_rate_hz) || spec.sample_rate_hz <= 0.0) {
        throw ConfigError("declared sample rate must be a positive number");
    }
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");

    std::size_t max_column = 0;
    for (const auto& col : {spec.time_column, spec.horizontal_column, spec.vertical_column,
                            spec.pupil_column}) {
        if (col) max_column = std::max(max_column, *col);
    }

    std::vector<double> h, v, pupil;
    std::vector<std::string> warnings;
    double first_time = missing_sample(), last_time = missing_sample();
    std::size_t first_time_row = 0, last_time_row = 0, rows = 0;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = spec.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, spec.delimiter);
        if (fields.size() <= max_column) {
            throw DataError(location(path, line_no) + ": expected at least " +
                            std::to_string(max_column + 1) + " fields, got " +
                            std::to_string(fields.size()));
        }
        if (spec.horizontal_column) {
            h.push_back(parse_sample(fields[*spec.horizontal_column], spec, path, line_no));
        }
        if (spec.vertical_column) {
            v.push_back(parse_sample(fields[*spec.vertical_column], spec, path, line_no));
        }
        if (spec.pupil_column) {
            pupil.push_back(parse_sample(fields[*spec.pupil_column], spec, path, line_no));
        }
        if (spec.time_column) {
            const double t = parse_sample(fields[*spec.time_column], spec, path, line_no);
            if (!is_missing_value(t)) {
                if (is_missing_value(first_time)) {
                    first_time = t;
                    first_time_row = rows;
                }
                last_time = t;
                last_time_row = rows;
            }
        }
        ++rows;
    }

    if (spec.cross_check_timestamps && spec.time_column) {
        if (is_missing_value(first_time) || last_time_row == first_time_row) {
            warnings.push_back("timestamp cross-check skipped: fewer than two usable timestamps");
        } else if (last_time <= first_time) {
            warnings.push_back("timestamp cross-check skipped: timestamps do not advance");
        } else {
            const double implied =
                static_cast<double>(last_time_row - first_time_row) / (last_time - first_time);
            const double rel = std::fabs(implied - spec.sample_rate_hz) / spec.sample_rate_hz;
            if (rel > 0.01) {
                std::ostringstream msg;
                msg << "timestamps imply " << implied << " Hz but " << spec.sample_rate_hz
                    << " Hz was declared (" << rel * 100.0 << "% off); the declared rate is used";
                warnings.push_back(msg.str());
            }
        }
    }

    LoadedTraces out;
    out.row_count = rows;
    out.warnings = std::move(warnings);
    if (spec.horizontal_column) {
        out.horizontal = PositionTrace(std::move(h), spec.sample_rate_hz, Channel::horizontal,
                                       spec.unit_label);
    }
    if (spec.vertical_column) {
        out.vertical = PositionTrace(std::move(v), spec.sample_rate_hz, Channel::vertical,
                                     spec.unit_label);
    }
    out.pupil = std::move(pupil);
    return out;
}

void write_outputs(const DetectionReport& report, const OutputPaths& paths) {
    // mask file
    {
        auto out = open_output(paths.mask_path);
        out << "index";
        for (const auto& ch : report.channels) out << ",flag_" << ch.name;
        if (!report.pupil.empty()) out << ",pupil";
        out << "\n";
        const std::size_t n = report.channels.empty() ? 0 : report.channels.front().mask.size();
        for (std::size_t i = 0; i < n; ++i) {
            out << i;
            for (const auto& ch : report.channels) out << ',' << (ch.mask[i] ? 1 : 0);
            if (!report.pupil.empty()) {
                out << ',' << format_value(i < report.pupil.size() ? report.pupil[i]
                                                                   : missing_sample());
            }
            out << "\n";
        }
        finish_output(out, paths.mask_path);
    }
    // segments file
    {
        auto out = open_output(paths.segments_path);
        out << "channel,start_index,end_index,start_time_s,end_time_s,peak_im\n";
        for (const auto& ch : report.channels) {
            for (const auto& seg : ch.segments) {
                out << ch.name << ',' << seg.start_index << ',' << seg.end_index << ','
                    << format_value(seg.start_time_s) << ',' << format_value(seg.end_time_s)
                    << ',' << format_value(seg.peak_im) << "\n";
            }
        }
        finish_output(out, paths.segments_path);
    }
    // stats file
    {
        nlohmann::json doc;
        doc["config"] = {{"sample_rate_hz", report.sample_rate_hz},
                         {"inefficiency_threshold", report.inefficiency_threshold},
                         {"window_size", report.window_size}};
        doc["warnings"] = report.warnings;
        nlohmann::json channels = nlohmann::json::object();
        for (const auto& ch : report.channels) {
            nlohmann::json entry = {{"samples", ch.mask.size()},
                                    {"window_count", ch.window_count},
                                    {"max_im", ch.max_im},
                                    {"flagged_samples", ch.mask.flagged_count()},
                                    {"flagged_fraction", ch.flagged_fraction},
                                    {"segment_count", ch.segments.size()}};
            if (!ch.im_series.empty()) entry["im_series"] = ch.im_series;
            channels[ch.name] = std::move(entry);
        }
        doc["channels"] = std::move(channels);

        auto out = open_output(paths.stats_path);
        out << doc.dump(2) << "\n";
        finish_output(out, paths.stats_path);
    }
}

void write_trace_csv(const std::string& path, const PositionTrace* horizontal,
                     const PositionTrace* vertical, char delimiter) {
    if (!horizontal && !vertical) {
        throw ConfigError("write_trace_csv: no channel given");
    }
    if (horizontal && vertical && horizontal->size() != vertical->size()) {
        throw std::invalid_argument("write_trace_csv: channel lengths differ");
    }
    const PositionTrace& ref = horizontal ? *horizontal : *vertical;
    auto out = open_output(path);
    out << "time";
    if (horizontal) out << delimiter << 'h';
    if (vertical) out << delimiter << 'v';
    out << "\n";
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out << format_value(static_cast<double>(i) / ref.sample_rate_hz());
        if (horizontal) out << delimiter << format_value((*horizontal)[i]);
        if (vertical) out << delimiter << format_value((*vertical)[i]);
        out << "\n";
    }
    finish_output(out, path);
}

void write_labels_csv(const std::string& path, const LabelSet& labels) {
    auto out = open_output(path);
    out << "index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << i << ',' << (labels[i] ? 1 : 0) << "\n";
    }
    finish_output(out, path);
}

LabelSet load_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    LabelSet labels;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, ',');
        if (fields.size() < 2) {
            throw DataError(location(path, line_no) + ": expected index,label");
        }
        const std::string_view value = trim(fields[1]);
        if (value == "1") {
            labels.labels.push_back(true);
        } else if (value == "0") {
            labels.labels.push_back(false);
        } else {
            throw DataError(location(path, line_no) + ": label must be 0 or 1, got '" +
                            std::string(value) + "'");
        }
    }
    return labels;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    auto out = open_output(path);
    out << "threshold,tp,fp,fn,tn,precision,recall,f1,"
           "tolerant_fp,tolerant_tn,tolerant_precision,tolerant_f1\n";
    for (const auto& row : result.rows) {
        out << format_value(row.threshold) << ',' << row.true_positives << ','
            << row.false_positives << ',' << row.false_negatives << ',' << row.true_negatives
            << ',' << format_value(row.precision) << ',' << format_value(row.recall) << ','
            << format_value(row.f1) << ',' << row.tolerant_false_positives << ','
            << row.tolerant_true_negatives << ',' << format_value(row.tolerant_precision)
            << ',' << format_value(row.tolerant_f1) << "\n";
    }
    finish_output(out, path);
}

}  // namespace rioneps
