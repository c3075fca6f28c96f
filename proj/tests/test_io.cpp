#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rioneps/errors.hpp"
#include "rioneps/io.hpp"
#include "rioneps/synth.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace rioneps;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("rioneps_io_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

IngestSpec three_column_spec(double rate = 1000.0) {
    IngestSpec spec;
    spec.time_column = 0;
    spec.horizontal_column = 1;
    spec.vertical_column = 2;
    spec.sample_rate_hz = rate;
    return spec;
}

}  // namespace

TEST_CASE("literal NaN fields become missing samples") {
    auto path = write_file("nan_tokens.csv",
                           "t,x,y\n"
                           "0,1.5,2.5\n"
                           "0.001,NaN,2.6\n"
                           "0.002,1.7,nan\n");
    auto loaded = load_trace(path, three_column_spec());
    REQUIRE(loaded.horizontal);
    REQUIRE(loaded.vertical);
    CHECK(loaded.row_count == 3);
    CHECK(loaded.horizontal->is_missing(1));
    CHECK_FALSE(loaded.horizontal->is_missing(0));
    CHECK(loaded.vertical->is_missing(2));
    CHECK((*loaded.horizontal)[2] == 1.7);
}

TEST_CASE("numeric sentinels map to missing") {
    auto path = write_file("sentinel.csv",
                           "t,x,y\n"
                           "0,-9999,1\n"
                           "0.002,3,-9999\n");
    auto spec = three_column_spec(500.0);
    spec.missing_sentinels = {-9999.0};
    auto loaded = load_trace(path, spec);
    CHECK(loaded.horizontal->is_missing(0));
    CHECK(loaded.vertical->is_missing(1));
    CHECK((*loaded.horizontal)[1] == 3.0);
}

TEST_CASE("empty fields and configured tokens map to missing") {
    auto path = write_file("tokens.csv",
                           "t,x,y\n"
                           "0,,1\n"
                           "0.001,lost,2\n");
    auto spec = three_column_spec();
    spec.missing_tokens = {"", "lost"};
    auto loaded = load_trace(path, spec);
    CHECK(loaded.horizontal->is_missing(0));
    CHECK(loaded.horizontal->is_missing(1));
    CHECK(loaded.vertical->present_count() == 2);
}

TEST_CASE("timestamp cross-check") {
    SUBCASE("passes within 1%") {
        auto path = write_file("xcheck_ok.csv", "t,x,y\n0,1,1\n0.001,1,1\n0.002,1,1\n");
        auto spec = three_column_spec(1000.0);
        spec.cross_check_timestamps = true;
        auto loaded = load_trace(path, spec);
        CHECK(loaded.warnings.empty());
    }
    SUBCASE("warns beyond 1%") {
        auto path = write_file("xcheck_bad.csv", "t,x,y\n0,1,1\n0.002,1,1\n0.004,1,1\n");
        auto spec = three_column_spec(1000.0);  // timestamps imply 500 Hz
        spec.cross_check_timestamps = true;
        auto loaded = load_trace(path, spec);
        REQUIRE(loaded.warnings.size() == 1);
        CHECK(loaded.warnings[0].find("declared") != std::string::npos);
    }
}

TEST_CASE("unparseable rows report the line number") {
    auto path = write_file("bad_row.csv", "t,x,y\n0,1,2\n0.001,oops,2\n");
    try {
        load_trace(path, three_column_spec());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
}

TEST_CASE("rows with too few fields report the line number") {
    auto path = write_file("short_row.csv", "t,x,y\n0,1,2\n0.001,1\n");
    CHECK_THROWS_AS(load_trace(path, three_column_spec()), DataError);
}

TEST_CASE("load_trace validates the spec") {
    auto path = write_file("novalid.csv", "a,b\n1,2\n");
    IngestSpec spec;
    spec.sample_rate_hz = 100.0;
    CHECK_THROWS_AS(load_trace(path, spec), ConfigError);  // no position column
    spec.horizontal_column = 0;
    spec.sample_rate_hz = 0.0;
    CHECK_THROWS_AS(load_trace(path, spec), ConfigError);
    spec.sample_rate_hz = 100.0;
    CHECK_THROWS_AS(load_trace("/nonexistent/file.csv", spec), DataError);
}

TEST_CASE("trace round-trip preserves values and the missing pattern exactly") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> value(-30.0, 30.0);
    std::vector<double> h(500), v(500);
    for (std::size_t i = 0; i < 500; ++i) {
        h[i] = i % 17 == 0 ? missing_sample() : value(rng);
        v[i] = i % 23 == 0 ? missing_sample() : value(rng) / 3.0;
    }
    PositionTrace th(h, 500.0, Channel::horizontal);
    PositionTrace tv(v, 500.0, Channel::vertical);
    const auto path = (temp_dir() / "roundtrip.csv").string();
    write_trace_csv(path, &th, &tv);

    auto spec = three_column_spec(500.0);
    auto loaded = load_trace(path, spec);
    REQUIRE(loaded.horizontal->size() == 500);
    for (std::size_t i = 0; i < 500; ++i) {
        if (is_missing_value(h[i])) {
            CHECK(loaded.horizontal->is_missing(i));
        } else {
            CHECK((*loaded.horizontal)[i] == h[i]);
        }
        if (is_missing_value(v[i])) {
            CHECK(loaded.vertical->is_missing(i));
        } else {
            CHECK((*loaded.vertical)[i] == v[i]);
        }
    }
}

TEST_CASE("write_outputs on an all-clean report") {
    DetectionReport report;
    report.sample_rate_hz = 500.0;
    report.inefficiency_threshold = 100.0;
    report.window_size = 25;
    ChannelReport ch;
    ch.name = "h";
    ch.mask.flags.assign(4, false);
    ch.window_count = 0;
    report.channels.push_back(ch);

    OutputPaths paths{(temp_dir() / "clean_mask.csv").string(),
                      (temp_dir() / "clean_segments.csv").string(),
                      (temp_dir() / "clean_stats.json").string()};
    write_outputs(report, paths);

    CHECK(read_file(paths.mask_path) == "index,flag_h\n0,0\n1,0\n2,0\n3,0\n");
    CHECK(read_file(paths.segments_path) ==
          "channel,start_index,end_index,start_time_s,end_time_s,peak_im\n");
}

TEST_CASE("segment rows carry index-derived times") {
    DetectionReport report;
    report.sample_rate_hz = 500.0;
    report.inefficiency_threshold = 100.0;
    report.window_size = 25;
    ChannelReport ch;
    ch.name = "h";
    ch.mask.flags = {false, false, true, true, false};
    NoiseSegment seg;
    seg.start_index = 2;
    seg.end_index = 3;
    seg.start_time_s = 2.0 / 500.0;
    seg.end_time_s = 3.0 / 500.0;
    seg.peak_im = 123.5;
    ch.segments = {seg};
    report.channels.push_back(ch);

    OutputPaths paths{(temp_dir() / "seg_mask.csv").string(),
                      (temp_dir() / "seg_segments.csv").string(),
                      (temp_dir() / "seg_stats.json").string()};
    write_outputs(report, paths);
    const auto segments = read_file(paths.segments_path);
    CHECK(segments.find("h,2,3,0.004,0.006,123.5") != std::string::npos);
}

TEST_CASE("the stats file round-trips the im series exactly") {
    DetectionReport report;
    report.sample_rate_hz = 500.0;
    report.inefficiency_threshold = 100.0;
    report.window_size = 25;
    ChannelReport ch;
    ch.name = "v";
    ch.mask.flags.assign(64, false);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> im(0.0, 2000.0);
    for (int i = 0; i < 40; ++i) ch.im_series.push_back(im(rng));
    ch.window_count = 40;
    report.channels.push_back(ch);

    OutputPaths paths{(temp_dir() / "im_mask.csv").string(),
                      (temp_dir() / "im_segments.csv").string(),
                      (temp_dir() / "im_stats.json").string()};
    write_outputs(report, paths);

    auto doc = nlohmann::json::parse(read_file(paths.stats_path));
    auto series = doc["channels"]["v"]["im_series"].get<std::vector<double>>();
    REQUIRE(series.size() == ch.im_series.size());
    for (std::size_t i = 0; i < series.size(); ++i) CHECK(series[i] == ch.im_series[i]);
    CHECK(doc["config"]["sample_rate_hz"].get<double>() == 500.0);
    CHECK(doc["config"]["window_size"].get<int>() == 25);
}

TEST_CASE("a mapped pupil column is passed through to the mask file") {
    auto path = write_file("pupil.csv",
                           "t,x,y,p\n"
                           "0,1,2,4.25\n"
                           "0.002,1,2,\n"
                           "0.004,1,2,4.5\n");
    auto spec = three_column_spec(500.0);
    spec.pupil_column = 3;
    auto loaded = load_trace(path, spec);
    REQUIRE(loaded.pupil.size() == 3);
    CHECK(loaded.pupil[0] == 4.25);
    CHECK(is_missing_value(loaded.pupil[1]));

    DetectionReport report;
    report.sample_rate_hz = 500.0;
    report.window_size = 25;
    ChannelReport ch;
    ch.name = "h";
    ch.mask.flags.assign(3, false);
    report.channels.push_back(ch);
    report.pupil = loaded.pupil;

    OutputPaths paths{(temp_dir() / "pupil_mask.csv").string(),
                      (temp_dir() / "pupil_segments.csv").string(),
                      (temp_dir() / "pupil_stats.json").string()};
    write_outputs(report, paths);
    CHECK(read_file(paths.mask_path) ==
          "index,flag_h,pupil\n0,0,4.25\n1,0,NaN\n2,0,4.5\n");
}

TEST_CASE("labels round-trip") {
    LabelSet labels;
    labels.labels = {false, true, true, false, true};
    const auto path = (temp_dir() / "labels.csv").string();
    write_labels_csv(path, labels);
    auto loaded = load_labels_csv(path);
    CHECK(loaded.labels == labels.labels);
}

TEST_CASE("sweep table is written as delimited text") {
    SweepResult result;
    SweepRow row;
    row.threshold = 100.0;
    row.true_positives = 10;
    row.false_positives = 2;
    row.false_negatives = 1;
    row.true_negatives = 87;
    row.precision = 10.0 / 12.0;
    row.recall = 10.0 / 11.0;
    row.f1 = 2.0 * row.precision * row.recall / (row.precision + row.recall);
    result.rows.push_back(row);
    result.best_threshold = 100.0;

    const auto path = (temp_dir() / "sweep.csv").string();
    write_sweep_csv(path, result);
    const auto content = read_file(path);
    CHECK(content.find("threshold,tp,fp,fn,tn,") != std::string::npos);
    CHECK(content.find("100,10,2,1,87,") != std::string::npos);
}

TEST_CASE("format_value round-trips doubles through text") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> mag(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = mag(rng) * std::pow(10.0, static_cast<int>(i % 13) - 6);
        const std::string text = format_value(v);
        double back = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(ec == std::errc());
        CHECK(back == v);
    }
    CHECK(format_value(missing_sample()) == "NaN");
}

TEST_CASE("unwritable output paths raise DataError") {
    DetectionReport report;
    ChannelReport ch;
    ch.name = "h";
    report.channels.push_back(ch);
    OutputPaths paths{"/nonexistent_dir/mask.csv", "/nonexistent_dir/seg.csv",
                      "/nonexistent_dir/stats.json"};
    CHECK_THROWS_AS(write_outputs(report, paths), DataError);
}
