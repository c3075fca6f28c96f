#include "rioneps/calibrate.hpp"

#include "rioneps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rioneps {

namespace {

double safe_ratio(std::size_t num, std::size_t den, double when_empty) {
    if (den == 0) return when_empty;
    return static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
    const double sum = precision + recall;
    if (sum == 0.0) return 0.0;
    return 2.0 * precision * recall / sum;
}

// Labels dilated by `radius` samples on each side.
std::vector<bool> dilate(const std::vector<bool>& labels, std::size_t radius) {
    const std::size_t n = labels.size();
    std::vector<bool> out(n, false);
    std::size_t i = 0;
    while (i < n) {
        if (!labels[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && labels[j + 1]) ++j;
        const std::size_t from = i >= radius ? i - radius : 0;
        const std::size_t to = std::min(n - 1, j + radius);
        for (std::size_t k = from; k <= to; ++k) out[k] = true;
        i = j + 1;
    }
    return out;
}

}  // namespace

SweepResult sweep(const PositionTrace& trace, const LabelSet& labels,
                  const std::vector<double>& thresholds,
                  std::optional<int> window_size_override) {
    if (labels.size() != trace.size()) {
        throw std::invalid_argument("labels length does not match trace length");
    }
    if (thresholds.empty()) {
        throw ConfigError("threshold list must not be empty");
    }
    for (double t : thresholds) {
        if (std::isnan(t) || t <= 0.0) {
            throw ConfigError("thresholds must be positive");
        }
    }
    const int ws =
        window_size_override ? *window_size_override : window_size(trace.sample_rate_hz());
    if (ws < 2) throw ConfigError("window size must be at least 2 samples");

    // One pass over the windows; every threshold reuses the same metric
    // series, which also makes the flagged set exactly monotone in the
    // threshold.
    DetectorConfig base(trace.sample_rate_hz(), 0.0, ws);
    const auto series = inefficiency_series(trace, base);

    const std::size_t n = trace.size();
    const std::vector<bool> near = dilate(labels.labels, static_cast<std::size_t>(ws) - 1);

    SweepResult result;
    result.window_size = ws;
    result.rows.reserve(thresholds.size());
    double best_f1 = -1.0;
    for (double it : thresholds) {
        const std::vector<bool> predicted = mask_from_series(series, n, it).flags;

        SweepRow row;
        row.threshold = it;
        for (std::size_t j = 0; j < n; ++j) {
            if (predicted[j] && labels[j]) {
                ++row.true_positives;
            } else if (predicted[j]) {
                ++row.false_positives;
                if (near[j]) {
                    ++row.tolerant_true_negatives;  // forgiven: inside the dilation margin
                } else {
                    ++row.tolerant_false_positives;
                }
            } else if (labels[j]) {
                ++row.false_negatives;
            } else {
                ++row.true_negatives;
                ++row.tolerant_true_negatives;
            }
        }
        row.precision = safe_ratio(row.true_positives,
                                   row.true_positives + row.false_positives, 1.0);
        row.recall = safe_ratio(row.true_positives,
                                row.true_positives + row.false_negatives, 1.0);
        row.f1 = f1_of(row.precision, row.recall);
        row.tolerant_precision =
            safe_ratio(row.true_positives,
                       row.true_positives + row.tolerant_false_positives, 1.0);
        row.tolerant_f1 = f1_of(row.tolerant_precision, row.recall);

        if (row.tolerant_f1 > best_f1 ||
            (row.tolerant_f1 == best_f1 && row.threshold > result.best_threshold)) {
            best_f1 = row.tolerant_f1;
            result.best_threshold = row.threshold;
        }
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace rioneps
