#pragma once

#include "rioneps/detector.hpp"
#include "rioneps/synth.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace rioneps {

/// Detection quality at one threshold, scored against ground-truth labels.
///
/// Two scorings are kept side by side. The strict counts classify every
/// sample as-is. The tolerant counts reclassify predicted-positive samples
/// that are unlabeled but within window_size - 1 samples of a labeled
/// interval from false positive to true negative, because whole-window
/// marking widens every detection by up to that much. Each quadruple sums to
/// the trace length.
///
/// Degenerate conventions: precision is 1 when there are no predictions,
/// recall is 1 when there are no labeled positives, and f1 is 0 when
/// precision + recall is 0.
struct SweepRow {
    double threshold = 0.0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t true_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tolerant_false_positives = 0;
    std::size_t tolerant_true_negatives = 0;
    double tolerant_precision = 0.0;
    double tolerant_f1 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;       // in the order the thresholds were given
    double best_threshold = 0.0;      // highest tolerant f1, ties to the larger threshold
    int window_size = 0;
};

/// Runs detection at every threshold and scores each mask against the labels.
/// The window size comes from the trace's sample rate (rate/20 rule) unless
/// overridden. Thresholds must be non-empty and positive (+inf is allowed and
/// yields zero predictions). Throws ConfigError on bad inputs and
/// std::invalid_argument when labels and trace lengths differ.
SweepResult sweep(const PositionTrace& trace, const LabelSet& labels,
                  const std::vector<double>& thresholds,
                  std::optional<int> window_size_override = std::nullopt);

}  // namespace rioneps
