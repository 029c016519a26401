#pragma once

#include <cstdint>
#include <span>

#include "femkit/errors.hpp"

namespace femkit::metrics {

FEMKIT_DEFINE_ERROR(MetricsError, "metrics_error");

// The positive class throughout is misinformation, i.e. label 0. "tp" counts
// misinformation caught, "fp" counts factual articles flagged by mistake.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Degenerate denominators leave the value at 0 and clear the flag instead
    // of dividing by zero.
    bool has_precision = true;
    bool has_recall = true;
    bool has_f1 = true;
};

// truth/predicted hold labels in {0, 1}; anything else throws.
ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

// Throws MetricsError when counts.total() == 0.
MetricSet metrics(const ConfusionCounts& counts);

// 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation with average ranks for ties. Needs >= 2 points.
double spearman_rho(std::span<const double> a, std::span<const double> b);

} // namespace femkit::metrics
