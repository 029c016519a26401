#include "femkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "femkit/kernels.hpp"

namespace femkit::metrics {

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) {
        throw MetricsError("confusion: truth and predicted lengths differ");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        int t = truth[i], p = predicted[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
            throw MetricsError("confusion: labels must be 0 or 1");
        }
        if (t == 0) {
            (p == 0 ? c.tp : c.fn) += 1;
        } else {
            (p == 0 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

MetricSet metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw MetricsError("metrics: empty confusion counts");
    MetricSet m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        m.has_precision = false;
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        m.has_recall = false;
    }
    if (m.has_precision && m.has_recall && m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.has_f1 = false;
    }
    return m;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw MetricsError("cosine_similarity: dimension mismatch");
    double na = kernels::sumsq(a);
    double nb = kernels::sumsq(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return kernels::dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

// Average ranks (1-based); ties share the mean of the ranks they occupy.
std::vector<double> ranks_of(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw MetricsError("spearman_rho: length mismatch");
    if (a.size() < 2) throw MetricsError("spearman_rho: need at least two points");
    auto ra = ranks_of(a);
    auto rb = ranks_of(b);
    const double n = static_cast<double>(a.size());
    double ma = kernels::sum(ra) / n;
    double mb = kernels::sum(rb) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        double da = ra[i] - ma, db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) throw MetricsError("spearman_rho: constant input has no rank order");
    return cov / std::sqrt(va * vb);
}

} // namespace femkit::metrics
