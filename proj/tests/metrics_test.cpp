#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "femkit/metrics.hpp"

using namespace femkit;

TEST_CASE("confusion counts treat misinformation (label 0) as positive") {
    std::vector<int> truth = {0, 0, 1, 1, 1};
    std::vector<int> pred = {0, 1, 0, 1, 1};
    auto c = metrics::confusion(truth, pred);
    CHECK(c.tp == 1); // misinformation caught
    CHECK(c.fn == 1); // misinformation missed
    CHECK(c.fp == 1); // information flagged
    CHECK(c.tn == 2);
    CHECK(c.total() == 5);

    auto m = metrics::metrics(c);
    CHECK(m.accuracy == doctest::Approx(0.6));
    CHECK(m.precision == doctest::Approx(0.5));
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.f1 == doctest::Approx(0.5));
    CHECK(m.has_f1);
}

TEST_CASE("metric identities on exact counts") {
    metrics::ConfusionCounts c{30, 10, 50, 10};
    auto m = metrics::metrics(c);
    CHECK(m.accuracy == doctest::Approx(0.8));
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.75));
    // harmonic mean of equal numbers is the number itself
    CHECK(m.f1 == doctest::Approx(0.75));

    metrics::ConfusionCounts skew{10, 30, 55, 5};
    auto s = metrics::metrics(skew);
    CHECK(s.precision == doctest::Approx(0.25));
    CHECK(s.recall == doctest::Approx(10.0 / 15.0));
    CHECK(s.f1 == doctest::Approx(2.0 * 0.25 * (10.0 / 15.0) / (0.25 + 10.0 / 15.0)));
}

TEST_CASE("degenerate denominators are flagged, not divided") {
    // no positives anywhere: precision/recall/f1 undefined, accuracy fine
    auto m = metrics::metrics(metrics::confusion(std::vector<int>{1, 1}, std::vector<int>{1, 1}));
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK_FALSE(m.has_precision);
    CHECK_FALSE(m.has_recall);
    CHECK_FALSE(m.has_f1);
    CHECK(m.precision == 0.0);

    // predicted all negative with real positives: recall defined (0), f1 not
    auto n = metrics::metrics(metrics::confusion(std::vector<int>{0, 1}, std::vector<int>{1, 1}));
    CHECK_FALSE(n.has_precision);
    CHECK(n.has_recall);
    CHECK(n.recall == doctest::Approx(0.0));
    CHECK_FALSE(n.has_f1);

    CHECK_THROWS_AS(metrics::metrics(metrics::ConfusionCounts{}), metrics::MetricsError);
    CHECK_THROWS_AS(metrics::confusion(std::vector<int>{2}, std::vector<int>{0}),
                    metrics::MetricsError);
    CHECK_THROWS_AS(metrics::confusion(std::vector<int>{0, 1}, std::vector<int>{0}),
                    metrics::MetricsError);
}

TEST_CASE("cosine similarity") {
    std::vector<double> ex = {1.0, 0.0};
    std::vector<double> ey = {0.0, 1.0};
    std::vector<double> diag = {1.0, 1.0};
    std::vector<double> neg = {-2.0, 0.0};
    std::vector<double> zero = {0.0, 0.0};

    CHECK(metrics::cosine_similarity(ex, ex) == doctest::Approx(1.0));
    CHECK(metrics::cosine_similarity(ex, ey) == doctest::Approx(0.0));
    CHECK(metrics::cosine_similarity(ex, diag) == doctest::Approx(0.7071067811865475));
    CHECK(metrics::cosine_similarity(ex, neg) == doctest::Approx(-1.0));
    CHECK(metrics::cosine_similarity(ex, zero) == doctest::Approx(0.0));
    CHECK_THROWS_AS(metrics::cosine_similarity(ex, std::vector<double>{1.0, 2.0, 3.0}),
                    metrics::MetricsError);
}

TEST_CASE("spearman rank correlation") {
    std::vector<double> up = {0.1, 0.2, 0.5, 0.9};
    std::vector<double> up2 = {1.0, 4.0, 9.0, 16.0};
    std::vector<double> down = {4.0, 3.0, 2.0, 1.0};
    CHECK(metrics::spearman_rho(up, up2) == doctest::Approx(1.0));
    CHECK(metrics::spearman_rho(up, down) == doctest::Approx(-1.0));

    std::vector<double> a = {1.0, 2.0, 3.0};
    std::vector<double> b = {3.0, 1.0, 2.0};
    CHECK(metrics::spearman_rho(a, b) == doctest::Approx(-0.5));

    // ties get average ranks
    std::vector<double> t1 = {1.0, 1.0, 2.0};
    std::vector<double> t2 = {1.0, 2.0, 3.0};
    CHECK(metrics::spearman_rho(t1, t2) == doctest::Approx(0.8660254037844386));

    CHECK_THROWS_AS(metrics::spearman_rho(std::vector<double>{1.0}, std::vector<double>{1.0}),
                    metrics::MetricsError);
    // constant input has no rank order
    CHECK_THROWS_AS(metrics::spearman_rho(std::vector<double>{1.0, 1.0},
                                          std::vector<double>{1.0, 2.0}),
                    metrics::MetricsError);
}
