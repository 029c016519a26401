#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "femkit/report.hpp"

using namespace femkit;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
    std::string path;
    TempDir() {
        path = (std::filesystem::temp_directory_path() /
                ("femkit-report-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++)))
                   .string();
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static inline int counter = 0;
};

} // namespace

TEST_CASE("line chart is well-formed svg with one polyline per series") {
    report::Series a{"alpha", {1, 2, 3}, {0.1, 0.5, 0.9}};
    report::Series b{"beta", {1, 2, 3}, {0.3, 0.2, 0.4}};
    const auto svg = report::line_chart_svg("title", "x", "y", {a, b});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 2);
    CHECK(svg.find("alpha") != std::string::npos);
    CHECK(svg.find("beta") != std::string::npos);
    CHECK(svg.find("title") != std::string::npos);
}

TEST_CASE("charts survive NaN points and empty input") {
    report::Series s{"gap", {1, 2, 3}, {0.1, std::nan(""), 0.9}};
    const auto svg = report::line_chart_svg("t", "x", "y", {s});
    CHECK(svg.find("nan") == std::string::npos);

    const auto empty = report::line_chart_svg("t", "x", "y", {});
    CHECK(empty.find("no data") != std::string::npos);

    const auto empty_scatter = report::scatter_svg("t", "x", "y", {});
    CHECK(empty_scatter.find("no data") != std::string::npos);
}

TEST_CASE("scatter renders labeled points") {
    std::vector<report::ScatterPoint> pts{{0.6, 0.9, "full"}, {0.8, 0.85, "article"}};
    const auto svg = report::scatter_svg("t", "sim", "f1", pts);
    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
         pos = svg.find("<circle", pos + 1))
        ++circles;
    CHECK(circles == 2);
    CHECK(svg.find("full") != std::string::npos);
    CHECK(svg.find("article") != std::string::npos);
}

TEST_CASE("svg output is deterministic") {
    report::Series s{"run", {1, 2}, {0.25, 0.75}};
    CHECK(report::line_chart_svg("t", "x", "y", {s}) ==
          report::line_chart_svg("t", "x", "y", {s}));
}

TEST_CASE("fixture artifact and consolidated report round-trip") {
    TempDir dir;
    report::write_fixture_artifacts(dir.path);
    CHECK(std::filesystem::exists(dir.path + "/fixtures.json"));

    metrics::ConfusionCounts counts{9, 1, 8, 2};
    metrics::MetricSet m = metrics::metrics(counts);
    report::write_metrics_artifact(m, counts, dir.path);

    report::write_consolidated_report(dir.path);
    const auto md = slurp(dir.path + "/report.md");
    CHECK(md.find("## Evaluation") != std::string::npos);
    CHECK(md.find("## Reference tables") != std::string::npos);
    CHECK(md.find("fem-elements-only") != std::string::npos);
    CHECK(md.find("0.9478") != std::string::npos);

    const auto html = slurp(dir.path + "/report.html");
    CHECK(html.find("<table>") != std::string::npos);
    CHECK(html.find("</html>") != std::string::npos);
}

TEST_CASE("consolidated report requires at least one artifact") {
    TempDir dir;
    CHECK_THROWS_AS(report::write_consolidated_report(dir.path), report::MissingArtifacts);
    CHECK_THROWS_AS(report::write_consolidated_report(dir.path + "/missing"),
                    report::MissingArtifacts);
}
