#pragma once

// Run artifacts and consolidated reporting: CSV/JSON tables, dependency-free
// SVG charts, and a Markdown + HTML digest assembled from whatever a run
// directory contains. Reports reference artifacts by relative path only, so
// a run directory can be moved or shared as a unit.

#include <optional>
#include <string>
#include <vector>

#include "femkit/errors.hpp"
#include "femkit/evalkit.hpp"

namespace femkit::report {

FEMKIT_DEFINE_ERROR(ReportError, "report_error");
FEMKIT_DEFINE_ERROR(MissingArtifacts, "missing_artifacts");

// ---------------------------------------------------------------------------
// Charts. Pure string builders, deterministic for identical input.

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y; // NaN points are skipped
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           int width = 720, int height = 420);

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

std::string scatter_svg(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<ScatterPoint>& points,
                        int width = 720, int height = 420);

// ---------------------------------------------------------------------------
// Artifact writers. Each writes deterministic CSV/JSON (plus a chart where
// one makes sense) into an existing run directory.

void write_ablation_artifacts(const evalkit::AblationReport& report, const std::string& dir);
void write_similarity_artifacts(const evalkit::SimilarityReport& report, const std::string& dir);
void write_case_artifacts(const evalkit::CaseComparison& comparison, const std::string& dir);
void write_metrics_artifact(const metrics::MetricSet& metrics, const metrics::ConfusionCounts& counts,
                            const std::string& dir);
// The bundled reference tables (benchmarks, dataset statistics, topic
// similarities, the worked case pair) as one JSON artifact.
void write_fixture_artifacts(const std::string& dir);

// ---------------------------------------------------------------------------
// Consolidated digest. Scans `run_dir` for artifacts this library writes
// (manifest.json, train_summary.json, metrics.json, ablation.json,
// similarity.json, case.json, augment_stats.json, fixtures.json and the
// charts) and renders report.md and report.html next to them. Throws
// MissingArtifacts when it finds nothing to report on.
void write_consolidated_report(const std::string& run_dir);

} // namespace femkit::report
