#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "femkit/report.hpp"
#include "femkit/util.hpp"

namespace femkit::report {

namespace {

using nlohmann::json;

std::string mask_string(const evalkit::SegmentMask& mask) {
    std::string out;
    for (bool b : mask) out += b ? '1' : '0';
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string metric_field(bool has, double v) { return has ? util::format_double(v) : ""; }

json metric_json(const metrics::MetricSet& m) {
    json out;
    out["accuracy"] = m.accuracy;
    out["precision"] = m.has_precision ? json(m.precision) : json(nullptr);
    out["recall"] = m.has_recall ? json(m.recall) : json(nullptr);
    out["f1"] = m.has_f1 ? json(m.f1) : json(nullptr);
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError("cannot write " + path);
    out << content;
}

std::optional<json> read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ReportError("malformed artifact " + path + ": " + e.what());
    }
}

json elements_json(const core::FrameElementSet& elements) {
    json out;
    const auto& names = core::FrameElementSet::names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& element = elements.at(i);
        out[std::string(names[i])] = element.present ? json(element.text) : json(nullptr);
    }
    return out;
}

} // namespace

void write_ablation_artifacts(const evalkit::AblationReport& report, const std::string& dir) {
    std::ostringstream csv;
    csv << "name,mask,status,best_epoch,accuracy,precision,recall,f1,error\n";
    json rows = json::array();
    std::vector<Series> series;
    for (const auto& row : report.rows) {
        csv << csv_field(row.name) << "," << mask_string(row.mask) << ","
            << (row.failed ? "failed" : "ok") << ",";
        if (row.failed) {
            csv << ",,,,," << csv_field(row.error) << "\n";
        } else {
            csv << row.best_epoch << "," << metric_field(true, row.val.accuracy) << ","
                << metric_field(row.val.has_precision, row.val.precision) << ","
                << metric_field(row.val.has_recall, row.val.recall) << ","
                << metric_field(row.val.has_f1, row.val.f1) << ",\n";
        }

        json j;
        j["name"] = row.name;
        j["mask"] = mask_string(row.mask);
        j["failed"] = row.failed;
        if (row.failed) {
            j["error"] = row.error;
        } else {
            j["best_epoch"] = row.best_epoch;
            j["metrics"] = metric_json(row.val);
            json trace = json::array();
            for (double f1 : row.f1_trace)
                trace.push_back(std::isfinite(f1) ? json(f1) : json(nullptr));
            j["f1_trace"] = trace;

            Series s;
            s.label = row.name;
            for (std::size_t e = 0; e < row.f1_trace.size(); ++e) {
                s.x.push_back(static_cast<double>(e + 1));
                s.y.push_back(row.f1_trace[e]);
            }
            series.push_back(std::move(s));
        }
        rows.push_back(std::move(j));
    }

    write_file(dir + "/ablation.csv", csv.str());
    write_file(dir + "/ablation.json", json{{"rows", rows}}.dump(2) + "\n");
    write_file(dir + "/f1_by_epoch.svg",
               line_chart_svg("Validation F1 by epoch", "epoch", "F1", series));
}

void write_similarity_artifacts(const evalkit::SimilarityReport& report, const std::string& dir) {
    std::ostringstream csv;
    csv << "condition,mask,pairs,hidden_similarity,embedding_similarity,f1\n";
    json rows = json::array();
    std::vector<ScatterPoint> points;
    for (const auto& row : report.rows) {
        csv << csv_field(row.name) << "," << mask_string(row.mask) << "," << row.pair_count << ","
            << util::format_double(row.hidden_similarity) << ","
            << (row.embedding_similarity ? util::format_double(*row.embedding_similarity) : "")
            << "," << (row.f1 ? util::format_double(*row.f1) : "") << "\n";

        json j;
        j["condition"] = row.name;
        j["mask"] = mask_string(row.mask);
        j["pairs"] = row.pair_count;
        j["hidden_similarity"] = row.hidden_similarity;
        j["embedding_similarity"] =
            row.embedding_similarity ? json(*row.embedding_similarity) : json(nullptr);
        j["f1"] = row.f1 ? json(*row.f1) : json(nullptr);
        rows.push_back(std::move(j));

        if (row.f1) points.push_back(ScatterPoint{row.hidden_similarity, *row.f1, row.name});
    }

    const auto rho = report.similarity_f1_spearman();
    json doc;
    doc["rows"] = rows;
    doc["similarity_f1_spearman"] = rho ? json(*rho) : json(nullptr);

    write_file(dir + "/similarity.csv", csv.str());
    write_file(dir + "/similarity.json", doc.dump(2) + "\n");
    write_file(dir + "/similarity_vs_f1.svg",
               scatter_svg("Pair similarity vs detection F1", "mean pair similarity", "F1",
                           points));
}

void write_case_artifacts(const evalkit::CaseComparison& comparison, const std::string& dir) {
    json doc;
    doc["body_similarity"] = comparison.body_similarity;
    doc["element_similarity"] = comparison.element_similarity;
    doc["a"] = json{{"id", comparison.id_a},
                    {"prediction_text_only", comparison.prediction_a_text},
                    {"prediction_with_elements", comparison.prediction_a_full},
                    {"elements", elements_json(comparison.elements_a)}};
    doc["b"] = json{{"id", comparison.id_b},
                    {"prediction_text_only", comparison.prediction_b_text},
                    {"prediction_with_elements", comparison.prediction_b_full},
                    {"elements", elements_json(comparison.elements_b)}};
    write_file(dir + "/case.json", doc.dump(2) + "\n");
}

void write_metrics_artifact(const metrics::MetricSet& m, const metrics::ConfusionCounts& counts,
                            const std::string& dir) {
    json doc = metric_json(m);
    doc["counts"] =
        json{{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
    write_file(dir + "/metrics.json", doc.dump(2) + "\n");
}

void write_fixture_artifacts(const std::string& dir) {
    json benchmarks = json::array();
    for (const auto& table : evalkit::benchmark_tables()) {
        json rows = json::array();
        for (const auto& row : table.rows)
            rows.push_back(json{{"model", row.model},
                                {"accuracy", row.accuracy},
                                {"precision", row.precision},
                                {"recall", row.recall},
                                {"f1", row.f1}});
        benchmarks.push_back(json{{"topic", table.topic}, {"rows", rows}});
    }

    json stats = json::array();
    for (const auto& stat : evalkit::dataset_stats())
        stats.push_back(json{{"topic", stat.topic},
                             {"articles", stat.articles},
                             {"average_tokens", stat.average_tokens}});

    json topic_similarity = json::array();
    for (const auto& row : evalkit::topic_similarity_rows())
        topic_similarity.push_back(json{{"condition", row.condition},
                                        {"by_topic", row.by_topic}});

    const auto& pair = evalkit::case_pair_fixture();
    json case_pair;
    case_pair["body_similarity"] = pair.body_similarity;
    case_pair["element_similarity"] = pair.element_similarity;
    case_pair["informative"] = json{{"id", pair.informative.id},
                                    {"frame", pair.informative.frame},
                                    {"body", pair.informative.body},
                                    {"problem_definition", pair.informative.problem_definition}};
    case_pair["satirical"] = json{{"id", pair.satirical.id},
                                  {"frame", pair.satirical.frame},
                                  {"body", pair.satirical.body},
                                  {"problem_definition", pair.satirical.problem_definition}};

    json doc;
    doc["benchmarks"] = benchmarks;
    doc["dataset_stats"] = stats;
    doc["topic_similarity"] = topic_similarity;
    doc["case_pair"] = case_pair;
    write_file(dir + "/fixtures.json", doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Consolidated digest.

namespace {

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

struct Item {
    enum class Kind { paragraph, table, image } kind;
    std::string text; // paragraph text or image path
    Table table;
};

struct Section {
    std::string title;
    std::vector<Item> items;

    void paragraph(std::string text) {
        items.push_back(Item{Item::Kind::paragraph, std::move(text), {}});
    }
    void add_table(Table t) { items.push_back(Item{Item::Kind::table, "", std::move(t)}); }
    void image(std::string path) {
        items.push_back(Item{Item::Kind::image, std::move(path), {}});
    }
};

std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string cell(const json& v) {
    if (v.is_null()) return "n/a";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return util::format_double(v.get<double>());
    return v.dump();
}

std::string render_markdown(const std::vector<Section>& sections) {
    std::ostringstream out;
    out << "# Run report\n";
    for (const auto& section : sections) {
        out << "\n## " << section.title << "\n";
        for (const auto& item : section.items) {
            switch (item.kind) {
                case Item::Kind::paragraph:
                    out << "\n" << item.text << "\n";
                    break;
                case Item::Kind::image:
                    out << "\n![" << item.text << "](" << item.text << ")\n";
                    break;
                case Item::Kind::table: {
                    out << "\n|";
                    for (const auto& h : item.table.headers) out << " " << h << " |";
                    out << "\n|";
                    for (std::size_t i = 0; i < item.table.headers.size(); ++i) out << " --- |";
                    out << "\n";
                    for (const auto& row : item.table.rows) {
                        out << "|";
                        for (const auto& value : row) out << " " << value << " |";
                        out << "\n";
                    }
                    break;
                }
            }
        }
    }
    return out.str();
}

std::string render_html(const std::vector<Section>& sections) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        << "<title>Run report</title>\n<style>\n"
        << "body { font-family: sans-serif; max-width: 960px; margin: 2em auto; padding: 0 1em; "
           "color: #222; }\n"
        << "table { border-collapse: collapse; margin: 1em 0; }\n"
        << "th, td { border: 1px solid #bbb; padding: 4px 10px; text-align: left; }\n"
        << "th { background: #f0f0f0; }\n"
        << "img { max-width: 100%; }\n"
        << "blockquote { color: #444; border-left: 3px solid #ccc; margin-left: 0; "
           "padding-left: 1em; }\n"
        << "</style>\n</head>\n<body>\n<h1>Run report</h1>\n";
    for (const auto& section : sections) {
        out << "<h2>" << html_escape(section.title) << "</h2>\n";
        for (const auto& item : section.items) {
            switch (item.kind) {
                case Item::Kind::paragraph:
                    out << "<p>" << html_escape(item.text) << "</p>\n";
                    break;
                case Item::Kind::image:
                    out << "<img src=\"" << html_escape(item.text) << "\" alt=\""
                        << html_escape(item.text) << "\">\n";
                    break;
                case Item::Kind::table: {
                    out << "<table>\n<tr>";
                    for (const auto& h : item.table.headers)
                        out << "<th>" << html_escape(h) << "</th>";
                    out << "</tr>\n";
                    for (const auto& row : item.table.rows) {
                        out << "<tr>";
                        for (const auto& value : row) out << "<td>" << html_escape(value) << "</td>";
                        out << "</tr>\n";
                    }
                    out << "</table>\n";
                    break;
                }
            }
        }
    }
    out << "</body>\n</html>\n";
    return out.str();
}

Table metrics_table(const json& m) {
    Table t;
    t.headers = {"accuracy", "precision", "recall", "f1"};
    t.rows.push_back({cell(m.value("accuracy", json())), cell(m.value("precision", json())),
                      cell(m.value("recall", json())), cell(m.value("f1", json()))});
    return t;
}

} // namespace

void write_consolidated_report(const std::string& run_dir) {
    if (!std::filesystem::is_directory(run_dir))
        throw MissingArtifacts("run directory " + run_dir + " does not exist");

    std::vector<Section> sections;
    const auto exists = [&](const std::string& name) {
        return std::filesystem::exists(run_dir + "/" + name);
    };

    if (auto manifest = read_json(run_dir + "/manifest.json")) {
        Section s{"Run", {}};
        std::string line = "Command: " + manifest->value("command", std::string("?"));
        if (manifest->contains("seed")) line += ", seed " + cell((*manifest)["seed"]);
        if (manifest->contains("created_at"))
            line += ", started " + manifest->value("created_at", std::string());
        s.paragraph(line);
        if (manifest->contains("inputs") && (*manifest)["inputs"].is_object() &&
            !(*manifest)["inputs"].empty()) {
            Table t;
            t.headers = {"input", "sha256"};
            for (const auto& [path, hash] : (*manifest)["inputs"].items())
                t.rows.push_back({path, cell(hash)});
            s.add_table(std::move(t));
        }
        sections.push_back(std::move(s));
    }

    if (auto stats = read_json(run_dir + "/augment_stats.json")) {
        Section s{"Augmentation", {}};
        std::ostringstream line;
        line << "Articles in: " << cell(stats->value("articles", json()))
             << ", samples out: " << cell(stats->value("samples", json()))
             << " (information " << cell(stats->value("label1", json())) << ", misinformation "
             << cell(stats->value("label0", json())) << "), success rate "
             << cell(stats->value("success_rate", json())) << ", quarantined "
             << cell(stats->value("quarantined", json())) << ".";
        s.paragraph(line.str());
        if (exists("corpus.jsonl")) s.paragraph("Corpus: corpus.jsonl");
        if (exists("quarantine.jsonl")) s.paragraph("Quarantine manifest: quarantine.jsonl");
        if (exists("review_sample.md")) s.paragraph("Review sample: review_sample.md");
        sections.push_back(std::move(s));
    }

    if (auto train = read_json(run_dir + "/train_summary.json")) {
        Section s{"Training", {}};
        std::ostringstream line;
        line << "Status: " << train->value("status", std::string("?")) << ", best epoch "
             << cell(train->value("best_epoch", json())) << " of "
             << cell(train->value("epochs", json())) << ", optimizer steps "
             << cell(train->value("total_steps", json())) << ".";
        s.paragraph(line.str());
        if (train->contains("best_val")) s.add_table(metrics_table((*train)["best_val"]));
        if (exists("checkpoint")) s.paragraph("Checkpoint: checkpoint/");
        sections.push_back(std::move(s));
    }

    if (auto metrics_doc = read_json(run_dir + "/metrics.json")) {
        Section s{"Evaluation", {}};
        s.add_table(metrics_table(*metrics_doc));
        if (metrics_doc->contains("counts")) {
            const auto& c = (*metrics_doc)["counts"];
            Table t;
            t.headers = {"tp", "fp", "tn", "fn"};
            t.rows.push_back({cell(c.value("tp", json())), cell(c.value("fp", json())),
                              cell(c.value("tn", json())), cell(c.value("fn", json()))});
            s.add_table(std::move(t));
            s.paragraph("Positive class: misinformation (label 0).");
        }
        sections.push_back(std::move(s));
    }

    if (auto ablation = read_json(run_dir + "/ablation.json")) {
        Section s{"Ablation", {}};
        Table t;
        t.headers = {"configuration", "mask", "best epoch", "accuracy", "precision",
                     "recall", "f1", "status"};
        for (const auto& row : ablation->value("rows", json::array())) {
            if (row.value("failed", false)) {
                t.rows.push_back({row.value("name", std::string()), row.value("mask", std::string()),
                                  "", "", "", "", "",
                                  "failed: " + row.value("error", std::string())});
            } else {
                const auto m = row.value("metrics", json::object());
                t.rows.push_back({row.value("name", std::string()), row.value("mask", std::string()),
                                  cell(row.value("best_epoch", json())),
                                  cell(m.value("accuracy", json())),
                                  cell(m.value("precision", json())),
                                  cell(m.value("recall", json())), cell(m.value("f1", json())),
                                  "ok"});
            }
        }
        s.add_table(std::move(t));
        if (exists("f1_by_epoch.svg")) s.image("f1_by_epoch.svg");
        sections.push_back(std::move(s));
    }

    if (auto similarity = read_json(run_dir + "/similarity.json")) {
        Section s{"Similarity", {}};
        Table t;
        t.headers = {"condition", "mask", "pairs", "hidden similarity", "embedding similarity",
                     "f1"};
        for (const auto& row : similarity->value("rows", json::array()))
            t.rows.push_back({row.value("condition", std::string()),
                              row.value("mask", std::string()), cell(row.value("pairs", json())),
                              cell(row.value("hidden_similarity", json())),
                              cell(row.value("embedding_similarity", json())),
                              cell(row.value("f1", json()))});
        s.add_table(std::move(t));
        if (similarity->contains("similarity_f1_spearman") &&
            !(*similarity)["similarity_f1_spearman"].is_null())
            s.paragraph("Spearman rank correlation between pair similarity and F1: " +
                        cell((*similarity)["similarity_f1_spearman"]) + ".");
        if (exists("similarity_vs_f1.svg")) s.image("similarity_vs_f1.svg");
        sections.push_back(std::move(s));
    }

    if (auto case_doc = read_json(run_dir + "/case.json")) {
        Section s{"Case comparison", {}};
        s.paragraph("Body similarity " + cell(case_doc->value("body_similarity", json())) +
                    ", element similarity " +
                    cell(case_doc->value("element_similarity", json())) + ".");
        Table t;
        t.headers = {"article", "prediction (text only)", "prediction (with elements)",
                     "problem definition"};
        for (const char* key : {"a", "b"}) {
            if (!case_doc->contains(key)) continue;
            const auto& side = (*case_doc)[key];
            const auto elements = side.value("elements", json::object());
            const auto problem = elements.value("problem_definition", json());
            const auto label = [](const json& v) {
                if (v.is_number_integer())
                    return std::string(v.get<int>() == 0 ? "misinformation" : "information");
                return std::string("n/a");
            };
            t.rows.push_back({side.value("id", std::string()),
                              label(side.value("prediction_text_only", json())),
                              label(side.value("prediction_with_elements", json())),
                              cell(problem)});
        }
        s.add_table(std::move(t));
        sections.push_back(std::move(s));
    }

    if (auto fixtures = read_json(run_dir + "/fixtures.json")) {
        Section s{"Reference tables", {}};
        if (fixtures->contains("dataset_stats")) {
            Table t;
            t.headers = {"topic", "articles", "average tokens"};
            for (const auto& stat : (*fixtures)["dataset_stats"])
                t.rows.push_back({stat.value("topic", std::string()),
                                  cell(stat.value("articles", json())),
                                  cell(stat.value("average_tokens", json()))});
            s.add_table(std::move(t));
        }
        if (fixtures->contains("benchmarks")) {
            for (const auto& bench : (*fixtures)["benchmarks"]) {
                s.paragraph("Topic: " + bench.value("topic", std::string()));
                Table t;
                t.headers = {"model", "accuracy", "precision", "recall", "f1"};
                for (const auto& row : bench.value("rows", json::array()))
                    t.rows.push_back({row.value("model", std::string()),
                                      cell(row.value("accuracy", json())),
                                      cell(row.value("precision", json())),
                                      cell(row.value("recall", json())),
                                      cell(row.value("f1", json()))});
                s.add_table(std::move(t));
            }
        }
        if (fixtures->contains("topic_similarity")) {
            Table t;
            t.headers = {"condition", "three-waters", "covid", "nuclear", "mixed"};
            for (const auto& row : (*fixtures)["topic_similarity"]) {
                const auto by_topic = row.value("by_topic", json::array());
                std::vector<std::string> cells = {row.value("condition", std::string())};
                for (const auto& v : by_topic) cells.push_back(cell(v));
                t.rows.push_back(std::move(cells));
            }
            s.add_table(std::move(t));
        }
        if (fixtures->contains("case_pair")) {
            const auto& pair = (*fixtures)["case_pair"];
            s.paragraph("Worked example: body similarity " +
                        cell(pair.value("body_similarity", json())) +
                        " falls to " + cell(pair.value("element_similarity", json())) +
                        " once the framing elements are considered.");
            for (const char* key : {"informative", "satirical"}) {
                if (!pair.contains(key)) continue;
                const auto& side = pair[key];
                s.paragraph(side.value("id", std::string()) + " (" +
                            side.value("frame", std::string()) + " frame), problem definition: " +
                            side.value("problem_definition", std::string()));
            }
        }
        sections.push_back(std::move(s));
    }

    if (sections.empty())
        throw MissingArtifacts("no artifacts found in " + run_dir +
                               "; run a command with --output first");

    write_file(run_dir + "/report.md", render_markdown(sections));
    write_file(run_dir + "/report.html", render_html(sections));
}

} // namespace femkit::report
