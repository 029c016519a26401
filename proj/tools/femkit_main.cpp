// femkit: batch CLI over the corpus pipeline, the classifier, and the
// evaluation harness. Subcommands share a JSON config file; flags override
// it. Exit codes: 0 success, 1 usage/config error, 2 pipeline degradation
// (augmentation under the success floor, diverged training), 3 internal
// error. Errors go to stderr as one JSON object per failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "femkit/augment.hpp"
#include "femkit/core.hpp"
#include "femkit/encoder.hpp"
#include "femkit/evalkit.hpp"
#include "femkit/fem.hpp"
#include "femkit/metrics.hpp"
#include "femkit/report.hpp"
#include "femkit/util.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace femkit;

FEMKIT_DEFINE_ERROR(ConfigError, "config_error");

constexpr const char* kVersion = "0.1.0";
constexpr int kConfigSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Config file + flag overrides.

struct Flags {
    std::string config;
    std::string output;
    std::string client;
    std::string input;
    std::string checkpoint;
    std::string plan = "default";
    std::string fixtures;
    std::string id_a;
    std::string id_b;
    std::optional<std::uint64_t> seed;
    std::optional<double> review_fraction;
};

struct Settings {
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string output;
    std::string client = "mock";
    std::string encoder_key = "hashing:256";
    encoder::TruncationPolicy truncation;
    core::SplitSpec split;
    fem::FemConfig model;
    augment::PipelineConfig pipeline;
    double review_fraction = 0.1;

    json snapshot() const {
        json mask = json::array();
        for (bool b : model.segment_mask) mask.push_back(b);
        return json{
            {"schema_version", kConfigSchemaVersion},
            {"seed", seed},
            {"output", output},
            {"client", client},
            {"encoder", encoder_key},
            {"truncation",
             {{"strategy", std::string(encoder::to_string(truncation.strategy))},
              {"max_tokens", truncation.max_tokens}}},
            {"split",
             {{"train_fraction", split.train_fraction},
              {"val_fraction", split.val_fraction},
              {"test_fraction", split.test_fraction},
              {"stratify_by_label", split.stratify_by_label}}},
            {"model",
             {{"hidden_dim", model.hidden_dim},
              {"dropout", model.dropout},
              {"peak_lr", model.peak_lr},
              {"epochs", model.epochs},
              {"batch_size", model.batch_size},
              {"weight_decay", model.weight_decay},
              {"warmup_steps", model.warmup_steps},
              {"segment_mask", mask}}},
            {"pipeline",
             {{"frame_vocabulary", pipeline.frame_vocabulary},
              {"cache_dir", pipeline.cache_dir},
              {"prompts_dir", pipeline.prompts_dir},
              {"success_floor", pipeline.success_floor},
              {"min_length_fraction", pipeline.min_length_fraction},
              {"max_in_flight", pipeline.max_in_flight},
              {"requests_per_sec", pipeline.requests_per_sec},
              {"extract_temperature", pipeline.extract_temperature},
              {"alter_temperature", pipeline.alter_temperature},
              {"retry",
               {{"client_error_attempts", pipeline.retry.client_error_attempts},
                {"parse_reprompts", pipeline.retry.parse_reprompts},
                {"backoff_initial_ms", pipeline.retry.backoff_initial_ms}}}}},
            {"review_fraction", review_fraction},
        };
    }
};

void apply_config_file(Settings& s, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");

    try {
        if (j.contains("schema_version") &&
            j["schema_version"].get<int>() != kConfigSchemaVersion)
            throw ConfigError("config schema_version " + j["schema_version"].dump() +
                              " is not supported (expected " +
                              std::to_string(kConfigSchemaVersion) + ")");
        if (j.contains("seed")) {
            s.seed = j["seed"].get<std::uint64_t>();
            s.has_seed = true;
        }
        s.output = j.value("output", s.output);
        s.client = j.value("client", s.client);
        s.encoder_key = j.value("encoder", s.encoder_key);
        s.review_fraction = j.value("review_fraction", s.review_fraction);

        if (j.contains("truncation")) {
            const auto& t = j["truncation"];
            if (t.contains("strategy"))
                s.truncation.strategy =
                    encoder::truncation_strategy_from_string(t["strategy"].get<std::string>());
            s.truncation.max_tokens = t.value("max_tokens", s.truncation.max_tokens);
        }
        if (j.contains("split")) {
            const auto& p = j["split"];
            s.split.train_fraction = p.value("train_fraction", s.split.train_fraction);
            s.split.val_fraction = p.value("val_fraction", s.split.val_fraction);
            s.split.test_fraction = p.value("test_fraction", s.split.test_fraction);
            s.split.stratify_by_label = p.value("stratify_by_label", s.split.stratify_by_label);
        }
        if (j.contains("model")) {
            const auto& m = j["model"];
            s.model.hidden_dim = m.value("hidden_dim", s.model.hidden_dim);
            s.model.dropout = m.value("dropout", s.model.dropout);
            s.model.peak_lr = m.value("peak_lr", s.model.peak_lr);
            s.model.epochs = m.value("epochs", s.model.epochs);
            s.model.batch_size = m.value("batch_size", s.model.batch_size);
            s.model.weight_decay = m.value("weight_decay", s.model.weight_decay);
            s.model.warmup_steps = m.value("warmup_steps", s.model.warmup_steps);
            if (m.contains("segment_mask")) {
                const auto& mask = m["segment_mask"];
                if (!mask.is_array() || mask.size() != s.model.segment_mask.size())
                    throw ConfigError("model.segment_mask must be an array of 5 booleans");
                for (std::size_t i = 0; i < s.model.segment_mask.size(); ++i)
                    s.model.segment_mask[i] = mask[i].get<bool>();
            }
        }
        if (j.contains("pipeline")) {
            const auto& p = j["pipeline"];
            auto& c = s.pipeline;
            if (p.contains("frame_vocabulary"))
                c.frame_vocabulary = p["frame_vocabulary"].get<std::vector<std::string>>();
            c.cache_dir = p.value("cache_dir", c.cache_dir);
            c.prompts_dir = p.value("prompts_dir", c.prompts_dir);
            c.success_floor = p.value("success_floor", c.success_floor);
            c.min_length_fraction = p.value("min_length_fraction", c.min_length_fraction);
            c.max_in_flight = p.value("max_in_flight", c.max_in_flight);
            c.requests_per_sec = p.value("requests_per_sec", c.requests_per_sec);
            c.extract_temperature = p.value("extract_temperature", c.extract_temperature);
            c.alter_temperature = p.value("alter_temperature", c.alter_temperature);
            if (p.contains("retry")) {
                const auto& r = p["retry"];
                c.retry.client_error_attempts =
                    r.value("client_error_attempts", c.retry.client_error_attempts);
                c.retry.parse_reprompts = r.value("parse_reprompts", c.retry.parse_reprompts);
                c.retry.backoff_initial_ms =
                    r.value("backoff_initial_ms", c.retry.backoff_initial_ms);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

Settings resolve_settings(const Flags& f) {
    Settings s;
    if (!f.config.empty()) apply_config_file(s, f.config);
    if (f.seed) {
        s.seed = *f.seed;
        s.has_seed = true;
    }
    if (!f.output.empty()) s.output = f.output;
    if (!f.client.empty()) s.client = f.client;
    if (f.review_fraction) s.review_fraction = *f.review_fraction;

    if (!s.has_seed)
        throw ConfigError("seed is required: pass --seed or set \"seed\" in the config file");
    if (s.output.empty())
        throw ConfigError("output directory is required: pass --output or set \"output\" in "
                          "the config file");
    if (s.client != "mock" && s.client != "http")
        throw ConfigError("unknown client \"" + s.client + "\" (expected mock or http)");
    if (s.review_fraction < 0.0 || s.review_fraction > 1.0)
        throw ConfigError("review_fraction must be in [0, 1]");

    // One seed drives every stage of a run.
    s.split.seed = s.seed;
    s.model.seed = s.seed;
    s.pipeline.seed = s.seed;
    return s;
}

// ---------------------------------------------------------------------------
// Run bookkeeping: input hashes, output list, manifest.

struct Run {
    Settings s;
    std::string command;
    json inputs = json::object();
    std::vector<std::string> outputs;

    std::string out_path(const std::string& name) const { return s.output + "/" + name; }

    void note_input(const std::string& path) {
        if (!fs::exists(path))
            throw ConfigError("input path " + path + " does not exist");
        if (fs::is_directory(path)) {
            for (const auto& entry : fs::recursive_directory_iterator(path))
                if (entry.is_regular_file())
                    inputs[entry.path().string()] = util::sha256_file(entry.path().string());
        } else {
            inputs[path] = util::sha256_file(path);
        }
    }

    void note_output(const std::string& name) { outputs.push_back(name); }

    void make_output_dir() const { fs::create_directories(s.output); }

    void write_manifest() {
        json m{{"version", kVersion},          {"command", command},
               {"seed", s.seed},               {"created_at", util::utc_timestamp()},
               {"config", s.snapshot()},       {"inputs", inputs},
               {"outputs", outputs}};
        std::ofstream out(out_path("manifest.json"), std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + out_path("manifest.json"));
        out << m.dump(2) << "\n";
    }
};

// ---------------------------------------------------------------------------
// Shared helpers.

std::optional<std::string> json_optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

std::vector<core::Article> load_articles(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open articles file " + path);
    std::vector<core::Article> articles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
            core::Article a;
            a.id = j.at("id").get<std::string>();
            a.body = j.at("body").get<std::string>();
            a.title = json_optional_string(j, "title");
            a.source = json_optional_string(j, "source");
            a.topic = json_optional_string(j, "topic");
            a.frame_label = json_optional_string(j, "frame_label");
            if (a.id.empty())
                throw ConfigError(path + ":" + std::to_string(line_no) + ": empty article id");
            articles.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (articles.empty()) throw ConfigError("no articles in " + path);
    return articles;
}

std::unique_ptr<augment::LlmClient> make_client(const Settings& s) {
    if (s.client == "mock") return std::make_unique<augment::MockLlmClient>();
    return augment::make_http_client(); // refuses at construction without env credentials
}

fem::TrainData to_train_data(const evalkit::EncodedCorpus& corpus,
                             const std::array<bool, 5>& mask) {
    fem::TrainData data;
    data.x.reserve(corpus.size());
    data.y = corpus.labels;
    for (const auto& enc : corpus.encodings) data.x.push_back(fem::masked_sequence(enc, mask));
    return data;
}

json metric_json(const metrics::MetricSet& m) {
    return json{{"accuracy", m.accuracy},
                {"precision", m.has_precision ? json(m.precision) : json(nullptr)},
                {"recall", m.has_recall ? json(m.recall) : json(nullptr)},
                {"f1", m.has_f1 ? json(m.f1) : json(nullptr)}};
}

void write_json_artifact(Run& run, const std::string& name, const json& doc) {
    std::ofstream out(run.out_path(name), std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + run.out_path(name));
    out << doc.dump(2) << "\n";
    run.note_output(name);
}

std::string format_metric(bool has, double v) {
    return has ? util::format_double(v) : "n/a";
}

std::string resolve_checkpoint(const Run& run, const std::string& flag) {
    std::string dir = flag.empty() ? run.out_path("checkpoint") : flag;
    if (!fs::exists(dir + "/config.json"))
        throw ConfigError("no checkpoint at " + dir + " (expected config.json inside); train "
                          "first or pass --checkpoint");
    return dir;
}

// The checkpoint remembers which encoder produced its inputs; prefer that
// over the configured one so evaluation matches training.
std::shared_ptr<encoder::SegmentEncoder> encoder_for(const Settings& s,
                                                     const fem::FemConfig& model_config) {
    const std::string& key =
        model_config.encoder_name.empty() ? s.encoder_key : model_config.encoder_name;
    auto enc = encoder::make_encoder(key);
    if (enc->dim() != model_config.input_dim)
        throw ConfigError("encoder " + key + " produces dimension " +
                          std::to_string(enc->dim()) + " but the checkpoint expects " +
                          std::to_string(model_config.input_dim));
    return enc;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_augment(Run& run, const Flags& f) {
    run.note_input(f.input);
    const auto articles = load_articles(f.input);
    auto client = make_client(run.s); // must refuse before any output exists

    const auto corpus_out = run.out_path("corpus.jsonl");
    if (fs::exists(f.input) && fs::exists(run.s.output) &&
        fs::weakly_canonical(f.input) == fs::weakly_canonical(corpus_out))
        throw ConfigError("refusing to overwrite the input corpus: " + f.input);

    augment::Augmenter augmenter(*client, run.s.pipeline);
    const auto result = augmenter.run(articles);

    run.make_output_dir();
    core::save_corpus(result.corpus, corpus_out);
    run.note_output("corpus.jsonl");
    augment::write_quarantine_manifest(result.quarantined, run.out_path("quarantine.jsonl"));
    run.note_output("quarantine.jsonl");
    const auto reviewed = augment::export_review_sample(result.corpus, run.s.review_fraction,
                                                        run.s.seed,
                                                        run.out_path("review_sample.md"));
    run.note_output("review_sample.md");

    const auto stats = core::corpus_stats(result.corpus, util::whitespace_token_count);
    write_json_artifact(run, "augment_stats.json",
                        json{{"articles", result.article_count},
                             {"samples", result.corpus.size()},
                             {"label0", stats.label0_count},
                             {"label1", stats.label1_count},
                             {"quarantined", result.quarantined.size()},
                             {"review_sampled", reviewed},
                             {"success_rate", result.success_rate()}});
    run.write_manifest();

    const double rate = result.success_rate();
    std::cout << "augment: " << result.article_count << " articles -> " << result.corpus.size()
              << " samples, " << result.quarantined.size() << " quarantined, success rate "
              << util::format_double(rate) << "\n";
    if (rate < run.s.pipeline.success_floor) {
        std::cerr << json{{"error",
                           {{"code", "pipeline_error"},
                            {"message", "success rate " + util::format_double(rate) +
                                            " is below the floor " +
                                            util::format_double(run.s.pipeline.success_floor)}}}}
                         .dump()
                  << "\n";
        return 2;
    }
    return 0;
}

int cmd_train(Run& run, const Flags& f) {
    run.note_input(f.input);
    const auto corpus = core::load_corpus(f.input);
    auto enc = encoder::make_encoder(run.s.encoder_key);

    const auto splits = core::split_corpus(corpus, run.s.split);
    const auto enc_train = evalkit::encode_corpus(*enc, splits.train, run.s.truncation);
    const auto enc_val = evalkit::encode_corpus(*enc, splits.val, run.s.truncation);

    fem::FemConfig config = run.s.model;
    config.input_dim = enc->dim();
    config.encoder_name = run.s.encoder_key;
    fem::FemModel model(config);

    const auto train_data = to_train_data(enc_train, config.segment_mask);
    const auto val_data = to_train_data(enc_val, config.segment_mask);
    const auto result = fem::train(model, train_data, val_data);

    run.make_output_dir();
    fem::save_checkpoint(run.out_path("checkpoint"), model, result);
    run.note_output("checkpoint");

    const auto train_metrics = fem::evaluate_set(model, train_data);
    write_json_artifact(
        run, "train_summary.json",
        json{{"status", result.status == fem::TrainStatus::completed ? "completed" : "diverged"},
             {"epochs", result.history.size()},
             {"best_epoch", result.best_epoch},
             {"total_steps", result.total_steps},
             {"warmup_steps", result.warmup_steps},
             {"best_val", metric_json(result.best_val)},
             {"train", metric_json(train_metrics)},
             {"sizes",
              {{"train", splits.train.size()},
               {"val", splits.val.size()},
               {"test", splits.test.size()}}}});
    run.write_manifest();

    std::cout << "train: " << (result.status == fem::TrainStatus::completed ? "completed"
                                                                            : "diverged")
              << ", best epoch " << result.best_epoch << "/" << result.history.size()
              << ", val F1 " << format_metric(result.best_val.has_f1, result.best_val.f1)
              << ", train F1 " << format_metric(train_metrics.has_f1, train_metrics.f1) << "\n";
    return result.status == fem::TrainStatus::completed ? 0 : 2;
}

int cmd_evaluate(Run& run, const Flags& f) {
    const auto checkpoint = resolve_checkpoint(run, f.checkpoint);
    run.note_input(f.input);
    run.note_input(checkpoint + "/weights.bin");
    auto loaded = fem::load_checkpoint(checkpoint);
    auto enc = encoder_for(run.s, loaded.model.config());

    const auto corpus = core::load_corpus(f.input);
    const auto encoded = evalkit::encode_corpus(*enc, corpus, run.s.truncation);
    const auto predictions =
        evalkit::predict_all(loaded.model, encoded, loaded.model.config().segment_mask);
    const auto counts = metrics::confusion(encoded.labels, predictions);
    const auto m = metrics::metrics(counts);

    run.make_output_dir();
    report::write_metrics_artifact(m, counts, run.s.output);
    run.note_output("metrics.json");
    run.write_manifest();

    std::cout << "evaluate: " << encoded.size() << " samples, accuracy "
              << util::format_double(m.accuracy) << ", precision "
              << format_metric(m.has_precision, m.precision) << ", recall "
              << format_metric(m.has_recall, m.recall) << ", F1 "
              << format_metric(m.has_f1, m.f1) << "\n";
    return 0;
}

evalkit::AblationPlan plan_by_name(const std::string& name) {
    if (name == "default") return evalkit::AblationPlan::default_plan();
    if (name == "similarity") return evalkit::AblationPlan::similarity_plan();
    throw ConfigError("unknown plan \"" + name + "\" (expected default or similarity)");
}

int cmd_ablate(Run& run, const Flags& f) {
    const auto plan = plan_by_name(f.plan);
    run.note_input(f.input);
    const auto corpus = core::load_corpus(f.input);
    auto enc = encoder::make_encoder(run.s.encoder_key);

    const auto splits = core::split_corpus(corpus, run.s.split);
    const auto enc_train = evalkit::encode_corpus(*enc, splits.train, run.s.truncation);
    const auto enc_val = evalkit::encode_corpus(*enc, splits.val, run.s.truncation);

    fem::FemConfig base = run.s.model;
    base.input_dim = enc->dim();
    base.encoder_name = run.s.encoder_key;

    const auto report = evalkit::run_ablation(enc_train, enc_val, base, plan);

    run.make_output_dir();
    report::write_ablation_artifacts(report, run.s.output);
    run.note_output("ablation.csv");
    run.note_output("ablation.json");
    run.note_output("f1_by_epoch.svg");
    run.write_manifest();

    std::size_t failed = 0;
    for (const auto& row : report.rows) failed += row.failed ? 1 : 0;
    std::cout << "ablate: " << report.rows.size() << " configurations, " << failed
              << " failed\n";
    for (const auto& row : report.rows)
        std::cout << "  " << row.name << ": "
                  << (row.failed ? "failed (" + row.error + ")"
                                 : "F1 " + format_metric(row.val.has_f1, row.val.f1))
                  << "\n";
    return 0;
}

int cmd_similarity(Run& run, const Flags& f) {
    if (!f.fixtures.empty()) {
        const auto report = evalkit::fixture_similarity_report(f.fixtures);
        run.make_output_dir();
        report::write_similarity_artifacts(report, run.s.output);
        run.note_output("similarity.csv");
        run.note_output("similarity.json");
        run.note_output("similarity_vs_f1.svg");
        run.write_manifest();
        const auto rho = report.similarity_f1_spearman();
        std::cout << "similarity: fixture " << f.fixtures << ", " << report.rows.size()
                  << " conditions, spearman "
                  << (rho ? util::format_double(*rho) : std::string("n/a")) << "\n";
        return 0;
    }

    if (f.input.empty())
        throw ConfigError("similarity needs --input CORPUS or --fixtures NAME");
    run.note_input(f.input);
    const auto corpus = core::load_corpus(f.input);
    auto enc = encoder::make_encoder(run.s.encoder_key);

    const auto splits = core::split_corpus(corpus, run.s.split);
    const auto enc_train = evalkit::encode_corpus(*enc, splits.train, run.s.truncation);
    const auto enc_val = evalkit::encode_corpus(*enc, splits.val, run.s.truncation);
    const auto enc_all = evalkit::encode_corpus(*enc, corpus, run.s.truncation);

    fem::FemConfig base = run.s.model;
    base.input_dim = enc->dim();
    base.encoder_name = run.s.encoder_key;

    // Hidden states come from one full-input model; per-condition F1 comes
    // from retraining under each mask.
    fem::FemModel model(base);
    const auto train_data = to_train_data(enc_train, base.segment_mask);
    const auto val_data = to_train_data(enc_val, base.segment_mask);
    const auto trained = fem::train(model, train_data, val_data);
    if (trained.status != fem::TrainStatus::completed)
        throw evalkit::EvalError("similarity reference model diverged during training");

    auto report = evalkit::similarity_report(model, enc_all);
    const auto ablation =
        evalkit::run_ablation(enc_train, enc_val, base, evalkit::AblationPlan::similarity_plan());
    evalkit::join_f1(report, ablation);

    run.make_output_dir();
    report::write_similarity_artifacts(report, run.s.output);
    run.note_output("similarity.csv");
    run.note_output("similarity.json");
    run.note_output("similarity_vs_f1.svg");
    run.write_manifest();

    const auto rho = report.similarity_f1_spearman();
    std::cout << "similarity: " << report.rows.size() << " conditions over "
              << (report.rows.empty() ? 0 : report.rows.front().pair_count)
              << " pairs, spearman "
              << (rho ? util::format_double(*rho) : std::string("n/a")) << "\n";
    return 0;
}

int cmd_compare(Run& run, const Flags& f) {
    if (!f.fixtures.empty()) {
        if (f.fixtures != "case")
            throw evalkit::FixtureError("unknown fixture \"" + f.fixtures +
                                        "\" (compare bundles: case)");
        run.make_output_dir();
        report::write_fixture_artifacts(run.s.output);
        run.note_output("fixtures.json");
        run.write_manifest();
        const auto& pair = evalkit::case_pair_fixture();
        std::cout << "compare: fixture case, body similarity "
                  << util::format_double(pair.body_similarity) << " vs element similarity "
                  << util::format_double(pair.element_similarity) << "\n";
        return 0;
    }

    if (f.input.empty()) throw ConfigError("compare needs --input ARTICLES or --fixtures case");
    const auto checkpoint = resolve_checkpoint(run, f.checkpoint);
    run.note_input(f.input);
    run.note_input(checkpoint + "/weights.bin");
    const auto articles = load_articles(f.input);

    const auto find = [&](const std::string& id, std::size_t fallback) -> const core::Article& {
        if (id.empty()) {
            if (articles.size() <= fallback)
                throw ConfigError("compare needs two articles; " + f.input + " has " +
                                  std::to_string(articles.size()));
            return articles[fallback];
        }
        for (const auto& a : articles)
            if (a.id == id) return a;
        throw ConfigError("article id \"" + id + "\" not found in " + f.input);
    };
    const auto& a = find(f.id_a, 0);
    const auto& b = find(f.id_b, 1);
    if (a.id == b.id) throw ConfigError("compare needs two distinct articles");

    auto loaded = fem::load_checkpoint(checkpoint);
    auto enc = encoder_for(run.s, loaded.model.config());
    auto client = make_client(run.s);
    augment::Augmenter augmenter(*client, run.s.pipeline);

    const auto comparison =
        evalkit::case_compare(loaded.model, *enc, augmenter, a, b, run.s.truncation);

    run.make_output_dir();
    report::write_case_artifacts(comparison, run.s.output);
    run.note_output("case.json");
    run.write_manifest();

    std::cout << "compare: " << comparison.id_a << " vs " << comparison.id_b
              << ", body similarity " << util::format_double(comparison.body_similarity)
              << ", element similarity " << util::format_double(comparison.element_similarity)
              << "\n";
    return 0;
}

int cmd_report(Run& run) {
    // Consolidates whatever earlier commands left in the output directory;
    // deliberately does not touch manifest.json, which belongs to them.
    report::write_consolidated_report(run.s.output);
    std::cout << "report: wrote " << run.out_path("report.md") << " and "
              << run.out_path("report.html") << "\n";
    return 0;
}

int fail(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"frame-element misinformation corpus builder, trainer, and evaluator"};
    app.require_subcommand(1);
    Flags f;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", f.config, "JSON config file");
        cmd->add_option("--seed", f.seed, "run seed (overrides the config file)");
        cmd->add_option("--output", f.output, "output directory for artifacts");
        cmd->add_option("--client", f.client, "generative client: mock or http");
    };

    auto* augment_cmd =
        app.add_subcommand("augment", "build a paired corpus from factual articles");
    add_common(augment_cmd);
    augment_cmd->add_option("--input", f.input, "articles JSONL file")->required();
    augment_cmd->add_option("--review-fraction", f.review_fraction,
                            "fraction of altered articles to export for manual review");

    auto* train_cmd = app.add_subcommand("train", "train the classifier on a labeled corpus");
    add_common(train_cmd);
    train_cmd->add_option("--input", f.input, "corpus JSONL file")->required();

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "score a checkpoint against a labeled corpus");
    add_common(evaluate_cmd);
    evaluate_cmd->add_option("--input", f.input, "corpus JSONL file")->required();
    evaluate_cmd->add_option("--checkpoint", f.checkpoint,
                             "checkpoint directory (default: OUTPUT/checkpoint)");

    auto* ablate_cmd =
        app.add_subcommand("ablate", "retrain under each segment mask and compare");
    add_common(ablate_cmd);
    ablate_cmd->add_option("--input", f.input, "corpus JSONL file")->required();
    ablate_cmd->add_option("--plan", f.plan, "mask plan: default or similarity");

    auto* similarity_cmd = app.add_subcommand(
        "similarity", "measure paired original/rewrite similarity per condition");
    add_common(similarity_cmd);
    similarity_cmd->add_option("--input", f.input, "paired corpus JSONL file");
    similarity_cmd->add_option("--fixtures", f.fixtures, "bundled fixture name (table6)");

    auto* compare_cmd =
        app.add_subcommand("compare", "side-by-side framing comparison of two articles");
    add_common(compare_cmd);
    compare_cmd->add_option("--input", f.input, "articles JSONL file");
    compare_cmd->add_option("--id-a", f.id_a, "first article id (default: first in file)");
    compare_cmd->add_option("--id-b", f.id_b, "second article id (default: second in file)");
    compare_cmd->add_option("--checkpoint", f.checkpoint,
                            "checkpoint directory (default: OUTPUT/checkpoint)");
    compare_cmd->add_option("--fixtures", f.fixtures, "bundled fixture name (case)");

    auto* report_cmd =
        app.add_subcommand("report", "consolidate a run directory into report.md/html");
    add_common(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 1);
    }

    try {
        Run run{resolve_settings(f), app.get_subcommands().front()->get_name(), {}, {}};
        if (augment_cmd->parsed()) return cmd_augment(run, f);
        if (train_cmd->parsed()) return cmd_train(run, f);
        if (evaluate_cmd->parsed()) return cmd_evaluate(run, f);
        if (ablate_cmd->parsed()) return cmd_ablate(run, f);
        if (similarity_cmd->parsed()) return cmd_similarity(run, f);
        if (compare_cmd->parsed()) return cmd_compare(run, f);
        if (report_cmd->parsed()) return cmd_report(run);
        return fail("usage", "no subcommand", 1);
    } catch (const augment::PipelineError& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const femkit::Error& e) {
        return fail(e.code(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
}
