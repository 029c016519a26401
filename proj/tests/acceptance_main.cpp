// Acceptance gate: one pass/fail line per release criterion. Each check is
// self-contained and prints the measured numbers it judged, so a failure in
// CI can be read without rerunning anything.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "femkit/augment.hpp"
#include "femkit/core.hpp"
#include "femkit/encoder.hpp"
#include "femkit/evalkit.hpp"
#include "femkit/fem.hpp"
#include "femkit/kernels.hpp"
#include "femkit/metrics.hpp"
#include "femkit/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace femkit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) { return util::format_double(v); }

// ---------------------------------------------------------------------------
// Criterion 1: classifier-weight gradients against central finite differences.

bool check_gradients(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    fem::FemConfig cfg;
    cfg.input_dim = 8;
    cfg.hidden_dim = 4;
    cfg.dropout = 0.0;
    cfg.weight_decay = 1e-2;
    fem::FemModel model(cfg);

    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<fem::Sequence> seqs;
    std::vector<int> labels;
    for (int i = 0; i < 4; ++i) {
        fem::Sequence seq(1 + static_cast<std::size_t>(i) % 4,
                          std::vector<double>(cfg.input_dim));
        for (auto& row : seq)
            for (auto& v : row) v = uni(rng);
        seqs.push_back(std::move(seq));
        labels.push_back(i % 2);
    }

    const auto analytic = model.grad_batch(seqs, labels, nullptr);
    double worst = 0.0;
    const auto check_tensor = [&](std::vector<double>& theta, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            const double h = 1e-6 * std::max(1.0, std::abs(saved));
            theta[i] = saved + h;
            const double up = model.batch_loss(seqs, labels);
            theta[i] = saved - h;
            const double down = model.batch_loss(seqs, labels);
            theta[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::abs(grad[i] - fd) / std::max(std::abs(grad[i]) + std::abs(fd), 1e-8);
            worst = std::max(worst, rel);
        }
    };
    check_tensor(model.params().w_cls, analytic.grads.w_cls);
    check_tensor(model.params().b_cls, analytic.grads.b_cls);

    const double elapsed = seconds_since(start);
    detail = "max relative error " + fmt(worst) + " over " +
             std::to_string(model.params().w_cls.size() + model.params().b_cls.size()) +
             " classifier parameters in " + fmt(elapsed) + "s";
    return worst < 1e-4 && elapsed < 10.0;
}

// ---------------------------------------------------------------------------
// Criteria 2 and 6 share one constructed corpus: the label is a thresholded
// linear function of the problem_definition embedding and nothing else.

struct SyntheticCorpus {
    core::Corpus corpus;
    std::vector<std::vector<double>> problem_embeddings; // aligned with samples
};

SyntheticCorpus build_synthetic_corpus() {
    static const char* kWords[] = {
        "river",  "supply", "rates",   "board",  "vote",   "assets", "pipes",  "debt",
        "audit",  "survey", "meeting", "budget", "plan",   "report", "claim",  "notice",
        "region", "tender", "works",   "charge", "letter", "filing", "runoff", "intake",
        "meter",  "valve",  "treaty",  "quota",  "ledger", "permit", "zoning", "basin",
        "outage", "tariff", "buyout",  "merger", "review", "draft",  "hearing", "recall",
    };
    encoder::HashingEncoder enc(32);
    std::mt19937_64 rng(515);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);

    // Label rule: sign of a fixed linear functional of the embedding. Of 60
    // candidate texts keep the 10 strongest responses on each side, so the
    // two classes sit a clear margin apart but the rule stays linear.
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w(enc.dim());
    for (auto& v : w) v = gauss(rng);

    struct Candidate {
        std::string text;
        std::vector<double> embedding;
        double response;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < 60; ++i) {
        std::string text;
        for (int word = 0; word < 6; ++word)
            text += std::string(word ? " " : "") + kWords[pick(rng)];
        auto embedding = encoder::encode_segment(enc, text, {}).values;
        const double response = kernels::dot(w, embedding);
        candidates.push_back({std::move(text), std::move(embedding), response});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.response < b.response; });
    std::vector<Candidate> chosen(candidates.begin(), candidates.begin() + 10);
    chosen.insert(chosen.end(), candidates.end() - 10, candidates.end());

    SyntheticCorpus out;
    out.corpus.name = "synthetic";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        core::LabeledSample s;
        s.article.id = "s" + std::to_string(i);
        s.article.body = "the council met and discussed the plan for the coming year";
        s.elements.problem_definition = {chosen[i].text, true};
        s.elements.causal_interpretation = {"routine process drove the outcome", true};
        s.elements.moral_evaluation = {"coverage stayed neutral throughout", true};
        s.elements.treatment_recommendation = {"officials suggested further review", true};
        s.label = i < 10 ? 0 : 1;
        s.provenance = core::Provenance::external;
        out.problem_embeddings.push_back(chosen[i].embedding);
        out.corpus.samples.push_back(std::move(s));
    }
    return out;
}

// Perceptron probe: on linearly separable data this must reach zero errors.
bool probe_separable(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
    const std::size_t d = xs.front().size();
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    for (int epoch = 0; epoch < 50000; ++epoch) {
        int errors = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double y = ys[i] == 1 ? 1.0 : -1.0;
            if (y * (kernels::dot(w, xs[i]) + b) <= 0.0) {
                kernels::axpy(y, xs[i], w);
                b += y;
                ++errors;
            }
        }
        if (errors == 0) return true;
    }
    return false;
}

fem::FemConfig synthetic_config() {
    fem::FemConfig cfg;
    cfg.input_dim = 32;
    cfg.hidden_dim = 16;
    cfg.dropout = 0.0;
    cfg.peak_lr = 0.05;
    cfg.epochs = 200;
    cfg.batch_size = 2;
    cfg.seed = 13;
    return cfg;
}

bool check_synthetic_overfit(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto synthetic = build_synthetic_corpus();

    std::vector<int> labels;
    for (const auto& s : synthetic.corpus.samples) labels.push_back(s.label);
    if (!probe_separable(synthetic.problem_embeddings, labels)) {
        detail = "constructed corpus is not linearly separable; labeling rule is broken";
        return false;
    }

    // Overfit contract: the whole corpus is both train and validation set,
    // so the best-epoch restore hands back the best train-set fit.
    encoder::HashingEncoder enc(32);
    const auto encoded = evalkit::encode_corpus(enc, synthetic.corpus);
    const auto cfg = synthetic_config();

    fem::TrainData data;
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        data.x.push_back(fem::masked_sequence(encoded.encodings[i], cfg.segment_mask));
        data.y.push_back(encoded.labels[i]);
    }

    fem::FemModel first(cfg);
    const auto result = fem::train(first, data, data);
    const auto train_metrics = fem::evaluate_set(first, data);

    fem::FemModel second(cfg);
    fem::train(second, data, data);
    const bool deterministic = first.params().w_cls == second.params().w_cls &&
                               first.params().w_fwd == second.params().w_fwd;

    const double elapsed = seconds_since(start);
    const double f1 = train_metrics.has_f1 ? train_metrics.f1 : 0.0;
    detail = "probe separable, train F1 " + fmt(f1) + " after " +
             std::to_string(result.history.size()) + " epochs in " + fmt(elapsed) +
             "s, repeat run " + (deterministic ? "identical" : "DIFFERS");
    return result.status == fem::TrainStatus::completed && f1 >= 0.95 && deterministic &&
           elapsed < 120.0;
}

// ---------------------------------------------------------------------------
// Criterion 3: metric oracle and published FEM-row consistency.

bool check_metric_oracle(std::string& detail) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> label(0, 1);
    std::uniform_int_distribution<std::size_t> length(1, 50);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = length(rng);
        std::vector<int> truth(n), predicted(n);
        for (auto& v : truth) v = label(rng);
        for (auto& v : predicted) v = label(rng);

        // Independent tally; the positive class is misinformation (label 0).
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (truth[i] == 0 && predicted[i] == 0) ++tp;
            if (truth[i] == 1 && predicted[i] == 0) ++fp;
            if (truth[i] == 1 && predicted[i] == 1) ++tn;
            if (truth[i] == 0 && predicted[i] == 1) ++fn;
        }
        const auto counts = metrics::confusion(truth, predicted);
        if (counts.tp != tp || counts.fp != fp || counts.tn != tn || counts.fn != fn) {
            detail = "confusion mismatch on randomized trial " + std::to_string(trial);
            return false;
        }
        const auto m = metrics::metrics(counts);
        const double acc = static_cast<double>(tp + tn) / static_cast<double>(n);
        if (m.accuracy != acc) {
            detail = "accuracy mismatch on randomized trial " + std::to_string(trial);
            return false;
        }
        if (m.has_precision != (tp + fp > 0) ||
            (m.has_precision && m.precision != static_cast<double>(tp) / (tp + fp))) {
            detail = "precision mismatch on randomized trial " + std::to_string(trial);
            return false;
        }
        if (m.has_recall != (tp + fn > 0) ||
            (m.has_recall && m.recall != static_cast<double>(tp) / (tp + fn))) {
            detail = "recall mismatch on randomized trial " + std::to_string(trial);
            return false;
        }
    }

    // Published rows must be self-consistent: F1 recomputed from each
    // bundled FEM-family row's precision/recall lands on the printed value.
    std::size_t rows_checked = 0;
    double worst_gap = 0.0;
    bool headline_seen = false;
    for (const auto& table : evalkit::benchmark_tables()) {
        for (const auto& row : table.rows) {
            if (row.model.rfind("fem", 0) != 0) continue;
            const double recomputed =
                2.0 * row.precision * row.recall / (row.precision + row.recall);
            worst_gap = std::max(worst_gap, std::abs(recomputed - row.f1));
            ++rows_checked;
            if (table.topic == "three-waters" && row.model == "fem") {
                headline_seen =
                    row.precision == 0.9695 && row.recall == 0.9734 && row.f1 == 0.9715;
            }
        }
    }
    detail = "1000 randomized sets exact; " + std::to_string(rows_checked) +
             " published rows, worst F1 gap " + fmt(worst_gap);
    return rows_checked == 12 && worst_gap < 5e-4 && headline_seen;
}

// ---------------------------------------------------------------------------
// Criterion 4: warmup/cosine schedule analytic points and monotonicity.

bool check_schedule(std::string& detail) {
    const double peak = 1e-5;
    const std::size_t warmup = 1000, total = 11000;
    const std::size_t midpoint = warmup + (total - warmup) / 2;

    const double at_warmup_end = fem::lr_at(warmup - 1, peak, warmup, total);
    const double at_total = fem::lr_at(total, peak, warmup, total);
    const double at_midpoint = fem::lr_at(midpoint, peak, warmup, total);

    bool monotone = true;
    double prev = fem::lr_at(0, peak, warmup, total);
    for (std::size_t step = 1; step < warmup && monotone; ++step) {
        const double lr = fem::lr_at(step, peak, warmup, total);
        monotone = lr >= prev;
        prev = lr;
    }
    prev = fem::lr_at(warmup - 1, peak, warmup, total);
    for (std::size_t step = warmup; step <= total && monotone; ++step) {
        const double lr = fem::lr_at(step, peak, warmup, total);
        monotone = lr <= prev;
        prev = lr;
    }

    detail = "warmup end " + fmt(at_warmup_end) + ", total " + fmt(at_total) + ", midpoint " +
             fmt(at_midpoint) + ", monotone per phase: " + (monotone ? "yes" : "NO");
    return at_warmup_end == peak && at_total == 0.0 &&
           std::abs(at_midpoint - peak / 2.0) < 1e-12 && monotone;
}

// ---------------------------------------------------------------------------
// Criterion 5: cosine similarity properties on random pairs.

bool check_cosine_properties(std::string& detail) {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    std::uniform_int_distribution<std::size_t> dim(1, 64);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = dim(rng);
        std::vector<double> x(d), y(d);
        for (auto& v : x) v = uni(rng);
        for (auto& v : y) v = uni(rng);

        const double xy = metrics::cosine_similarity(x, y);
        const double yx = metrics::cosine_similarity(y, x);
        worst = std::max(worst, std::abs(xy - yx));

        auto xs = x;
        auto ys = y;
        kernels::scal(scale(rng), xs);
        kernels::scal(scale(rng), ys);
        worst = std::max(worst, std::abs(metrics::cosine_similarity(xs, ys) - xy));

        worst = std::max(worst, std::max(0.0, std::abs(xy) - 1.0));
        if (kernels::sumsq(x) > 0.0)
            worst = std::max(worst, std::abs(metrics::cosine_similarity(x, x) - 1.0));
    }
    detail = "worst property violation " + fmt(worst) + " over 1000 pairs";
    return worst < 1e-6;
}

// ---------------------------------------------------------------------------
// Criterion 6: removing the signal-bearing element costs at least 0.1 F1.

bool check_ablation_signal(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto synthetic = build_synthetic_corpus();
    encoder::HashingEncoder enc(32);
    const auto splits = core::split_corpus(synthetic.corpus, {0.8, 0.1, 0.1, 13, true});
    const auto enc_train = evalkit::encode_corpus(enc, splits.train);
    const auto enc_val = evalkit::encode_corpus(enc, splits.val);

    const auto report = evalkit::run_ablation(enc_train, enc_val, synthetic_config(),
                                              evalkit::AblationPlan::default_plan());
    const auto* full = report.find("full");
    const auto* minus_problem = report.find("minus-problem");
    if (!full || !minus_problem || full->failed || minus_problem->failed) {
        detail = "plan rows missing or failed";
        return false;
    }
    const double full_f1 = full->val.has_f1 ? full->val.f1 : 0.0;
    const double without = minus_problem->val.has_f1 ? minus_problem->val.f1 : 0.0;
    const double elapsed = seconds_since(start);
    detail = "full F1 " + fmt(full_f1) + " vs minus-problem " + fmt(without) + " (gap " +
             fmt(full_f1 - without) + "), " + std::to_string(report.rows.size()) +
             " configurations in " + fmt(elapsed) + "s";
    return report.rows.size() == 7 && full_f1 - without >= 0.1 && elapsed < 900.0;
}

// ---------------------------------------------------------------------------
// Criteria 7 and 8 drive the installed binary.

struct TempDir {
    std::string path;
    TempDir() {
        path = (fs::temp_directory_path() /
                ("femkit-accept-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++)))
                   .string();
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
    const std::string command = std::string(FEMKIT_BIN_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<core::Article> fault_articles() {
    std::vector<core::Article> articles(3);
    articles[0].id = "a1";
    articles[0].body =
        "Political leaders moved the reform bill forward this week in the capital. The council "
        "said the plan would change ownership rules. Officials argued scale would help. Critics "
        "asked for more time.";
    articles[1].id = "a2";
    articles[1].body =
        "The semantic dispute over naming carried on through the public hearing. Supporters "
        "called the plan modernisation. Opponents called the wording misleading. Everyone "
        "wanted clearer definitions.";
    articles[2].id = "a3";
    articles[2].body =
        "An economic review put the upgrade bill at nine billion dollars overall. Ratepayers "
        "would face higher charges. The report compared regional costs. Analysts highlighted "
        "borrowing capacity.";
    return articles;
}

bool check_pipeline_determinism(std::string& detail) {
    TempDir dir;
    {
        std::ofstream out(dir.path + "/articles.jsonl", std::ios::binary);
        for (const auto& a : fault_articles())
            out << json{{"id", a.id}, {"body", a.body}}.dump() << "\n";
    }
    const auto invoke = [&](const std::string& out) {
        return run_cli("augment --input '" + dir.path + "/articles.jsonl' --output '" +
                       dir.path + "/" + out + "' --seed 21 --client mock");
    };
    if (invoke("r1") != 0 || invoke("r2") != 0) {
        detail = "augment run failed";
        return false;
    }
    const auto c1 = slurp(dir.path + "/r1/corpus.jsonl");
    if (c1.empty() || c1 != slurp(dir.path + "/r2/corpus.jsonl")) {
        detail = "corpora differ between identical seeded runs";
        return false;
    }

    // Fault injection: the article whose rewrite targets the economic frame
    // loses its altered half; everything else must pair up exactly.
    augment::MockLlmClient mock;
    mock.fail_when("TARGET FRAME: economic", "client", -1);
    augment::PipelineConfig cfg;
    cfg.retry.backoff_initial_ms = 0.0;
    cfg.seed = 21;
    augment::Augmenter augmenter(mock, cfg);
    const auto result = augmenter.run(fault_articles());

    if (result.corpus.size() != 5 || result.quarantined.size() != 1) {
        detail = "fault run produced " + std::to_string(result.corpus.size()) + " samples, " +
                 std::to_string(result.quarantined.size()) + " quarantines (want 5, 1)";
        return false;
    }
    const auto& q = result.quarantined.front();
    if (q.phase != "alter" || q.attempts != cfg.retry.client_error_attempts) {
        detail = "quarantine record {" + q.article_id + ", " + q.phase + ", attempts " +
                 std::to_string(q.attempts) + "} breaks the retry contract";
        return false;
    }
    for (const auto& s : result.corpus.samples) {
        if (s.label == 1) continue;
        if (s.provenance != core::Provenance::altered || !s.source_id ||
            s.article.id != *s.source_id + "-alt") {
            detail = "label-0 sample " + s.article.id + " is not a well-formed pair";
            return false;
        }
        const bool source_present = std::any_of(
            result.corpus.samples.begin(), result.corpus.samples.end(),
            [&](const auto& other) { return other.label == 1 && other.article.id == *s.source_id; });
        if (!source_present) {
            detail = "altered sample " + s.article.id + " has no source in the corpus";
            return false;
        }
    }
    detail = "byte-identical reruns; fault run kept 5 samples, quarantined " + q.article_id +
             " at " + q.phase + " after " + std::to_string(q.attempts) + " attempts";
    return true;
}

bool check_fixture_replay(std::string& detail) {
    TempDir dir;
    if (run_cli("similarity --fixtures table6 --output '" + dir.path + "' --seed 1") != 0) {
        detail = "similarity --fixtures table6 exited nonzero";
        return false;
    }
    const auto doc = json::parse(slurp(dir.path + "/similarity.json"), nullptr, false);
    if (doc.is_discarded()) {
        detail = "similarity.json missing or malformed";
        return false;
    }

    const auto& expected = evalkit::paired_similarity_rows();
    const auto& rows = doc["rows"];
    if (rows.size() != expected.size()) {
        detail = "expected " + std::to_string(expected.size()) + " rows, got " +
                 std::to_string(rows.size());
        return false;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (rows[i]["condition"] != expected[i].condition ||
            rows[i]["hidden_similarity"].get<double>() != expected[i].similarity ||
            rows[i]["f1"].get<double>() != expected[i].f1) {
            detail = "row " + std::to_string(i) + " (" + expected[i].condition +
                     ") does not match the bundled table";
            return false;
        }
    }
    const auto rho = doc["similarity_f1_spearman"];
    if (!rho.is_number() || rho.get<double>() >= 0.0) {
        detail = "spearman " + rho.dump() + " is not negative";
        return false;
    }
    detail = "six rows verbatim, spearman " + fmt(rho.get<double>());
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 9: softmax normalization and inference contracts.

bool check_forward_contracts(std::string& detail) {
    fem::FemConfig cfg;
    cfg.input_dim = 8;
    cfg.hidden_dim = 4;
    cfg.dropout = 0.3; // must not leak into inference
    fem::FemModel model(cfg);

    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> length(1, 5);
    double worst_sum = 0.0;
    bool deterministic = true;
    for (int trial = 0; trial < 10000; ++trial) {
        fem::Sequence seq(length(rng), std::vector<double>(cfg.input_dim));
        for (auto& row : seq)
            for (auto& v : row) v = uni(rng);
        const auto p = model.probs(seq);
        worst_sum = std::max(worst_sum, std::abs(p[0] + p[1] - 1.0));
        if (p[0] < 0.0 || p[1] < 0.0) {
            detail = "negative probability on trial " + std::to_string(trial);
            return false;
        }
        if (trial % 100 == 0) {
            const auto again = model.probs(seq);
            deterministic = deterministic && again == p &&
                            model.hidden_state(seq) == model.hidden_state(seq);
        }
    }

    fem::FemModel zeroed(cfg);
    std::fill(zeroed.params().w_cls.begin(), zeroed.params().w_cls.end(), 0.0);
    std::fill(zeroed.params().b_cls.begin(), zeroed.params().b_cls.end(), 0.0);
    fem::Sequence seq(3, std::vector<double>(cfg.input_dim, 0.7));
    const auto p = zeroed.probs(seq);
    const bool uniform = p[0] == 0.5 && p[1] == 0.5;

    detail = "worst |sum-1| " + fmt(worst_sum) + " over 10000 inputs, zero-weight probs (" +
             fmt(p[0]) + ", " + fmt(p[1]) + "), repeat inference " +
             (deterministic ? "identical" : "DIFFERS");
    return worst_sum < 1e-6 && uniform && deterministic;
}

struct Criterion {
    int id;
    std::string label;
    std::function<bool(std::string&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "classifier gradients match central finite differences", check_gradients},
        {2, "training overfits the separable synthetic corpus deterministically",
         check_synthetic_overfit},
        {3, "metrics match a brute-force oracle and the published rows cohere",
         check_metric_oracle},
        {4, "warmup/cosine schedule hits its analytic points and is monotone per phase",
         check_schedule},
        {5, "cosine similarity satisfies its axioms on random pairs", check_cosine_properties},
        {6, "removing the signal element costs at least 0.1 F1 across the 7-config plan",
         check_ablation_signal},
        {7, "mock augmentation is byte-deterministic and fault runs keep pairing invariants",
         check_pipeline_determinism},
        {8, "similarity fixture replay reproduces the bundled table with negative correlation",
         check_fixture_replay},
        {9, "softmax normalization, zero-weight uniformity, inference determinism",
         check_forward_contracts},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        bool ok = false;
        std::string detail;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        failures += ok ? 0 : 1;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
                  << criterion.label << (detail.empty() ? "" : " — " + detail) << "\n";
    }
    if (failures) std::cout << failures << " criteria failed\n";
    return failures == 0 ? 0 : 1;
}
