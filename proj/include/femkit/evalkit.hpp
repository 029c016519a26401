#pragma once

// Evaluation harness: masked-segment ablations, paired similarity analysis,
// two-article case comparison, and the bundled reference tables for fully
// offline report replay.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "femkit/augment.hpp"
#include "femkit/core.hpp"
#include "femkit/encoder.hpp"
#include "femkit/errors.hpp"
#include "femkit/fem.hpp"
#include "femkit/metrics.hpp"

namespace femkit::evalkit {

FEMKIT_DEFINE_ERROR(EvalError, "eval_error");
FEMKIT_DEFINE_ERROR(NoPairs, "no_pairs");
FEMKIT_DEFINE_ERROR(FixtureError, "fixture_error");

// Over [article, problem_definition, causal_interpretation, moral_evaluation,
// treatment_recommendation].
using SegmentMask = std::array<bool, 5>;

struct MaskedConfig {
    std::string name;
    SegmentMask mask;
};

struct AblationPlan {
    std::vector<MaskedConfig> configs;

    // The seven training configurations compared by `ablate`: the full
    // model, each element knocked out in turn, article text alone and the
    // four elements alone.
    static AblationPlan default_plan();
    // The six masks the similarity analysis conditions on: article text
    // alone, all four elements, and each element knocked out of the
    // element-only view.
    static AblationPlan similarity_plan();
};

// A corpus run through one encoder, aligned index-wise with ids and labels.
struct EncodedCorpus {
    std::vector<encoder::SampleEncoding> encodings;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::vector<std::optional<std::string>> source_ids;

    std::size_t size() const { return encodings.size(); }
};

EncodedCorpus encode_corpus(const encoder::SegmentEncoder& enc, const core::Corpus& corpus,
                            const encoder::TruncationPolicy& policy = {});

// Predictions of `model` on the masked view of every sample.
std::vector<int> predict_all(fem::FemModel& model, const EncodedCorpus& corpus,
                             const SegmentMask& mask);

metrics::MetricSet evaluate_masked(fem::FemModel& model, const EncodedCorpus& corpus,
                                   const SegmentMask& mask);

struct AblationRow {
    std::string name;
    SegmentMask mask{};
    bool failed = false;
    std::string error;                    // when failed
    metrics::MetricSet val;               // best-epoch validation metrics
    std::vector<double> f1_trace;         // per-epoch validation F1 (NaN when undefined)
    std::size_t best_epoch = 0;           // 1-based, 0 when no epoch had a defined F1
};

struct AblationReport {
    std::vector<AblationRow> rows;

    const AblationRow* find(const std::string& name) const;
};

// Trains one model per plan entry (shared seed and hyperparameters, only the
// segment mask differs) and evaluates on the validation split. A failing
// configuration is recorded on its row; the loop keeps going.
AblationReport run_ablation(const EncodedCorpus& train, const EncodedCorpus& val,
                            const fem::FemConfig& base, const AblationPlan& plan);

struct SimilarityRow {
    std::string name;
    SegmentMask mask{};
    std::size_t pair_count = 0;
    // Mean cosine over paired (original, rewritten) hidden states under this
    // mask.
    double hidden_similarity = 0.0;
    // For the article-only condition: the same mean over raw article
    // embeddings, before any model.
    std::optional<double> embedding_similarity;
    // Detection F1 of a model trained under the same mask, when available.
    std::optional<double> f1;
};

struct SimilarityReport {
    std::vector<SimilarityRow> rows;

    // Spearman rank correlation between similarity and F1 over the rows
    // that carry an F1. Unset when fewer than two rows qualify.
    std::optional<double> similarity_f1_spearman() const;
};

// Pairs every altered sample with its source by id and measures how close
// the two hidden states are under each condition. Throws NoPairs when the
// corpus has no (original, altered) pair.
SimilarityReport similarity_report(fem::FemModel& model, const EncodedCorpus& corpus,
                                   const AblationPlan& conditions = AblationPlan::similarity_plan());

// Copies F1 values onto similarity rows from ablation rows of the same name.
void join_f1(SimilarityReport& report, const AblationReport& ablation);

// Two-article comparison: shared-fact similarity at the text level versus
// separation once the framing elements are considered.
struct CaseComparison {
    std::string id_a;
    std::string id_b;
    double body_similarity = 0.0;      // cosine of raw article embeddings
    double element_similarity = 0.0;   // cosine of element-only hidden states
    int prediction_a_text = 1;         // label under the article-only mask
    int prediction_b_text = 1;
    int prediction_a_full = 1;         // label with article and elements
    int prediction_b_full = 1;
    core::FrameElementSet elements_a;
    core::FrameElementSet elements_b;
};

CaseComparison case_compare(fem::FemModel& model, const encoder::SegmentEncoder& enc,
                            augment::Augmenter& augmenter, const core::Article& a,
                            const core::Article& b,
                            const encoder::TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Bundled reference data, for offline fixture-mode reports.

struct BaselineRow {
    std::string model;
    double accuracy;
    double precision;
    double recall;
    double f1;
};

struct BenchmarkTable {
    std::string topic; // "three-waters" | "covid" | "nuclear" | "mixed"
    std::vector<BaselineRow> rows;
};

const std::vector<BenchmarkTable>& benchmark_tables();

struct DatasetStat {
    std::string topic;
    std::size_t articles;
    std::size_t average_tokens;
};

const std::vector<DatasetStat>& dataset_stats();

// One-pair similarity/F1 rows ("table6" fixture); condition names match
// AblationPlan::similarity_plan().
struct PairedSimilarityRow {
    std::string condition;
    double similarity;
    double f1;
};

const std::vector<PairedSimilarityRow>& paired_similarity_rows();

// Mean similarity per condition and topic ("table7" fixture). Topic order
// matches dataset_stats().
struct TopicSimilarityRow {
    std::string condition;
    std::array<double, 4> by_topic;
};

const std::vector<TopicSimilarityRow>& topic_similarity_rows();

// The bundled worked example: one story told under two frames, with the
// quoted problem definitions and the similarity shift when elements enter.
struct CaseFixture {
    std::string id;
    std::string frame;
    std::string body;
    std::string problem_definition;
};

struct CasePairFixture {
    CaseFixture informative;
    CaseFixture satirical;
    double body_similarity;    // article-level cosine
    double element_similarity; // once elements are considered
};

const CasePairFixture& case_pair_fixture();

// Fixture ids accepted by the CLI; throws FixtureError for unknown names.
SimilarityReport fixture_similarity_report(const std::string& fixture_name);

} // namespace femkit::evalkit
