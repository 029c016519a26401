#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "femkit/evalkit.hpp"

namespace femkit::evalkit {

AblationPlan AblationPlan::default_plan() {
    return AblationPlan{{
        {"full", {true, true, true, true, true}},
        {"minus-problem", {true, false, true, true, true}},
        {"minus-causal", {true, true, false, true, true}},
        {"minus-moral", {true, true, true, false, true}},
        {"minus-treatment", {true, true, true, true, false}},
        {"text-only", {true, false, false, false, false}},
        {"elements-only", {false, true, true, true, true}},
    }};
}

AblationPlan AblationPlan::similarity_plan() {
    return AblationPlan{{
        {"article", {true, false, false, false, false}},
        {"all-elements", {false, true, true, true, true}},
        {"minus-problem", {false, false, true, true, true}},
        {"minus-causal", {false, true, false, true, true}},
        {"minus-moral", {false, true, true, false, true}},
        {"minus-treatment", {false, true, true, true, false}},
    }};
}

EncodedCorpus encode_corpus(const encoder::SegmentEncoder& enc, const core::Corpus& corpus,
                            const encoder::TruncationPolicy& policy) {
    EncodedCorpus out;
    out.encodings.reserve(corpus.size());
    out.labels.reserve(corpus.size());
    out.ids.reserve(corpus.size());
    out.source_ids.reserve(corpus.size());
    for (const auto& sample : corpus.samples) {
        out.encodings.push_back(encoder::encode_sample(enc, sample, policy));
        out.labels.push_back(sample.label);
        out.ids.push_back(sample.article.id);
        out.source_ids.push_back(sample.source_id);
    }
    return out;
}

std::vector<int> predict_all(fem::FemModel& model, const EncodedCorpus& corpus,
                             const SegmentMask& mask) {
    std::vector<int> out;
    out.reserve(corpus.size());
    for (const auto& encoding : corpus.encodings)
        out.push_back(model.predict(fem::masked_sequence(encoding, mask)));
    return out;
}

metrics::MetricSet evaluate_masked(fem::FemModel& model, const EncodedCorpus& corpus,
                                   const SegmentMask& mask) {
    if (corpus.size() == 0) throw EvalError("cannot evaluate an empty corpus");
    const auto predicted = predict_all(model, corpus, mask);
    return metrics::metrics(metrics::confusion(corpus.labels, predicted));
}

namespace {

fem::TrainData masked_data(const EncodedCorpus& corpus, const SegmentMask& mask) {
    fem::TrainData data;
    data.x.reserve(corpus.size());
    for (const auto& encoding : corpus.encodings)
        data.x.push_back(fem::masked_sequence(encoding, mask));
    data.y = corpus.labels;
    return data;
}

} // namespace

const AblationRow* AblationReport::find(const std::string& name) const {
    for (const auto& row : rows)
        if (row.name == name) return &row;
    return nullptr;
}

AblationReport run_ablation(const EncodedCorpus& train, const EncodedCorpus& val,
                            const fem::FemConfig& base, const AblationPlan& plan) {
    if (plan.configs.empty()) throw EvalError("ablation plan has no configurations");
    AblationReport report;
    report.rows.reserve(plan.configs.size());

    for (const auto& config : plan.configs) {
        AblationRow row;
        row.name = config.name;
        row.mask = config.mask;
        try {
            fem::FemConfig cfg = base;
            cfg.segment_mask = config.mask;
            fem::FemModel model(cfg);
            const fem::TrainResult result =
                fem::train(model, masked_data(train, config.mask), masked_data(val, config.mask));
            if (result.status == fem::TrainStatus::diverged) {
                row.failed = true;
                row.error = "training diverged (non-finite loss)";
            } else {
                row.val = result.best_val;
                row.best_epoch = result.best_epoch;
                row.f1_trace.reserve(result.history.size());
                for (const auto& epoch : result.history)
                    row.f1_trace.push_back(epoch.val.has_f1
                                               ? epoch.val.f1
                                               : std::numeric_limits<double>::quiet_NaN());
            }
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> paired_indices(const EncodedCorpus& corpus) {
    std::unordered_map<std::string, std::size_t> by_id;
    by_id.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus.ids[i], i);

    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (original, altered)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus.source_ids[i]) continue;
        auto it = by_id.find(*corpus.source_ids[i]);
        if (it == by_id.end()) continue;
        pairs.emplace_back(it->second, i);
    }
    return pairs;
}

} // namespace

SimilarityReport similarity_report(fem::FemModel& model, const EncodedCorpus& corpus,
                                   const AblationPlan& conditions) {
    const auto pairs = paired_indices(corpus);
    if (pairs.empty())
        throw NoPairs("corpus has no (original, rewritten) pair; similarity needs source ids");

    SimilarityReport report;
    report.rows.reserve(conditions.configs.size());
    const SegmentMask article_only = {true, false, false, false, false};

    for (const auto& condition : conditions.configs) {
        SimilarityRow row;
        row.name = condition.name;
        row.mask = condition.mask;
        row.pair_count = pairs.size();

        double hidden_sum = 0.0;
        double embedding_sum = 0.0;
        for (const auto& [orig, alt] : pairs) {
            const auto h_orig =
                model.hidden_state(fem::masked_sequence(corpus.encodings[orig], condition.mask));
            const auto h_alt =
                model.hidden_state(fem::masked_sequence(corpus.encodings[alt], condition.mask));
            hidden_sum += metrics::cosine_similarity(h_orig, h_alt);
            if (condition.mask == article_only)
                embedding_sum += metrics::cosine_similarity(corpus.encodings[orig][0].values,
                                                            corpus.encodings[alt][0].values);
        }
        row.hidden_similarity = hidden_sum / static_cast<double>(pairs.size());
        if (condition.mask == article_only)
            row.embedding_similarity = embedding_sum / static_cast<double>(pairs.size());
        report.rows.push_back(std::move(row));
    }
    return report;
}

void join_f1(SimilarityReport& report, const AblationReport& ablation) {
    for (auto& row : report.rows) {
        const AblationRow* source = ablation.find(row.name);
        if (source && !source->failed && source->val.has_f1) row.f1 = source->val.f1;
    }
}

std::optional<double> SimilarityReport::similarity_f1_spearman() const {
    std::vector<double> sims;
    std::vector<double> f1s;
    for (const auto& row : rows) {
        if (!row.f1) continue;
        sims.push_back(row.hidden_similarity);
        f1s.push_back(*row.f1);
    }
    if (sims.size() < 2) return std::nullopt;
    try {
        return metrics::spearman_rho(sims, f1s);
    } catch (const metrics::MetricsError&) {
        return std::nullopt; // constant column
    }
}

CaseComparison case_compare(fem::FemModel& model, const encoder::SegmentEncoder& enc,
                            augment::Augmenter& augmenter, const core::Article& a,
                            const core::Article& b, const encoder::TruncationPolicy& policy) {
    CaseComparison out;
    out.id_a = a.id;
    out.id_b = b.id;
    out.elements_a = augmenter.extract_elements(a);
    out.elements_b = augmenter.extract_elements(b);

    core::LabeledSample sample_a;
    sample_a.article = a;
    sample_a.elements = out.elements_a;
    core::LabeledSample sample_b;
    sample_b.article = b;
    sample_b.elements = out.elements_b;

    const auto enc_a = encoder::encode_sample(enc, sample_a, policy);
    const auto enc_b = encoder::encode_sample(enc, sample_b, policy);

    out.body_similarity = metrics::cosine_similarity(enc_a[0].values, enc_b[0].values);

    const SegmentMask elements_only = {false, true, true, true, true};
    out.element_similarity =
        metrics::cosine_similarity(model.hidden_state(fem::masked_sequence(enc_a, elements_only)),
                                   model.hidden_state(fem::masked_sequence(enc_b, elements_only)));

    const SegmentMask text_only = {true, false, false, false, false};
    const SegmentMask full = {true, true, true, true, true};
    out.prediction_a_text = model.predict(fem::masked_sequence(enc_a, text_only));
    out.prediction_b_text = model.predict(fem::masked_sequence(enc_b, text_only));
    out.prediction_a_full = model.predict(fem::masked_sequence(enc_a, full));
    out.prediction_b_full = model.predict(fem::masked_sequence(enc_b, full));
    return out;
}

SimilarityReport fixture_similarity_report(const std::string& fixture_name) {
    if (fixture_name != "table6")
        throw FixtureError("unknown similarity fixture '" + fixture_name +
                           "' (available: table6)");
    const auto plan = AblationPlan::similarity_plan();
    SimilarityReport report;
    for (const auto& fixture : paired_similarity_rows()) {
        SimilarityRow row;
        row.name = fixture.condition;
        for (const auto& config : plan.configs)
            if (config.name == fixture.condition) row.mask = config.mask;
        row.pair_count = 1;
        row.hidden_similarity = fixture.similarity;
        if (fixture.condition == "article")
            row.embedding_similarity = fixture.similarity;
        row.f1 = fixture.f1;
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace femkit::evalkit
