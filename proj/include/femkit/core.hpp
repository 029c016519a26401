#pragma once

// Domain data model shared by every other module: articles, frame element
// sets, labeled samples, corpora, deterministic splitting and JSONL I/O.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "femkit/errors.hpp"

namespace femkit::core {

FEMKIT_DEFINE_ERROR(InvalidLabel, "invalid_label");
FEMKIT_DEFINE_ERROR(EmptyBody, "empty_body");
FEMKIT_DEFINE_ERROR(ProvenanceLabelMismatch, "provenance_label_mismatch");
FEMKIT_DEFINE_ERROR(DuplicateId, "duplicate_id");
FEMKIT_DEFINE_ERROR(TooFewSamples, "too_few_samples");
FEMKIT_DEFINE_ERROR(SplitSpecError, "split_spec_error");
FEMKIT_DEFINE_ERROR(IoError, "io_error");

// JSONL line that does not match the corpus schema. Lines are 1-based.
class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& message)
        : Error("schema_error", "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// One news text. `body` is the narrative; `frame_label` the frame it is told
// under, when known.
struct Article {
    std::string id;
    std::string body;
    std::optional<std::string> title;
    std::optional<std::string> source;
    std::optional<std::string> frame_label;
    std::optional<std::string> topic;

    bool operator==(const Article&) const = default;
};

struct FrameElement {
    std::string text;
    bool present = false;

    bool operator==(const FrameElement&) const = default;
};

// The four framing elements of one article. Slots are fixed and ordered;
// an element an extractor could not find is flagged absent, never dropped.
struct FrameElementSet {
    static constexpr std::size_t kCount = 4;
    static const std::array<std::string_view, kCount>& names();

    FrameElement problem_definition;
    FrameElement causal_interpretation;
    FrameElement moral_evaluation;
    FrameElement treatment_recommendation;

    FrameElement& at(std::size_t i);
    const FrameElement& at(std::size_t i) const;
    std::size_t present_count() const;

    bool operator==(const FrameElementSet&) const = default;
};

enum class Provenance { original, altered, external };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// Label semantics: 1 = information, 0 = misinformation.
struct LabeledSample {
    Article article;
    FrameElementSet elements;
    int label = 1;
    Provenance provenance = Provenance::external;
    // For altered samples: id of the original this one was derived from.
    std::optional<std::string> source_id;
    // Unknown JSONL keys, preserved verbatim on round-trip.
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const LabeledSample&) const = default;
};

struct Corpus {
    std::string name;
    std::vector<LabeledSample> samples;
    int schema_version = 1;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    // Name is presentation only; equality is content.
    bool operator==(const Corpus& other) const {
        return schema_version == other.schema_version && samples == other.samples;
    }
};

struct SplitSpec {
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    std::uint64_t seed = 0;
    bool stratify_by_label = true;
};

struct CorpusSplits {
    Corpus train;
    Corpus val;
    Corpus test;
};

struct CorpusStats {
    std::size_t count = 0;
    // Unset when the corpus is empty.
    std::optional<double> mean_token_length;
    std::size_t label0_count = 0;
    std::size_t label1_count = 0;
};

// Checks every type invariant; returns the sample unchanged on success.
const LabeledSample& validate_sample(const LabeledSample& sample);

// JSONL corpus I/O. One sample per line, UTF-8; see README for the schema.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// Serialization of a single sample (used by the loaders and the pipeline).
nlohmann::json sample_to_json(const LabeledSample& sample);
LabeledSample sample_from_json(const nlohmann::json& j, std::size_t line_for_errors = 0);

// Deterministic, optionally label-stratified partition. Exhaustive and
// disjoint; throws TooFewSamples if any split would be empty.
CorpusSplits split_corpus(const Corpus& corpus, const SplitSpec& spec);

// Summary statistics; tokenizer maps a body to its token count.
CorpusStats corpus_stats(const Corpus& corpus,
                         const std::function<std::size_t(std::string_view)>& token_count);

} // namespace femkit::core
