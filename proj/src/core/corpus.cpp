#include "femkit/core.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "femkit/util.hpp"

namespace femkit::core {

const std::array<std::string_view, FrameElementSet::kCount>& FrameElementSet::names() {
    static const std::array<std::string_view, kCount> kNames = {
        "problem_definition", "causal_interpretation", "moral_evaluation",
        "treatment_recommendation"};
    return kNames;
}

FrameElement& FrameElementSet::at(std::size_t i) {
    switch (i) {
        case 0: return problem_definition;
        case 1: return causal_interpretation;
        case 2: return moral_evaluation;
        case 3: return treatment_recommendation;
    }
    throw std::out_of_range("FrameElementSet index " + std::to_string(i));
}

const FrameElement& FrameElementSet::at(std::size_t i) const {
    return const_cast<FrameElementSet*>(this)->at(i);
}

std::size_t FrameElementSet::present_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < kCount; ++i)
        if (at(i).present) ++n;
    return n;
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::original: return "original";
        case Provenance::altered: return "altered";
        case Provenance::external: return "external";
    }
    return "external";
}

Provenance provenance_from_string(std::string_view s) {
    if (s == "original") return Provenance::original;
    if (s == "altered") return Provenance::altered;
    if (s == "external") return Provenance::external;
    throw Error("schema_error", "unknown provenance \"" + std::string(s) + "\"");
}

const LabeledSample& validate_sample(const LabeledSample& sample) {
    if (sample.label != 0 && sample.label != 1) {
        throw InvalidLabel("label must be 0 or 1, got " + std::to_string(sample.label));
    }
    if (util::trim(sample.article.body).empty()) {
        throw EmptyBody("article \"" + sample.article.id + "\" has an empty body");
    }
    if (sample.provenance == Provenance::altered && sample.label != 0) {
        throw ProvenanceLabelMismatch("altered sample \"" + sample.article.id +
                                      "\" must carry label 0");
    }
    if (sample.provenance == Provenance::original && sample.label != 1) {
        throw ProvenanceLabelMismatch("original sample \"" + sample.article.id +
                                      "\" must carry label 1");
    }
    return sample;
}

namespace {

const std::unordered_set<std::string>& known_keys() {
    static const std::unordered_set<std::string> keys = {
        "id", "title", "body", "source", "topic", "frame_label",
        "label", "provenance", "elements", "source_id"};
    return keys;
}

void set_optional(nlohmann::json& j, const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
}

std::optional<std::string> get_optional(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

} // namespace

nlohmann::json sample_to_json(const LabeledSample& sample) {
    nlohmann::json j = sample.extra.is_object() ? sample.extra : nlohmann::json::object();
    j["id"] = sample.article.id;
    j["body"] = sample.article.body;
    set_optional(j, "title", sample.article.title);
    set_optional(j, "source", sample.article.source);
    set_optional(j, "topic", sample.article.topic);
    set_optional(j, "frame_label", sample.article.frame_label);
    j["label"] = sample.label;
    j["provenance"] = std::string(to_string(sample.provenance));
    if (sample.source_id) j["source_id"] = *sample.source_id;
    nlohmann::json elements = nlohmann::json::object();
    for (std::size_t i = 0; i < FrameElementSet::kCount; ++i) {
        const FrameElement& e = sample.elements.at(i);
        if (e.present) elements[std::string(FrameElementSet::names()[i])] = e.text;
    }
    j["elements"] = elements;
    return j;
}

LabeledSample sample_from_json(const nlohmann::json& j, std::size_t line) {
    auto fail = [line](const std::string& msg) -> SchemaError { return SchemaError(line, msg); };
    if (!j.is_object()) throw fail("sample must be a JSON object");

    LabeledSample s;
    try {
        auto require = [&](const char* key) -> const nlohmann::json& {
            auto it = j.find(key);
            if (it == j.end()) throw fail(std::string("missing required key \"") + key + "\"");
            return *it;
        };
        const auto& id = require("id");
        if (!id.is_string()) throw fail("\"id\" must be a string");
        s.article.id = id.get<std::string>();

        const auto& body = require("body");
        if (!body.is_string()) throw fail("\"body\" must be a string");
        s.article.body = body.get<std::string>();

        const auto& label = require("label");
        if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
            throw fail("\"label\" must be 0 or 1");
        }
        s.label = label.get<int>();

        const auto& prov = require("provenance");
        if (!prov.is_string()) throw fail("\"provenance\" must be a string");
        s.provenance = provenance_from_string(prov.get<std::string>());

        s.article.title = get_optional(j, "title");
        s.article.source = get_optional(j, "source");
        s.article.topic = get_optional(j, "topic");
        s.article.frame_label = get_optional(j, "frame_label");
        s.source_id = get_optional(j, "source_id");

        if (auto it = j.find("elements"); it != j.end() && !it->is_null()) {
            if (!it->is_object()) throw fail("\"elements\" must be an object");
            for (std::size_t i = 0; i < FrameElementSet::kCount; ++i) {
                auto key = std::string(FrameElementSet::names()[i]);
                auto eit = it->find(key);
                if (eit != it->end() && !eit->is_null()) {
                    if (!eit->is_string()) throw fail("element \"" + key + "\" must be a string");
                    s.elements.at(i) = FrameElement{eit->get<std::string>(), true};
                }
            }
        }

        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!known_keys().count(it.key())) s.extra[it.key()] = it.value();
        }

        validate_sample(s);
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw fail(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw fail(e.what());
    }
    return s;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path);

    Corpus corpus;
    corpus.name = std::filesystem::path(path).stem().string();
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError(lineno, "not valid JSON");
        LabeledSample s = sample_from_json(j, lineno);
        if (!ids.insert(s.article.id).second) {
            throw DuplicateId("duplicate sample id \"" + s.article.id + "\" at line " +
                              std::to_string(lineno));
        }
        corpus.samples.push_back(std::move(s));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const auto& s : corpus.samples) {
        out << sample_to_json(s).dump() << '\n';
    }
    if (!out) throw IoError("write to " + path + " failed");
}

CorpusStats corpus_stats(const Corpus& corpus,
                         const std::function<std::size_t(std::string_view)>& token_count) {
    CorpusStats stats;
    stats.count = corpus.size();
    double total = 0.0;
    for (const auto& s : corpus.samples) {
        total += static_cast<double>(token_count(s.article.body));
        if (s.label == 0)
            ++stats.label0_count;
        else
            ++stats.label1_count;
    }
    if (stats.count > 0) stats.mean_token_length = total / static_cast<double>(stats.count);
    return stats;
}

} // namespace femkit::core
