#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "femkit/core.hpp"
#include "femkit/util.hpp"

using namespace femkit;
using nlohmann::json;

namespace {

core::LabeledSample make_sample(const std::string& id, int label, core::Provenance prov) {
    core::LabeledSample s;
    s.article.id = id;
    s.article.body = "Body of " + id + ". It has two sentences.";
    s.label = label;
    s.provenance = prov;
    return s;
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() /
               ("femkit_core_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("frame element slots are fixed and ordered") {
    CHECK(core::FrameElementSet::kCount == 4);
    auto& names = core::FrameElementSet::names();
    CHECK(names[0] == "problem_definition");
    CHECK(names[1] == "causal_interpretation");
    CHECK(names[2] == "moral_evaluation");
    CHECK(names[3] == "treatment_recommendation");

    core::FrameElementSet set;
    CHECK(set.present_count() == 0);
    set.at(2) = {"wrongdoing", true};
    CHECK(set.moral_evaluation.text == "wrongdoing");
    CHECK(set.present_count() == 1);
}

TEST_CASE("sample validation enforces label and provenance invariants") {
    auto ok = make_sample("x", 1, core::Provenance::original);
    CHECK_NOTHROW(core::validate_sample(ok));

    auto bad_label = ok;
    bad_label.label = 2;
    CHECK_THROWS_AS(core::validate_sample(bad_label), core::InvalidLabel);

    auto empty = ok;
    empty.article.body = "   \n ";
    CHECK_THROWS_AS(core::validate_sample(empty), core::EmptyBody);

    // altered samples are misinformation by construction, originals are not
    auto altered_info = make_sample("y", 1, core::Provenance::altered);
    CHECK_THROWS_AS(core::validate_sample(altered_info), core::ProvenanceLabelMismatch);
    auto original_misinfo = make_sample("z", 0, core::Provenance::original);
    CHECK_THROWS_AS(core::validate_sample(original_misinfo), core::ProvenanceLabelMismatch);
    CHECK_NOTHROW(core::validate_sample(make_sample("w", 0, core::Provenance::altered)));
    CHECK_NOTHROW(core::validate_sample(make_sample("v", 0, core::Provenance::external)));
    CHECK_NOTHROW(core::validate_sample(make_sample("u", 1, core::Provenance::external)));
}

TEST_CASE("sample json round-trip preserves every field") {
    core::LabeledSample s = make_sample("art-7", 0, core::Provenance::altered);
    s.article.title = "A headline";
    s.article.source = "wire";
    s.article.frame_label = "conflict";
    s.article.topic = "health";
    s.source_id = "art-1";
    s.elements.problem_definition = {"Problem statement.", true};
    s.elements.treatment_recommendation = {"Do the thing.", true};
    s.extra["review_note"] = "kept";

    auto j = core::sample_to_json(s);
    auto back = core::sample_from_json(j);
    CHECK(back == s);

    // absent elements do not appear as keys
    CHECK(j["elements"].contains("problem_definition"));
    CHECK_FALSE(j["elements"].contains("causal_interpretation"));
    CHECK(j["review_note"] == "kept");
}

TEST_CASE("sample json uses the documented schema") {
    auto j = json::parse(R"({"id":"n1","title":"T","body":"Water is wet. Officials agree.",
        "source":"agency","topic":"water","frame_label":"attribution","label":1,
        "provenance":"original",
        "elements":{"problem_definition":"Water is wet."}})");
    auto s = core::sample_from_json(j);
    CHECK(s.article.id == "n1");
    CHECK(s.article.body == "Water is wet. Officials agree.");
    CHECK(s.article.title == "T");
    CHECK(s.label == 1);
    CHECK(s.provenance == core::Provenance::original);
    CHECK(s.elements.problem_definition.present);
    CHECK(s.elements.problem_definition.text == "Water is wet.");
    CHECK(s.elements.present_count() == 1);
}

TEST_CASE("schema violations carry the offending line") {
    CHECK_THROWS_AS(core::sample_from_json(json::parse(R"({"body":"x","label":1})"), 3),
                    core::SchemaError);
    try {
        core::sample_from_json(json::parse(R"({"id":"a","body":"x","label":"yes"})"), 12);
        FAIL("expected SchemaError");
    } catch (const core::SchemaError& e) {
        CHECK(e.line() == 12);
        CHECK(std::string(e.what()).find("line 12") != std::string::npos);
    }
}

TEST_CASE("corpus save/load round-trip") {
    auto dir = temp_dir();
    auto path = (dir / "corpus.jsonl").string();

    core::Corpus corpus;
    corpus.name = "mini";
    corpus.samples.push_back(make_sample("a", 1, core::Provenance::original));
    corpus.samples.push_back(make_sample("b", 0, core::Provenance::altered));
    corpus.samples.back().source_id = "a";
    corpus.samples.push_back(make_sample("c", 0, core::Provenance::external));

    core::save_corpus(corpus, path);
    auto loaded = core::load_corpus(path);
    CHECK(loaded == corpus);
    CHECK(loaded.name == "corpus");

    // file is one JSON object per line
    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK_FALSE(json::parse(line, nullptr, false).is_discarded());
    }
    CHECK(lines == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("loader rejects duplicates and malformed lines") {
    auto dir = temp_dir();
    auto path = (dir / "bad.jsonl").string();
    {
        std::ofstream out(path);
        out << R"({"id":"a","body":"x.","label":1,"provenance":"original"})" << "\n";
        out << R"({"id":"a","body":"y.","label":1,"provenance":"original"})" << "\n";
    }
    CHECK_THROWS_AS(core::load_corpus(path), core::DuplicateId);
    {
        std::ofstream out(path);
        out << R"({"id":"a","body":"x.","label":1,"provenance":"original"})" << "\n";
        out << "not json\n";
    }
    try {
        core::load_corpus(path);
        FAIL("expected SchemaError");
    } catch (const core::SchemaError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(core::load_corpus((dir / "missing.jsonl").string()), core::IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("split is deterministic, exhaustive and stratified") {
    core::Corpus corpus;
    corpus.name = "hundred";
    for (int i = 0; i < 60; ++i) {
        corpus.samples.push_back(make_sample("info-" + std::to_string(i), 1,
                                             core::Provenance::original));
    }
    for (int i = 0; i < 40; ++i) {
        corpus.samples.push_back(make_sample("mis-" + std::to_string(i), 0,
                                             core::Provenance::external));
    }

    core::SplitSpec spec;
    spec.seed = 7;
    auto splits = core::split_corpus(corpus, spec);

    CHECK(splits.train.size() == 80);
    CHECK(splits.val.size() == 10);
    CHECK(splits.test.size() == 10);
    CHECK(splits.train.name == "hundred.train");

    auto count_label0 = [](const core::Corpus& c) {
        std::size_t n = 0;
        for (const auto& s : c.samples) n += s.label == 0;
        return n;
    };
    CHECK(count_label0(splits.train) == 32);
    CHECK(count_label0(splits.val) == 4);
    CHECK(count_label0(splits.test) == 4);

    // partition: every id exactly once
    std::set<std::string> seen;
    for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
        for (const auto& s : part->samples) {
            CHECK(seen.insert(s.article.id).second);
        }
    }
    CHECK(seen.size() == 100);

    // same seed, same assignment; different seed, different assignment
    auto again = core::split_corpus(corpus, spec);
    CHECK(again.train == splits.train);
    CHECK(again.val == splits.val);
    CHECK(again.test == splits.test);

    core::SplitSpec other = spec;
    other.seed = 8;
    auto reshuffled = core::split_corpus(corpus, other);
    CHECK_FALSE(reshuffled.train == splits.train);
}

TEST_CASE("split rejects bad specs and tiny corpora") {
    core::Corpus corpus;
    corpus.samples.push_back(make_sample("a", 1, core::Provenance::original));
    corpus.samples.push_back(make_sample("b", 1, core::Provenance::original));

    core::SplitSpec spec;
    CHECK_THROWS_AS(core::split_corpus(corpus, spec), core::TooFewSamples);

    core::SplitSpec bad;
    bad.train_fraction = 0.9;
    bad.val_fraction = 0.2;
    bad.test_fraction = 0.1;
    CHECK_THROWS_AS(core::split_corpus(corpus, bad), core::SplitSpecError);

    core::SplitSpec zero;
    zero.train_fraction = 1.0;
    zero.val_fraction = 0.0;
    zero.test_fraction = 0.0;
    CHECK_THROWS_AS(core::split_corpus(corpus, zero), core::SplitSpecError);
}

TEST_CASE("corpus stats") {
    core::Corpus corpus;
    corpus.samples.push_back(make_sample("a", 1, core::Provenance::original));
    corpus.samples.back().article.body = "one two three";
    corpus.samples.push_back(make_sample("b", 0, core::Provenance::external));
    corpus.samples.back().article.body = "one two three four five";

    auto stats = core::corpus_stats(corpus, util::whitespace_token_count);
    CHECK(stats.count == 2);
    CHECK(stats.label0_count == 1);
    CHECK(stats.label1_count == 1);
    REQUIRE(stats.mean_token_length.has_value());
    CHECK(*stats.mean_token_length == doctest::Approx(4.0));

    auto empty_stats = core::corpus_stats(core::Corpus{}, util::whitespace_token_count);
    CHECK(empty_stats.count == 0);
    CHECK_FALSE(empty_stats.mean_token_length.has_value());
}

TEST_CASE("utility helpers") {
    CHECK(util::format_double(0.5) == "0.5");
    CHECK(util::format_double(1.0) == "1");
    CHECK(util::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(util::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

    auto sentences = util::split_sentences("First one. Second?! Third... and tail");
    REQUIRE(sentences.size() == 4);
    CHECK(sentences[0] == "First one.");
    CHECK(sentences[1] == "Second?!");
    CHECK(sentences[2] == "Third...");
    CHECK(sentences[3] == "and tail");

    CHECK(util::whitespace_token_count("  a  b\tc\n") == 3);
    CHECK(util::trim("  x  ") == "x");
    CHECK(util::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    auto url = util::parse_url("http://127.0.0.1:8080/v1/embeddings");
    CHECK(url.scheme == "http");
    CHECK(url.host == "127.0.0.1");
    CHECK(url.port == 8080);
    CHECK(url.path == "/v1/embeddings");
    auto bare = util::parse_url("https://example.test");
    CHECK(bare.port == 443);
    CHECK(bare.path == "/");
    CHECK_THROWS_AS(util::parse_url("ftp://x"), std::invalid_argument);
}
