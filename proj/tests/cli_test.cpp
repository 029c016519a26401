#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "femkit/util.hpp"

// End-to-end tests that spawn the installed binary, exactly as a user would.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    std::string path;
    TempDir() {
        path = (fs::temp_directory_path() /
                ("femkit-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++)))
                   .string();
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: ", path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;

    json error_json() const {
        auto parsed = json::parse(err, nullptr, false);
        REQUIRE_MESSAGE(!parsed.is_discarded(), "stderr is not JSON: ", err);
        REQUIRE(parsed.contains("error"));
        return parsed["error"];
    }
};

CliResult run_cli(const std::string& args, const TempDir& scratch,
                  const std::string& extra_env = "") {
    const std::string out_file = scratch.path + "/cli-stdout.txt";
    const std::string err_file = scratch.path + "/cli-stderr.txt";
    const std::string command = extra_env + (extra_env.empty() ? "" : " ") + FEMKIT_BIN_PATH +
                                " " + args + " >'" + out_file + "' 2>'" + err_file + "'";
    const int status = std::system(command.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

// Six four-sentence articles with enough body for the degeneracy check; the
// leading keyword pins each one's identified frame under the mock client.
void write_articles(const std::string& path) {
    static const char* bodies[] = {
        "Political leaders moved the water reform bill forward this week. The council said the "
        "plan would change how assets are owned. Officials argued the community would benefit "
        "from scale. Critics asked for more consultation time before any transfer.",
        "The semantic dispute over the reform name continued through the hearing. Supporters "
        "framed the plan as modernisation of aging pipes. Opponents called the wording "
        "misleading in public materials. Both sides agreed the bill text needed definitions.",
        "An economic review estimated the upgrade bill at nine billion dollars. Ratepayers "
        "would face higher charges without central funding support. The report compared costs "
        "across four regional entities. Analysts said borrowing capacity was the deciding "
        "factor.",
        "Political tension rose as the minister defended the entity model. Mayors from several "
        "districts signed a joint letter of concern. The government promised local voices on "
        "the new boards. A vote is expected before the end of the session.",
        "The semantic framing of ownership dominated radio coverage all morning. Callers "
        "disputed what public control would mean in practice. A law professor explained the "
        "difference between ownership and governance. The station invited listeners to read "
        "the bill themselves.",
        "Economic modelling showed rates rising fastest in small districts. The analysis "
        "assumed no change to current debt limits. Treasury officials disputed two of the "
        "model assumptions. Local finance teams asked for the full spreadsheet.",
    };
    std::ofstream out(path, std::ios::binary);
    for (std::size_t i = 0; i < 6; ++i) {
        json j{{"id", "w" + std::to_string(i + 1)},
               {"body", bodies[i]},
               {"topic", i < 4 ? "water" : "drought"}};
        out << j.dump() << "\n";
    }
}

// A linearly separable corpus: the two labels use disjoint vocabularies, so
// any encoder segment splits them.
void write_separable_corpus(const std::string& path, std::size_t per_label = 10) {
    std::ofstream out(path, std::ios::binary);
    for (std::size_t i = 0; i < per_label; ++i) {
        const auto n = std::to_string(i);
        json pos{{"id", "pos" + n},
                 {"body", "clean river data shows steady reliable flow sample " + n},
                 {"label", 1},
                 {"provenance", "external"},
                 {"elements",
                  {{"problem_definition", "steady supply alpha beta stable " + n},
                   {"causal_interpretation", "regular rain"},
                   {"moral_evaluation", "fair reporting"},
                   {"treatment_recommendation", "keep monitoring"}}}};
        json neg{{"id", "neg" + n},
                 {"body", "murky claim spreads fast online without checks sample " + n},
                 {"label", 0},
                 {"provenance", "external"},
                 {"elements",
                  {{"problem_definition", "invented crisis gamma delta panic " + n},
                   {"causal_interpretation", "hidden plot"},
                   {"moral_evaluation", "outrage bait"},
                   {"treatment_recommendation", "share widely"}}}};
        out << pos.dump() << "\n" << neg.dump() << "\n";
    }
}

void write_config(const std::string& path) {
    json cfg{{"schema_version", 1},
             {"seed", 11},
             {"encoder", "hashing:64"},
             {"model",
              {{"hidden_dim", 12},
               {"epochs", 30},
               {"batch_size", 4},
               {"dropout", 0.1},
               {"peak_lr", 0.02}}},
             {"split",
              {{"train_fraction", 0.7}, {"val_fraction", 0.15}, {"test_fraction", 0.15}}}};
    std::ofstream out(path, std::ios::binary);
    out << cfg.dump(2) << "\n";
}

} // namespace

TEST_CASE("augment is deterministic and writes the full artifact set") {
    TempDir dir;
    write_articles(dir.path + "/articles.jsonl");
    const auto args = [&](const std::string& out) {
        return "augment --input '" + dir.path + "/articles.jsonl' --output '" + dir.path + "/" +
               out + "' --seed 9 --client mock";
    };
    auto first = run_cli(args("a"), dir);
    CHECK(first.exit_code == 0);
    CHECK(first.out.find("6 articles -> 12 samples") != std::string::npos);
    auto second = run_cli(args("b"), dir);
    CHECK(second.exit_code == 0);

    for (const char* name : {"corpus.jsonl", "quarantine.jsonl", "review_sample.md",
                             "augment_stats.json"})
        CHECK_MESSAGE(slurp(dir.path + "/a/" + name) == slurp(dir.path + "/b/" + name),
                      "artifact differs between identical runs: ", name);

    const auto manifest = json::parse(slurp(dir.path + "/a/manifest.json"));
    CHECK(manifest["command"] == "augment");
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["inputs"][dir.path + "/articles.jsonl"] ==
          femkit::util::sha256_file(dir.path + "/articles.jsonl"));
    CHECK(manifest["outputs"].size() == 4);
}

TEST_CASE("missing input exits 1 with machine-readable error JSON") {
    TempDir dir;
    auto r = run_cli("augment --input '" + dir.path + "/nope.jsonl' --output '" + dir.path +
                         "/out' --seed 1",
                     dir);
    CHECK(r.exit_code == 1);
    const auto error = r.error_json();
    CHECK(error["code"] == "config_error");
    CHECK(error["message"].get<std::string>().find("nope.jsonl") != std::string::npos);
    CHECK(!fs::exists(dir.path + "/out"));
}

TEST_CASE("http client without credentials refuses at startup, no partial output") {
    TempDir dir;
    write_articles(dir.path + "/articles.jsonl");
    const std::string args = "augment --input '" + dir.path + "/articles.jsonl' --output '" +
                             dir.path + "/out' --seed 1 --client http";

    auto no_endpoint = run_cli(args, dir, "env -u FEMKIT_LLM_ENDPOINT -u FEMKIT_LLM_API_KEY");
    CHECK(no_endpoint.exit_code == 1);
    CHECK(no_endpoint.error_json()["code"] == "client_error");

    auto no_key = run_cli(args, dir,
                          "env -u FEMKIT_LLM_API_KEY FEMKIT_LLM_ENDPOINT=http://localhost:1/");
    CHECK(no_key.exit_code == 1);
    CHECK(no_key.error_json()["message"].get<std::string>().find("FEMKIT_LLM_API_KEY") !=
          std::string::npos);
    CHECK(!fs::exists(dir.path + "/out"));
}

TEST_CASE("augment under the success floor exits 2 but keeps the quarantine evidence") {
    TempDir dir;
    {
        std::ofstream out(dir.path + "/articles.jsonl", std::ios::binary);
        out << json{{"id", "e1"}, {"body", "   "}}.dump() << "\n";
    }
    auto r = run_cli("augment --input '" + dir.path + "/articles.jsonl' --output '" + dir.path +
                         "/out' --seed 1",
                     dir);
    CHECK(r.exit_code == 2);
    CHECK(r.error_json()["code"] == "pipeline_error");
    const auto quarantine = slurp(dir.path + "/out/quarantine.jsonl");
    CHECK(quarantine.find("\"e1\"") != std::string::npos);
    CHECK(quarantine.find("identify") != std::string::npos);
}

TEST_CASE("train then evaluate reaches F1 >= 0.95 on a separable corpus") {
    TempDir dir;
    write_separable_corpus(dir.path + "/corpus.jsonl");
    write_config(dir.path + "/cfg.json");
    const std::string common = " --config '" + dir.path + "/cfg.json' --output '" + dir.path +
                               "/run'";

    auto trained = run_cli("train --input '" + dir.path + "/corpus.jsonl'" + common, dir);
    CHECK(trained.exit_code == 0);
    CHECK(fs::exists(dir.path + "/run/checkpoint/weights.bin"));
    const auto summary = json::parse(slurp(dir.path + "/run/train_summary.json"));
    CHECK(summary["status"] == "completed");

    auto evaluated = run_cli("evaluate --input '" + dir.path + "/corpus.jsonl'" + common, dir);
    CHECK(evaluated.exit_code == 0);
    const auto metrics = json::parse(slurp(dir.path + "/run/metrics.json"));
    REQUIRE(metrics["f1"].is_number());
    CHECK(metrics["f1"].get<double>() >= 0.95);
    CHECK(metrics["counts"]["tp"].get<int>() + metrics["counts"]["fn"].get<int>() == 10);

    // Same seed, same inputs: the checkpoint weights and summary reproduce.
    auto again = run_cli("train --input '" + dir.path + "/corpus.jsonl' --config '" + dir.path +
                             "/cfg.json' --output '" + dir.path + "/run2'",
                         dir);
    CHECK(again.exit_code == 0);
    CHECK(slurp(dir.path + "/run/checkpoint/weights.bin") ==
          slurp(dir.path + "/run2/checkpoint/weights.bin"));
    CHECK(slurp(dir.path + "/run/train_summary.json") ==
          slurp(dir.path + "/run2/train_summary.json"));
}

TEST_CASE("ablate with the default plan writes a seven-row table") {
    TempDir dir;
    write_separable_corpus(dir.path + "/corpus.jsonl");
    write_config(dir.path + "/cfg.json");
    auto r = run_cli("ablate --input '" + dir.path + "/corpus.jsonl' --plan default --config '" +
                         dir.path + "/cfg.json' --output '" + dir.path + "/run'",
                     dir);
    CHECK(r.exit_code == 0);
    const auto csv = slurp(dir.path + "/run/ablation.csv");
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 8); // header + seven configurations
    CHECK(csv.find("full,11111") != std::string::npos);
    CHECK(csv.find("elements-only,01111") != std::string::npos);
    CHECK(fs::exists(dir.path + "/run/f1_by_epoch.svg"));

    auto bad = run_cli("ablate --input '" + dir.path + "/corpus.jsonl' --plan nope --config '" +
                           dir.path + "/cfg.json' --output '" + dir.path + "/run'",
                       dir);
    CHECK(bad.exit_code == 1);
}

TEST_CASE("similarity fixture mode reproduces the bundled six-row table offline") {
    TempDir dir;
    auto r = run_cli("similarity --fixtures table6 --output '" + dir.path + "/fix' --seed 1",
                     dir);
    CHECK(r.exit_code == 0);
    const auto csv = slurp(dir.path + "/fix/similarity.csv");
    CHECK(csv.find("article,10000,1,0.86,0.86,0.8474") != std::string::npos);
    CHECK(csv.find("all-elements,01111,1,0.61,,0.9478") != std::string::npos);
    CHECK(csv.find("minus-problem,00111,1,0.79,,0.9046") != std::string::npos);
    CHECK(csv.find("minus-causal,01011,1,0.62,,0.9454") != std::string::npos);
    CHECK(csv.find("minus-moral,01101,1,0.81,,0.9065") != std::string::npos);
    CHECK(csv.find("minus-treatment,01110,1,0.64,,0.9354") != std::string::npos);

    const auto doc = json::parse(slurp(dir.path + "/fix/similarity.json"));
    REQUIRE(doc["similarity_f1_spearman"].is_number());
    CHECK(doc["similarity_f1_spearman"].get<double>() < 0.0);

    auto unknown = run_cli("similarity --fixtures nope --output '" + dir.path + "/fix' --seed 1",
                           dir);
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.error_json()["code"] == "fixture_error");
}

TEST_CASE("compare works on two articles and in fixture mode") {
    TempDir dir;
    write_articles(dir.path + "/articles.jsonl");
    write_separable_corpus(dir.path + "/corpus.jsonl");
    write_config(dir.path + "/cfg.json");
    const std::string common = " --config '" + dir.path + "/cfg.json' --output '" + dir.path +
                               "/run'";
    REQUIRE(run_cli("train --input '" + dir.path + "/corpus.jsonl'" + common, dir).exit_code ==
            0);

    auto r = run_cli("compare --input '" + dir.path +
                         "/articles.jsonl' --id-a w1 --id-b w2" + common,
                     dir);
    CHECK(r.exit_code == 0);
    const auto doc = json::parse(slurp(dir.path + "/run/case.json"));
    CHECK(doc["a"]["id"] == "w1");
    CHECK(doc["b"]["id"] == "w2");
    CHECK(doc["body_similarity"].is_number());
    CHECK(doc["a"]["elements"]["problem_definition"].is_string());

    auto fixture = run_cli("compare --fixtures case --output '" + dir.path + "/fix' --seed 1",
                           dir);
    CHECK(fixture.exit_code == 0);
    CHECK(json::parse(slurp(dir.path + "/fix/fixtures.json")).contains("case_pair"));

    auto missing = run_cli("compare --input '" + dir.path +
                               "/articles.jsonl' --id-a w1 --id-b ghost" + common,
                           dir);
    CHECK(missing.exit_code == 1);
}

TEST_CASE("report consolidates a run directory and rejects an empty one") {
    TempDir dir;
    write_separable_corpus(dir.path + "/corpus.jsonl");
    write_config(dir.path + "/cfg.json");
    const std::string common = " --config '" + dir.path + "/cfg.json' --output '" + dir.path +
                               "/run'";
    REQUIRE(run_cli("train --input '" + dir.path + "/corpus.jsonl'" + common, dir).exit_code ==
            0);
    REQUIRE(run_cli("evaluate --input '" + dir.path + "/corpus.jsonl'" + common, dir)
                .exit_code == 0);

    auto r = run_cli("report" + common, dir);
    CHECK(r.exit_code == 0);
    const auto md = slurp(dir.path + "/run/report.md");
    CHECK(md.find("## Training") != std::string::npos);
    CHECK(md.find("## Evaluation") != std::string::npos);
    CHECK(slurp(dir.path + "/run/report.html").find("</html>") != std::string::npos);

    fs::create_directories(dir.path + "/empty");
    auto empty = run_cli("report --output '" + dir.path + "/empty' --seed 1", dir);
    CHECK(empty.exit_code == 1);
    CHECK(empty.error_json()["code"] == "missing_artifacts");
}

TEST_CASE("seed is mandatory and bad usage exits 1") {
    TempDir dir;
    write_articles(dir.path + "/articles.jsonl");
    auto no_seed = run_cli("augment --input '" + dir.path + "/articles.jsonl' --output '" +
                               dir.path + "/out'",
                           dir);
    CHECK(no_seed.exit_code == 1);
    CHECK(no_seed.error_json()["message"].get<std::string>().find("seed") != std::string::npos);

    auto no_command = run_cli("", dir);
    CHECK(no_command.exit_code == 1);
    CHECK(no_command.error_json()["code"] == "usage");
}
