#pragma once

// Three-phase corpus construction: (1) identify the frame of a factual
// article and extract its four framing elements (label 1), (2) rewrite the
// article under a different frame while keeping the facts, (3) extract the
// elements of the rewritten text (label 0). Generation goes through a
// pluggable LlmClient; every completion is cached, retried on transient
// failure and quarantined (never silently dropped) when it keeps failing.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "femkit/core.hpp"
#include "femkit/errors.hpp"

namespace femkit::augment {

FEMKIT_DEFINE_ERROR(ClientError, "client_error");           // transport, quota, 5xx
FEMKIT_DEFINE_ERROR(ParseError, "parse_error");             // completion not in required form
FEMKIT_DEFINE_ERROR(DegenerateOutput, "degenerate_output"); // rewrite too short to be a narrative
FEMKIT_DEFINE_ERROR(PromptError, "prompt_error");           // template problems
FEMKIT_DEFINE_ERROR(FrameChoiceError, "frame_choice_error");
FEMKIT_DEFINE_ERROR(PipelineError, "pipeline_error");       // success rate under the floor

struct GenerationParams {
    double temperature = 0.0;
    std::size_t max_output_tokens = 2048;
    std::optional<std::uint64_t> seed;

    // Stable serialization, part of completion cache keys.
    std::string cache_token() const;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt, const GenerationParams& params) = 0;
    virtual std::string name() const = 0;
};

// Text with {placeholder} slots. Placeholders are lowercase identifiers in
// braces; JSON examples in the template body do not match that shape and
// pass through untouched.
struct PromptTemplate {
    std::string name;
    int version = 1;
    std::string text;

    // Throws PromptError if a placeholder is unbound or a bound key is unused.
    std::string render(const std::map<std::string, std::string>& values) const;
};

// The three pipeline templates. Loaded from "<dir>/<name>.v<version>.txt"
// when dir is given, otherwise the built-in copies (kept in sync with the
// prompts/ directory of the source tree) are used.
struct PromptSet {
    PromptTemplate identify;
    PromptTemplate alter;
    PromptTemplate extract;
};

PromptTemplate load_template(const std::string& name, int version, const std::string& dir);
PromptSet load_prompts(const std::string& dir = "");
const PromptSet& builtin_prompts();

// Directory-backed completion cache addressed by content hash of
// (template version, rendered prompt, generation params). Values are raw
// completion bytes; the entry timestamp is the file mtime. Writers use
// rename so concurrent readers never observe partial entries.
class CompletionCache {
public:
    explicit CompletionCache(std::string dir);

    static std::string key(int template_version, const std::string& prompt,
                           const GenerationParams& params);
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value) const;

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

// Token-bucket rate limiter. rate_per_sec == 0 disables limiting. The clock
// is injectable so refill behaviour is testable without real sleeping.
class TokenBucket {
public:
    using Clock = std::function<double()>; // monotonic seconds

    TokenBucket(double rate_per_sec, double burst, Clock clock = {});

    bool try_acquire();
    // 0 when a token is available now.
    double seconds_until_token();
    // Blocks (sleeping) until a token is taken.
    void acquire();

private:
    void refill_locked();

    std::mutex mu_;
    double rate_;
    double burst_;
    double tokens_;
    double last_;
    Clock clock_;
};

// Rule-based client: a pure function of (prompt, params). Responds to the
// TASK marker each template carries. Frame identification picks the first
// vocabulary word (taken from the prompt's own choice list) found in the
// article, element extraction returns the first four sentences in slot
// order, frame alteration prefixes every sentence with a frame-specific
// interjection. Faults can be injected per prompt substring for tests.
class MockLlmClient : public LlmClient {
public:
    std::string complete(const std::string& prompt, const GenerationParams& params) override;
    std::string name() const override { return "mock"; }

    // kind: "client" throws ClientError, "parse" returns non-JSON output,
    // "degenerate" returns a two-word completion. times < 0 means always.
    void fail_when(const std::string& prompt_substring, const std::string& kind, int times);

    int call_count() const;
    std::vector<std::string> prompts_seen() const;

    static std::string alteration_prefix(const std::string& frame);

private:
    struct Fault {
        std::string needle;
        std::string kind;
        int remaining;
    };

    mutable std::mutex mu_;
    std::vector<Fault> faults_;
    int calls_ = 0;
    std::vector<std::string> prompts_;
};

// Chat-completions HTTP client; see http_client.cpp for the wire format.
// Environment: FEMKIT_LLM_ENDPOINT (required), FEMKIT_LLM_API_KEY,
// FEMKIT_LLM_MODEL.
std::unique_ptr<LlmClient> make_http_client();

struct RetryPolicy {
    int client_error_attempts = 3; // total tries on ClientError, exponential backoff
    int parse_reprompts = 2;       // extra tries on ParseError/DegenerateOutput
    double backoff_initial_ms = 50.0;
};

struct PipelineConfig {
    std::vector<std::string> frame_vocabulary = {"political", "semantic", "economic",
                                                 "human-interest"};
    RetryPolicy retry;
    std::string cache_dir;   // empty: no cache
    std::string prompts_dir; // empty: built-ins
    double success_floor = 0.5;
    // Rewrites shorter than this fraction of the source token count are
    // degenerate.
    double min_length_fraction = 0.2;
    std::size_t max_in_flight = 4;
    double requests_per_sec = 0.0; // 0: unlimited
    double extract_temperature = 0.0;
    double alter_temperature = 0.8;
    std::uint64_t seed = 0;
};

struct QuarantineRecord {
    std::string article_id;
    std::string phase; // "identify" | "alter" | "extract"
    std::string error; // error code plus message
    int attempts = 0;
};

struct PipelineResult {
    core::Corpus corpus;
    std::vector<QuarantineRecord> quarantined;
    std::size_t article_count = 0;

    // Emitted samples over the 2-per-article maximum.
    double success_rate() const {
        return article_count == 0
                   ? 0.0
                   : static_cast<double>(corpus.samples.size()) /
                         static_cast<double>(2 * article_count);
    }
};

class Augmenter {
public:
    Augmenter(LlmClient& client, PipelineConfig config);

    const PipelineConfig& config() const { return config_; }

    // attempts_out, when given, receives the number of client calls the
    // operation made (0 on a cache hit), including calls that failed.
    std::pair<std::string, core::FrameElementSet> identify_frame_and_elements(
        const core::Article& article, int* attempts_out = nullptr);

    // Precondition: target_frame is in the vocabulary and differs from the
    // article's current frame. The result keeps title/source/topic, gets
    // id "<original>-alt" and frame_label target_frame.
    core::Article alter_frame(const core::Article& article, const std::string& target_frame,
                              int* attempts_out = nullptr);

    core::FrameElementSet extract_elements(const core::Article& article,
                                           int* attempts_out = nullptr);

    // The deterministic frame the pipeline rewrites into: the vocabulary
    // entry after the current one, cyclically.
    std::string pick_target_frame(const std::string& current_frame) const;

    // Runs all three phases over every article (concurrently up to
    // max_in_flight, output in input order) and never throws on per-article
    // failures; those end up quarantined.
    PipelineResult run(const std::vector<core::Article>& articles);

    // run(), then PipelineError when the success rate is under the floor.
    PipelineResult build_paired_corpus(const std::vector<core::Article>& articles);

private:
    std::string complete_op(const PromptTemplate& tmpl, const std::string& prompt,
                            const GenerationParams& base_params,
                            const std::function<void(const std::string&)>& validate,
                            int& attempts_out);

    LlmClient& client_;
    PipelineConfig config_;
    PromptSet prompts_;
    std::optional<CompletionCache> cache_;
    TokenBucket limiter_;
};

void write_quarantine_manifest(const std::vector<QuarantineRecord>& records,
                               const std::string& path);
std::vector<QuarantineRecord> load_quarantine_manifest(const std::string& path);

// Deterministic, topic-stratified sample of altered articles written as a
// human-readable review file. Returns the number of samples exported.
std::size_t export_review_sample(const core::Corpus& corpus, double fraction,
                                 std::uint64_t seed, const std::string& path);

} // namespace femkit::augment
