#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "femkit/augment.hpp"
#include "femkit/util.hpp"

namespace femkit::augment {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (const auto& part : parts) {
        if (!out.empty()) out += sep;
        out += part;
    }
    return out;
}

// Accepts completions that wrap the JSON object in prose; anything without a
// parseable top-level object is a ParseError.
nlohmann::json parse_json_object(const std::string& completion) {
    const auto open = completion.find('{');
    const auto close = completion.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("completion contains no JSON object");
    try {
        auto parsed = nlohmann::json::parse(completion.substr(open, close - open + 1));
        if (!parsed.is_object()) throw ParseError("completion is not a JSON object");
        return parsed;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("completion is not valid JSON: ") + e.what());
    }
}

// The element prompts demand exactly the four fixed keys, each a string or
// null.
core::FrameElementSet elements_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("\"elements\" is not a JSON object");
    const auto& names = core::FrameElementSet::names();
    if (j.size() != names.size())
        throw ParseError("\"elements\" must have exactly the four element keys");
    core::FrameElementSet out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string key(names[i]);
        auto it = j.find(key);
        if (it == j.end()) throw ParseError("\"elements\" is missing key \"" + key + "\"");
        if (it->is_null()) continue;
        if (!it->is_string())
            throw ParseError("element \"" + key + "\" must be a string or null");
        const std::string text = util::trim(it->get<std::string>());
        if (text.empty()) continue;
        out.at(i) = core::FrameElement{text, true};
    }
    return out;
}

std::uint64_t op_seed(std::uint64_t base, const std::string& article_id,
                      const std::string& phase) {
    return base ^ util::fnv1a64(article_id + "\x1f" + phase);
}

std::string describe(const Error& e) { return std::string(e.code()) + ": " + e.what(); }

} // namespace

Augmenter::Augmenter(LlmClient& client, PipelineConfig config)
    : client_(client),
      config_(std::move(config)),
      prompts_(load_prompts(config_.prompts_dir)),
      limiter_(config_.requests_per_sec,
               config_.requests_per_sec > 0 ? std::max(1.0, config_.requests_per_sec) : 1.0) {
    if (config_.frame_vocabulary.size() < 2)
        throw FrameChoiceError("frame vocabulary needs at least two frames to rewrite into");
    for (const auto& frame : config_.frame_vocabulary)
        if (util::trim(frame).empty()) throw FrameChoiceError("frame vocabulary entry is blank");
    if (config_.min_length_fraction < 0 || config_.min_length_fraction >= 1)
        throw std::invalid_argument("min_length_fraction must be in [0, 1)");
    if (config_.success_floor < 0 || config_.success_floor > 1)
        throw std::invalid_argument("success_floor must be in [0, 1]");
    if (config_.max_in_flight == 0) config_.max_in_flight = 1;
    if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

// Shared retry/cache envelope for one operation. Re-prompts (after
// ParseError/DegenerateOutput) bump the seed so they get a fresh cache slot,
// and they skip the cache read so a bad cached completion cannot wedge the
// pipeline. attempts_out counts client calls, cache hits count zero.
std::string Augmenter::complete_op(const PromptTemplate& tmpl, const std::string& prompt,
                                   const GenerationParams& base_params,
                                   const std::function<void(const std::string&)>& validate,
                                   int& attempts_out) {
    attempts_out = 0;
    const int parse_tries = 1 + std::max(0, config_.retry.parse_reprompts);
    const int client_tries = std::max(1, config_.retry.client_error_attempts);

    for (int parse_attempt = 0;; ++parse_attempt) {
        GenerationParams params = base_params;
        if (parse_attempt > 0 && params.seed) *params.seed += static_cast<std::uint64_t>(parse_attempt);

        const std::string key =
            cache_ ? CompletionCache::key(tmpl.version, prompt, params) : std::string();

        std::string text;
        bool from_cache = false;
        if (cache_ && parse_attempt == 0) {
            if (auto hit = cache_->get(key)) {
                text = *hit;
                from_cache = true;
            }
        }

        if (!from_cache) {
            for (int client_attempt = 0;; ++client_attempt) {
                limiter_.acquire();
                ++attempts_out;
                try {
                    text = client_.complete(prompt, params);
                    break;
                } catch (const ClientError&) {
                    if (client_attempt + 1 >= client_tries) throw;
                    const double ms =
                        config_.retry.backoff_initial_ms * std::pow(2.0, client_attempt);
                    if (ms > 0)
                        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
                }
            }
            if (cache_) cache_->put(key, text);
        }

        try {
            validate(text);
            return text;
        } catch (const Error& e) {
            const bool retryable = e.code() == "parse_error" || e.code() == "degenerate_output";
            if (!retryable || parse_attempt + 1 >= parse_tries) throw;
        }
    }
}

std::pair<std::string, core::FrameElementSet> Augmenter::identify_frame_and_elements(
    const core::Article& article, int* attempts_out) {
    if (util::trim(article.body).empty())
        throw core::EmptyBody("article " + article.id + " has an empty body");

    const std::string prompt = prompts_.identify.render({
        {"frames", join(config_.frame_vocabulary, ", ")},
        {"body", article.body},
    });
    GenerationParams params;
    params.temperature = config_.extract_temperature;
    params.seed = op_seed(config_.seed, article.id, "identify");

    std::string frame;
    core::FrameElementSet elements;
    auto validate = [&](const std::string& text) {
        auto j = parse_json_object(text);
        if (!j.contains("frame") || !j["frame"].is_string())
            throw ParseError("completion is missing a \"frame\" string");
        const std::string candidate = j["frame"].get<std::string>();
        const auto& vocab = config_.frame_vocabulary;
        if (std::find(vocab.begin(), vocab.end(), candidate) == vocab.end())
            throw ParseError("frame \"" + candidate + "\" is not in the vocabulary");
        if (!j.contains("elements")) throw ParseError("completion is missing \"elements\"");
        frame = candidate;
        elements = elements_from_json(j["elements"]);
    };

    int attempts = 0;
    try {
        complete_op(prompts_.identify, prompt, params, validate, attempts);
    } catch (...) {
        if (attempts_out) *attempts_out = attempts;
        throw;
    }
    if (attempts_out) *attempts_out = attempts;
    return {frame, elements};
}

core::Article Augmenter::alter_frame(const core::Article& article,
                                     const std::string& target_frame, int* attempts_out) {
    if (util::trim(article.body).empty())
        throw core::EmptyBody("article " + article.id + " has an empty body");
    const auto& vocab = config_.frame_vocabulary;
    if (std::find(vocab.begin(), vocab.end(), target_frame) == vocab.end())
        throw FrameChoiceError("target frame \"" + target_frame + "\" is not in the vocabulary");
    if (article.frame_label && *article.frame_label == target_frame)
        throw FrameChoiceError("article " + article.id + " is already framed as \"" +
                               target_frame + "\"");

    const std::string prompt = prompts_.alter.render({
        {"frame", target_frame},
        {"body", article.body},
    });
    GenerationParams params;
    params.temperature = config_.alter_temperature;
    params.seed = op_seed(config_.seed, article.id, "alter");

    const std::size_t original_tokens = util::whitespace_token_count(article.body);
    auto validate = [&](const std::string& text) {
        const std::string trimmed = util::trim(text);
        if (trimmed.empty()) throw DegenerateOutput("rewrite is empty");
        const auto tokens = util::whitespace_token_count(trimmed);
        const double floor = config_.min_length_fraction * static_cast<double>(original_tokens);
        if (static_cast<double>(tokens) < floor)
            throw DegenerateOutput("rewrite has " + std::to_string(tokens) + " tokens, under " +
                                   std::to_string(floor) + " for this article");
    };

    int attempts = 0;
    std::string text;
    try {
        text = complete_op(prompts_.alter, prompt, params, validate, attempts);
    } catch (...) {
        if (attempts_out) *attempts_out = attempts;
        throw;
    }
    if (attempts_out) *attempts_out = attempts;

    core::Article altered = article;
    altered.id = article.id + "-alt";
    altered.body = util::trim(text);
    altered.frame_label = target_frame;
    return altered;
}

core::FrameElementSet Augmenter::extract_elements(const core::Article& article,
                                                  int* attempts_out) {
    if (util::trim(article.body).empty())
        throw core::EmptyBody("article " + article.id + " has an empty body");

    const std::string prompt = prompts_.extract.render({{"body", article.body}});
    GenerationParams params;
    params.temperature = config_.extract_temperature;
    params.seed = op_seed(config_.seed, article.id, "extract");

    core::FrameElementSet elements;
    auto validate = [&](const std::string& text) {
        auto j = parse_json_object(text);
        if (!j.contains("elements")) throw ParseError("completion is missing \"elements\"");
        elements = elements_from_json(j["elements"]);
    };

    int attempts = 0;
    try {
        complete_op(prompts_.extract, prompt, params, validate, attempts);
    } catch (...) {
        if (attempts_out) *attempts_out = attempts;
        throw;
    }
    if (attempts_out) *attempts_out = attempts;
    return elements;
}

std::string Augmenter::pick_target_frame(const std::string& current_frame) const {
    const auto& vocab = config_.frame_vocabulary;
    auto it = std::find(vocab.begin(), vocab.end(), current_frame);
    if (it == vocab.end())
        throw FrameChoiceError("frame \"" + current_frame + "\" is not in the vocabulary");
    ++it;
    return it == vocab.end() ? vocab.front() : *it;
}

PipelineResult Augmenter::run(const std::vector<core::Article>& articles) {
    const std::size_t n = articles.size();
    std::vector<std::optional<core::LabeledSample>> kept(n), altered(n);
    std::vector<std::optional<QuarantineRecord>> quarantined(n);

    auto process = [&](std::size_t i) {
        const core::Article& article = articles[i];
        std::string phase = "identify";
        int attempts = 0;
        try {
            auto [frame, elements] = identify_frame_and_elements(article, &attempts);
            core::Article original = article;
            original.frame_label = frame;

            core::LabeledSample keep;
            keep.article = original;
            keep.elements = elements;
            keep.label = 1;
            keep.provenance = core::Provenance::original;
            kept[i] = std::move(keep);

            phase = "alter";
            const std::string target = pick_target_frame(frame);
            core::Article rewritten = alter_frame(original, target, &attempts);

            phase = "extract";
            core::FrameElementSet rewritten_elements = extract_elements(rewritten, &attempts);

            core::LabeledSample mis;
            mis.article = std::move(rewritten);
            mis.elements = std::move(rewritten_elements);
            mis.label = 0;
            mis.provenance = core::Provenance::altered;
            mis.source_id = article.id;
            altered[i] = std::move(mis);
        } catch (const Error& e) {
            quarantined[i] = QuarantineRecord{article.id, phase, describe(e), attempts};
            if (phase == "identify") kept[i].reset();
        } catch (const std::exception& e) {
            quarantined[i] = QuarantineRecord{article.id, phase,
                                              std::string("unexpected: ") + e.what(), attempts};
            if (phase == "identify") kept[i].reset();
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config_.max_in_flight, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    process(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    PipelineResult result;
    result.article_count = n;
    result.corpus.name = "paired";
    for (std::size_t i = 0; i < n; ++i) {
        if (kept[i]) result.corpus.samples.push_back(std::move(*kept[i]));
        if (altered[i]) result.corpus.samples.push_back(std::move(*altered[i]));
        if (quarantined[i]) result.quarantined.push_back(std::move(*quarantined[i]));
    }
    return result;
}

PipelineResult Augmenter::build_paired_corpus(const std::vector<core::Article>& articles) {
    PipelineResult result = run(articles);
    if (!articles.empty() && result.success_rate() < config_.success_floor) {
        std::ostringstream msg;
        msg << "augmentation succeeded for " << result.corpus.samples.size() << " of "
            << 2 * articles.size() << " samples (rate " << util::format_double(result.success_rate())
            << ", floor " << util::format_double(config_.success_floor) << ")";
        throw PipelineError(msg.str());
    }
    return result;
}

void write_quarantine_manifest(const std::vector<QuarantineRecord>& records,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw core::IoError("cannot write quarantine manifest " + path);
    for (const auto& record : records) {
        nlohmann::json j{{"article_id", record.article_id},
                         {"phase", record.phase},
                         {"error", record.error},
                         {"attempts", record.attempts}};
        out << j.dump() << "\n";
    }
}

std::vector<QuarantineRecord> load_quarantine_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw core::IoError("cannot read quarantine manifest " + path);
    std::vector<QuarantineRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            records.push_back(QuarantineRecord{j.at("article_id").get<std::string>(),
                                               j.at("phase").get<std::string>(),
                                               j.at("error").get<std::string>(),
                                               j.at("attempts").get<int>()});
        } catch (const nlohmann::json::exception& e) {
            throw core::SchemaError(line_no, e.what());
        }
    }
    return records;
}

std::size_t export_review_sample(const core::Corpus& corpus, double fraction, std::uint64_t seed,
                                 const std::string& path) {
    if (fraction < 0 || fraction > 1)
        throw std::invalid_argument("review fraction must be in [0, 1]");

    std::vector<std::size_t> altered;
    for (std::size_t i = 0; i < corpus.samples.size(); ++i)
        if (corpus.samples[i].provenance == core::Provenance::altered) altered.push_back(i);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw core::IoError("cannot write review sample " + path);

    std::size_t want = 0;
    if (!altered.empty() && fraction > 0) {
        want = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(altered.size())));
        want = std::clamp<std::size_t>(want, 1, altered.size());
    }

    // Stratify by topic: floor quotas first, leftovers by largest remainder
    // (topic order breaks ties), a seeded shuffle picks within each topic.
    std::map<std::string, std::vector<std::size_t>> by_topic;
    for (std::size_t idx : altered)
        by_topic[corpus.samples[idx].article.topic.value_or("")].push_back(idx);

    std::vector<std::pair<std::string, double>> remainders;
    std::map<std::string, std::size_t> quota;
    std::size_t assigned = 0;
    for (const auto& [topic, members] : by_topic) {
        const double share = fraction * static_cast<double>(members.size());
        quota[topic] = std::min<std::size_t>(static_cast<std::size_t>(share), members.size());
        assigned += quota[topic];
        remainders.emplace_back(topic, share - static_cast<double>(quota[topic]));
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [topic, rem] : remainders) {
        (void)rem;
        if (assigned >= want) break;
        if (quota[topic] < by_topic[topic].size()) {
            ++quota[topic];
            ++assigned;
        }
    }
    // Rounding can leave a shortfall when every high-remainder topic is
    // exhausted; sweep the rest in topic order.
    for (auto& [topic, members] : by_topic) {
        while (assigned < want && quota[topic] < members.size()) {
            ++quota[topic];
            ++assigned;
        }
    }

    std::vector<std::size_t> chosen;
    for (auto& [topic, members] : by_topic) {
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(seed ^ util::fnv1a64(topic));
        util::deterministic_shuffle(order, rng);
        for (std::size_t k = 0; k < quota[topic]; ++k) chosen.push_back(members[order[k]]);
    }
    std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
        return corpus.samples[a].article.id < corpus.samples[b].article.id;
    });

    out << "# Review sample: " << chosen.size() << " of " << altered.size()
        << " altered articles\n";
    for (std::size_t idx : chosen) {
        const auto& sample = corpus.samples[idx];
        out << "\n## " << sample.article.id;
        if (sample.article.topic) out << " (topic: " << *sample.article.topic << ")";
        out << "\n";
        if (sample.source_id) out << "source: " << *sample.source_id << "\n";
        if (sample.article.frame_label) out << "frame: " << *sample.article.frame_label << "\n";
        out << "\n" << sample.article.body << "\n";
        const auto& names = core::FrameElementSet::names();
        for (std::size_t e = 0; e < names.size(); ++e) {
            const auto& element = sample.elements.at(e);
            out << "- " << names[e] << ": " << (element.present ? element.text : "(absent)")
                << "\n";
        }
    }
    return chosen.size();
}

} // namespace femkit::augment
