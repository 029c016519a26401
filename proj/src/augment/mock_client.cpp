#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "femkit/augment.hpp"
#include "femkit/util.hpp"

namespace femkit::augment {

namespace {

std::string lowercased(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string line_after(const std::string& text, const std::string& marker) {
    auto pos = text.find(marker);
    if (pos == std::string::npos) return "";
    pos += marker.size();
    auto end = text.find('\n', pos);
    return text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

std::string body_of(const std::string& prompt) {
    const std::string marker = "ARTICLE:\n";
    auto pos = prompt.find(marker);
    std::string body = pos == std::string::npos ? "" : prompt.substr(pos + marker.size());
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
        body.pop_back();
    return body;
}

std::vector<std::string> frame_choices(const std::string& prompt) {
    std::string line = line_after(prompt, "one of: ");
    while (!line.empty() && (line.back() == '.' || std::isspace(static_cast<unsigned char>(line.back()))))
        line.pop_back();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        auto comma = line.find(", ", start);
        if (comma == std::string::npos) {
            if (start < line.size()) out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 2;
    }
    return out;
}

nlohmann::json elements_json(const std::vector<std::string>& sentences) {
    nlohmann::json elements;
    const auto& names = core::FrameElementSet::names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i < sentences.size())
            elements[std::string(names[i])] = sentences[i];
        else
            elements[std::string(names[i])] = nullptr;
    }
    return elements;
}

} // namespace

std::string MockLlmClient::alteration_prefix(const std::string& frame) {
    if (frame == "semantic") return "Oh, boy!";
    if (frame == "political") return "Make no mistake:";
    if (frame == "economic") return "Money talks:";
    if (frame == "human-interest") return "Imagine this:";
    return "Frankly,";
}

void MockLlmClient::fail_when(const std::string& prompt_substring, const std::string& kind,
                              int times) {
    std::lock_guard<std::mutex> lock(mu_);
    faults_.push_back(Fault{prompt_substring, kind, times});
}

int MockLlmClient::call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

std::vector<std::string> MockLlmClient::prompts_seen() const {
    std::lock_guard<std::mutex> lock(mu_);
    return prompts_;
}

std::string MockLlmClient::complete(const std::string& prompt, const GenerationParams& params) {
    (void)params; // output is a pure function of the prompt
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++calls_;
        prompts_.push_back(prompt);
        for (auto& fault : faults_) {
            if (fault.remaining == 0) continue;
            if (prompt.find(fault.needle) == std::string::npos) continue;
            if (fault.remaining > 0) --fault.remaining;
            if (fault.kind == "client") throw ClientError("injected transport failure");
            if (fault.kind == "parse") return "Sorry, I cannot format that as JSON today.";
            if (fault.kind == "degenerate") return "Too short.";
            throw std::logic_error("unknown fault kind " + fault.kind);
        }
    }

    const std::string task = line_after(prompt, "TASK: ");
    const std::string body = body_of(prompt);
    const auto sentences = util::split_sentences(body);

    if (task == "identify_frame_and_elements") {
        const auto choices = frame_choices(prompt);
        const std::string haystack = lowercased(body);
        std::string frame = choices.empty() ? "unframed" : choices.front();
        for (const auto& choice : choices) {
            if (haystack.find(lowercased(choice)) != std::string::npos) {
                frame = choice;
                break;
            }
        }
        nlohmann::json out;
        out["frame"] = frame;
        out["elements"] = elements_json(sentences);
        return out.dump();
    }
    if (task == "alter_frame") {
        const std::string target = line_after(prompt, "TARGET FRAME: ");
        const std::string prefix = alteration_prefix(target);
        std::string out;
        for (const auto& sentence : sentences) {
            if (!out.empty()) out += " ";
            out += prefix + " " + sentence;
        }
        return out;
    }
    if (task == "extract_elements") {
        nlohmann::json out;
        out["elements"] = elements_json(sentences);
        return out.dump();
    }
    throw ClientError("mock client cannot serve task '" + task + "'");
}

} // namespace femkit::augment
