#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "femkit/augment.hpp"
#include "femkit/util.hpp"

namespace femkit::augment {

std::string GenerationParams::cache_token() const {
    // %.17g keeps the temperature exact; the separator cannot appear in any
    // component.
    char buf[128];
    std::snprintf(buf, sizeof(buf), "t=%.17g|m=%zu|s=%s", temperature, max_output_tokens,
                  seed ? std::to_string(*seed).c_str() : "none");
    return buf;
}

namespace {

bool placeholder_at(const std::string& text, std::size_t open, std::string& name_out,
                    std::size_t& close_out) {
    // A placeholder is {lowercase_identifier}; anything else between braces
    // (JSON examples, quoted keys) is literal text.
    std::size_t i = open + 1;
    while (i < text.size() && (std::islower(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
    if (i == open + 1 || i >= text.size() || text[i] != '}') return false;
    name_out = text.substr(open + 1, i - open - 1);
    close_out = i;
    return true;
}

} // namespace

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out;
    out.reserve(text.size());
    std::set<std::string> used;
    for (std::size_t i = 0; i < text.size();) {
        std::string ph;
        std::size_t close = 0;
        if (text[i] == '{' && placeholder_at(text, i, ph, close)) {
            auto it = values.find(ph);
            if (it == values.end())
                throw PromptError("template '" + name + "' has unbound placeholder {" + ph + "}");
            out += it->second;
            used.insert(ph);
            i = close + 1;
        } else {
            out += text[i++];
        }
    }
    for (const auto& [key, value] : values) {
        (void)value;
        if (!used.count(key))
            throw PromptError("template '" + name + "' does not use placeholder {" + key + "}");
    }
    return out;
}

namespace {

const char* kIdentifyV1 =
    R"(TASK: identify_frame_and_elements
You are an analyst of news framing. Read the article below and:
1. Name the frame the story is told under. Choose exactly one of: {frames}.
2. Quote or closely paraphrase the four framing elements of the story:
   problem_definition, causal_interpretation, moral_evaluation,
   treatment_recommendation.
Respond with a single JSON object of the form
{"frame": "<one of the frames above>", "elements": {"problem_definition": <string or null>, "causal_interpretation": <string or null>, "moral_evaluation": <string or null>, "treatment_recommendation": <string or null>}}
Use null for an element the article does not contain. All four keys must be
present and no other keys are allowed. Do not add prose around the JSON.
ARTICLE:
{body}
)";

const char* kAlterV1 =
    R"(TASK: alter_frame
TARGET FRAME: {frame}
Rewrite the article below so the same story is told under the "{frame}"
frame. Keep every factual claim intact: figures, names, dates and events must
survive the rewrite. Change only tone, emphasis, word choice and narrative
order. Write a complete article of roughly the original length. Return only
the rewritten article text, with no preamble and no commentary.
ARTICLE:
{body}
)";

const char* kExtractV1 =
    R"(TASK: extract_elements
Extract the four framing elements of the article below: how it defines the
problem, what it blames or credits as the cause, what moral judgement it
passes, and what remedy it suggests.
Respond with a single JSON object of the form
{"elements": {"problem_definition": <string or null>, "causal_interpretation": <string or null>, "moral_evaluation": <string or null>, "treatment_recommendation": <string or null>}}
Use null for an element the article does not contain. All four keys must be
present and no other keys are allowed. Do not add prose around the JSON.
ARTICLE:
{body}
)";

} // namespace

const PromptSet& builtin_prompts() {
    static const PromptSet set{
        PromptTemplate{"identify_frame_and_elements", 1, kIdentifyV1},
        PromptTemplate{"alter_frame", 1, kAlterV1},
        PromptTemplate{"extract_elements", 1, kExtractV1},
    };
    return set;
}

PromptTemplate load_template(const std::string& name, int version, const std::string& dir) {
    const std::string path = dir + "/" + name + ".v" + std::to_string(version) + ".txt";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PromptError("cannot open prompt template " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return PromptTemplate{name, version, body.str()};
}

PromptSet load_prompts(const std::string& dir) {
    if (dir.empty()) return builtin_prompts();
    return PromptSet{
        load_template("identify_frame_and_elements", 1, dir),
        load_template("alter_frame", 1, dir),
        load_template("extract_elements", 1, dir),
    };
}

} // namespace femkit::augment
