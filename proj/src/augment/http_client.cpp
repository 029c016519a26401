#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "femkit/augment.hpp"
#include "femkit/util.hpp"

namespace femkit::augment {

namespace {

// Chat-completions wire format: POST {endpoint path or /v1/chat/completions}
// with {"model", "messages", "temperature", "max_tokens"[, "seed"]}; the
// completion text is read from choices[0].message.content.
class HttpLlmClient : public LlmClient {
public:
    HttpLlmClient() {
        const char* endpoint = std::getenv("FEMKIT_LLM_ENDPOINT");
        if (!endpoint || !*endpoint)
            throw ClientError("FEMKIT_LLM_ENDPOINT is not set; the http client needs a "
                              "chat-completions endpoint");
        url_ = util::parse_url(endpoint);
        if (url_.path == "/") url_.path = "/v1/chat/completions";
        const char* key = std::getenv("FEMKIT_LLM_API_KEY");
        if (!key || !*key)
            throw ClientError("FEMKIT_LLM_API_KEY is not set; refusing to start the http "
                              "client without credentials");
        api_key_ = key;
        if (const char* model = std::getenv("FEMKIT_LLM_MODEL")) model_ = model;
        if (model_.empty()) model_ = "gpt-4o-mini";
    }

    std::string name() const override { return "http:" + model_; }

    std::string complete(const std::string& prompt, const GenerationParams& params) override {
        nlohmann::json request{
            {"model", model_},
            {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                               {"content", prompt}}})},
            {"temperature", params.temperature},
            {"max_tokens", params.max_output_tokens},
        };
        if (params.seed) request["seed"] = *params.seed;

        httplib::Client http(url_.scheme + "://" + url_.host + ":" + std::to_string(url_.port));
        http.set_connection_timeout(10);
        http.set_read_timeout(120);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        auto res = http.Post(url_.path, headers, request.dump(), "application/json");
        if (!res) throw ClientError("no response from " + url_.host);
        if (res->status != 200)
            throw ClientError("completion request failed with status " +
                              std::to_string(res->status) + ": " + res->body.substr(0, 200));
        try {
            auto parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ClientError(std::string("malformed completion response: ") + e.what());
        }
    }

private:
    util::UrlParts url_;
    std::string api_key_;
    std::string model_;
};

} // namespace

std::unique_ptr<LlmClient> make_http_client() { return std::make_unique<HttpLlmClient>(); }

} // namespace femkit::augment
