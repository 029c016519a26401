// Remote embeddings backend. Speaks the common JSON embeddings wire format:
//
//   POST <endpoint-path>        (default path /v1/embeddings)
//   {"model": "...", "input": ["..."], "pooling": "..."}
//   -> {"data": [{"embedding": [..floats..]}]}
//
// Environment:
//   FEMKIT_ENCODER_ENDPOINT  required, e.g. http://127.0.0.1:8811 or a full URL
//   FEMKIT_ENCODER_API_KEY   optional, sent as a Bearer token
//   FEMKIT_ENCODER_CACHE     optional directory; responses are cached by
//                            sha256(model, pooling, dim, text)

#include "femkit/encoder.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "femkit/util.hpp"

namespace femkit::encoder {

namespace {

using nlohmann::json;

class HttpEncoder final : public SegmentEncoder {
public:
    HttpEncoder(std::string model, std::size_t dim, std::string pooling)
        : model_(std::move(model)), dim_(dim), pooling_(std::move(pooling)) {
        if (dim_ == 0) throw EncoderError("http encoder dimension must be positive");
        const char* ep = std::getenv("FEMKIT_ENCODER_ENDPOINT");
        if (!ep || !*ep) {
            throw EncoderError("FEMKIT_ENCODER_ENDPOINT is not set; the http encoder backend "
                               "needs an embeddings endpoint");
        }
        util::UrlParts parts;
        try {
            parts = util::parse_url(ep);
        } catch (const std::invalid_argument& e) {
            throw EncoderError(std::string("FEMKIT_ENCODER_ENDPOINT: ") + e.what());
        }
        base_ = parts.scheme + "://" + parts.host + ":" + std::to_string(parts.port);
        path_ = parts.path == "/" ? "/v1/embeddings" : parts.path;
        if (const char* key = std::getenv("FEMKIT_ENCODER_API_KEY"); key && *key) api_key_ = key;
        if (const char* dir = std::getenv("FEMKIT_ENCODER_CACHE"); dir && *dir) {
            cache_dir_ = dir;
            std::filesystem::create_directories(*cache_dir_);
        }
    }

    std::size_t dim() const override { return dim_; }
    std::size_t max_tokens() const override { return 512; }

    // The remote model owns real tokenization; whitespace pieces are only the
    // client-side proxy that the truncation cap operates on.
    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> out;
        std::string cur;
        for (char c : text) {
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) out.push_back(std::move(cur));
        return out;
    }

    std::vector<double> encode_tokens(std::span<const std::string> tokens) const override {
        std::string text;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) text.push_back(' ');
            text += tokens[i];
        }
        if (auto cached = cache_read(text)) return *cached;
        auto values = request(text);
        cache_write(text, values);
        return values;
    }

    std::string name() const override {
        return "http:" + model_ + ":" + std::to_string(dim_);
    }

private:
    std::optional<std::string> cache_path(const std::string& text) const {
        if (!cache_dir_) return std::nullopt;
        std::string key = util::sha256_hex(model_ + "\x1f" + pooling_ + "\x1f" +
                                           std::to_string(dim_) + "\x1f" + text);
        return (*cache_dir_ / (key + ".json")).string();
    }

    std::optional<std::vector<double>> cache_read(const std::string& text) const {
        auto p = cache_path(text);
        if (!p) return std::nullopt;
        std::ifstream in(*p, std::ios::binary);
        if (!in) return std::nullopt;
        std::stringstream ss;
        ss << in.rdbuf();
        json j = json::parse(ss.str(), nullptr, false);
        if (!j.is_array() || j.size() != dim_) return std::nullopt; // stale or corrupt: refetch
        std::vector<double> v;
        v.reserve(dim_);
        for (const auto& x : j) {
            if (!x.is_number()) return std::nullopt;
            v.push_back(x.get<double>());
        }
        return v;
    }

    void cache_write(const std::string& text, const std::vector<double>& values) const {
        auto p = cache_path(text);
        if (!p) return;
        json j = json::array();
        for (double v : values) j.push_back(v);
        std::string tmp = *p + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << j.dump();
        }
        std::filesystem::rename(tmp, *p);
    }

    std::vector<double> request(const std::string& text) const {
        json body = {{"model", model_}, {"input", json::array({text})}, {"pooling", pooling_}};
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
            }
            httplib::Client cli(base_);
            cli.set_connection_timeout(std::chrono::seconds(5));
            cli.set_read_timeout(std::chrono::seconds(60));
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
            auto res = cli.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw EncoderError("embeddings endpoint returned HTTP " +
                                   std::to_string(res->status) + ": " +
                                   res->body.substr(0, 200));
            }
            return parse_response(res->body);
        }
        throw EncoderError("embeddings endpoint unreachable after 3 attempts: " + last_error);
    }

    std::vector<double> parse_response(const std::string& body) const {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("data") || !j["data"].is_array() ||
            j["data"].empty() || !j["data"][0].is_object() ||
            !j["data"][0].contains("embedding") || !j["data"][0]["embedding"].is_array()) {
            throw EncoderError("malformed embeddings response: " + body.substr(0, 200));
        }
        const auto& emb = j["data"][0]["embedding"];
        std::vector<double> v;
        v.reserve(emb.size());
        for (const auto& x : emb) {
            if (!x.is_number()) throw EncoderError("non-numeric value in embedding");
            v.push_back(x.get<double>());
        }
        return v;
    }

    std::string model_;
    std::size_t dim_;
    std::string pooling_;
    std::string base_;
    std::string path_;
    std::string api_key_;
    std::optional<std::filesystem::path> cache_dir_;
};

} // namespace

std::shared_ptr<SegmentEncoder> make_http_encoder(const std::string& model, std::size_t dim,
                                                  const std::string& pooling) {
    return std::make_shared<HttpEncoder>(model, dim, pooling);
}

} // namespace femkit::encoder
