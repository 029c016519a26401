#include "femkit/encoder.hpp"

#include <cmath>
#include <limits>

#include "femkit/kernels.hpp"
#include "femkit/util.hpp"

namespace femkit::encoder {

TruncationPolicy::Strategy truncation_strategy_from_string(std::string_view s) {
    if (s == "head") return TruncationPolicy::Strategy::head;
    if (s == "tail") return TruncationPolicy::Strategy::tail;
    if (s == "head_and_tail") return TruncationPolicy::Strategy::head_and_tail;
    throw EncoderError("unknown truncation strategy \"" + std::string(s) + "\"");
}

std::string_view to_string(TruncationPolicy::Strategy s) {
    switch (s) {
        case TruncationPolicy::Strategy::head: return "head";
        case TruncationPolicy::Strategy::tail: return "tail";
        case TruncationPolicy::Strategy::head_and_tail: return "head_and_tail";
    }
    return "head";
}

std::vector<std::string> apply_truncation(std::vector<std::string> tokens,
                                          const TruncationPolicy& policy,
                                          std::size_t hard_cap) {
    const std::size_t cap = std::min(policy.max_tokens, hard_cap);
    if (tokens.size() <= cap) return tokens;
    switch (policy.strategy) {
        case TruncationPolicy::Strategy::head:
            tokens.resize(cap);
            break;
        case TruncationPolicy::Strategy::tail:
            tokens.erase(tokens.begin(), tokens.end() - static_cast<std::ptrdiff_t>(cap));
            break;
        case TruncationPolicy::Strategy::head_and_tail: {
            const std::size_t head = (cap + 1) / 2;
            const std::size_t tail = cap - head;
            std::vector<std::string> out;
            out.reserve(cap);
            out.insert(out.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(head));
            out.insert(out.end(), tokens.end() - static_cast<std::ptrdiff_t>(tail), tokens.end());
            tokens = std::move(out);
            break;
        }
    }
    return tokens;
}

SegmentVector encode_segment(const SegmentEncoder& enc, std::string_view text,
                             const TruncationPolicy& policy) {
    auto tokens = apply_truncation(enc.tokenize(text), policy, enc.max_tokens());
    SegmentVector out;
    out.empty_segment = tokens.empty();
    out.values = enc.encode_tokens(tokens);
    if (out.values.size() != enc.dim()) {
        throw EncoderError("backend \"" + enc.name() + "\" returned dimension " +
                           std::to_string(out.values.size()) + ", expected " +
                           std::to_string(enc.dim()));
    }
    return out;
}

SampleEncoding encode_sample(const SegmentEncoder& enc, const core::LabeledSample& sample,
                             const TruncationPolicy& policy) {
    SampleEncoding out;
    try {
        out[0] = encode_segment(enc, sample.article.body, policy);
    } catch (const EncoderError& e) {
        throw EncoderError(std::string("segment 0 (article): ") + e.what());
    }
    for (std::size_t i = 0; i < core::FrameElementSet::kCount; ++i) {
        const core::FrameElement& e = sample.elements.at(i);
        try {
            if (e.present) {
                out[i + 1] = encode_segment(enc, e.text, policy);
            } else {
                out[i + 1] = SegmentVector{enc.empty_embedding(), true};
            }
        } catch (const EncoderError& err) {
            throw EncoderError("segment " + std::to_string(i + 1) + " (" +
                               std::string(core::FrameElementSet::names()[i]) + "): " + err.what());
        }
    }
    return out;
}

HashingEncoder::HashingEncoder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw EncoderError("hashing encoder dimension must be positive");
}

std::size_t HashingEncoder::max_tokens() const {
    return std::numeric_limits<std::size_t>::max();
}

std::vector<std::string> HashingEncoder::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        bool token_char = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
        if (token_char) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<double> HashingEncoder::encode_tokens(std::span<const std::string> tokens) const {
    std::vector<double> v(dim_, 0.0);
    auto slot = [&](std::string_view tok) {
        std::uint64_t h = util::fnv1a64(tok);
        double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
        v[static_cast<std::size_t>(h % dim_)] += sign;
    };
    if (tokens.empty()) {
        slot("");
        return v; // a single +/-1 spike is already unit length
    }
    for (const auto& t : tokens) slot(t);
    double norm = std::sqrt(kernels::sumsq(v));
    if (norm > 0.0) kernels::scal(1.0 / norm, v);
    return v;
}

std::string HashingEncoder::name() const {
    return "hashing:" + std::to_string(dim_);
}

std::shared_ptr<SegmentEncoder> make_encoder(const std::string& backend_key,
                                             const std::string& pooling) {
    auto colon = backend_key.find(':');
    std::string kind = backend_key.substr(0, colon);
    if (kind == "hashing") {
        if (colon == std::string::npos) throw EncoderError("hashing backend needs a dimension, e.g. hashing:64");
        std::size_t d = std::stoul(backend_key.substr(colon + 1));
        return std::make_shared<HashingEncoder>(d);
    }
    if (kind == "http") {
        auto rest = backend_key.substr(colon + 1);
        auto colon2 = rest.rfind(':');
        if (colon == std::string::npos || colon2 == std::string::npos) {
            throw EncoderError("http backend key must be http:<model>:<dim>");
        }
        std::string model = rest.substr(0, colon2);
        std::size_t d = std::stoul(rest.substr(colon2 + 1));
        return make_http_encoder(model, d, pooling);
    }
    throw EncoderError("unknown encoder backend \"" + backend_key + "\"");
}

} // namespace femkit::encoder
