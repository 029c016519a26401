#pragma once

// Segment encoders map one text segment (article body or one frame element)
// to a fixed-dimension embedding. The model consumes a fixed-order sequence
// of five segments per sample: article, then the four frame elements.

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femkit/core.hpp"
#include "femkit/errors.hpp"

namespace femkit::encoder {

FEMKIT_DEFINE_ERROR(EncoderError, "encoder_error");

struct TruncationPolicy {
    enum class Strategy { head, tail, head_and_tail };
    Strategy strategy = Strategy::head;
    std::size_t max_tokens = 512;
};

TruncationPolicy::Strategy truncation_strategy_from_string(std::string_view s);
std::string_view to_string(TruncationPolicy::Strategy s);

// Caps the token sequence at min(policy.max_tokens, hard_cap).
std::vector<std::string> apply_truncation(std::vector<std::string> tokens,
                                          const TruncationPolicy& policy,
                                          std::size_t hard_cap);

class SegmentEncoder {
public:
    virtual ~SegmentEncoder() = default;

    virtual std::size_t dim() const = 0;
    // Hard token cap of the backend itself (the truncation policy may be
    // tighter, never looser).
    virtual std::size_t max_tokens() const = 0;
    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
    // Encodes an already-truncated token sequence. Must be deterministic and
    // must accept the empty sequence (that encoding is the designated
    // empty-segment embedding).
    virtual std::vector<double> encode_tokens(std::span<const std::string> tokens) const = 0;
    virtual bool supports_finetune() const { return false; }
    virtual std::string name() const = 0;

    std::vector<double> empty_embedding() const { return encode_tokens({}); }
};

struct SegmentVector {
    std::vector<double> values;
    bool empty_segment = false;
};

// article, e1, e2, e3, e4 — position is fixed; an absent element contributes
// the empty-segment embedding at its slot, the slot is never dropped.
using SampleEncoding = std::array<SegmentVector, 5>;

SegmentVector encode_segment(const SegmentEncoder& enc, std::string_view text,
                             const TruncationPolicy& policy);

SampleEncoding encode_sample(const SegmentEncoder& enc, const core::LabeledSample& sample,
                             const TruncationPolicy& policy);

// Feature-hashing bag-of-tokens encoder. Deterministic, dependency-free,
// usable both as the test encoder and for offline desk-scale runs. Rule:
// FNV-1a64 of each lowercased token, bucket = hash % d, sign from hash bit
// 32, L2-normalized; the empty sequence hashes the empty string instead so
// "absent" stays a real point in embedding space.
class HashingEncoder final : public SegmentEncoder {
public:
    explicit HashingEncoder(std::size_t dim);

    std::size_t dim() const override { return dim_; }
    std::size_t max_tokens() const override;
    std::vector<std::string> tokenize(std::string_view text) const override;
    std::vector<double> encode_tokens(std::span<const std::string> tokens) const override;
    std::string name() const override;

private:
    std::size_t dim_;
};

// Remote transformer backend speaking a JSON embeddings endpoint; see
// http_encoder.cpp for the wire format and environment variables.
std::shared_ptr<SegmentEncoder> make_http_encoder(const std::string& model, std::size_t dim,
                                                  const std::string& pooling);

// Backend keys: "hashing:<dim>", "http:<model>:<dim>".
std::shared_ptr<SegmentEncoder> make_encoder(const std::string& backend_key,
                                             const std::string& pooling = "seq_start");

} // namespace femkit::encoder
