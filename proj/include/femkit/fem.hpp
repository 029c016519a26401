#pragma once

// Frame-element sequence classifier. Each sample is encoded as a short
// sequence of segment embeddings (article plus the four frame elements); a
// bidirectional LSTM reads the sequence, the concatenated final states of the
// two directions pass through ReLU and dropout into a two-way softmax.
// Class index 0 is misinformation, index 1 is information, matching labels.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "femkit/encoder.hpp"
#include "femkit/errors.hpp"
#include "femkit/metrics.hpp"

namespace femkit::fem {

FEMKIT_DEFINE_ERROR(FemError, "fem_error");
FEMKIT_DEFINE_ERROR(CheckpointError, "checkpoint_error");

struct FemConfig {
    std::size_t input_dim = 0;   // segment embedding dimension, set from the encoder
    std::size_t hidden_dim = 256; // per direction
    double dropout = 0.3;         // applied to inputs and to the pre-classifier state
    double peak_lr = 1e-5;
    std::size_t epochs = 100;
    std::size_t batch_size = 8;
    double weight_decay = 1e-4;   // L2 on the classifier weight matrix only
    std::size_t warmup_steps = 0; // 0 means 10% of total optimizer steps
    std::uint64_t seed = 42;
    // Which of [article, e1..e4] the model consumes; cleared segments are
    // dropped from the sequence, not zeroed.
    std::array<bool, 5> segment_mask = {true, true, true, true, true};
    // Recorded in checkpoints for provenance; embedding backends here are
    // frozen, so this does not change training behaviour.
    bool encoder_finetune = false;
    std::string encoder_name;
};

// Linear ramp from peak/warmup up to peak over the first `warmup` steps, then
// cosine decay to zero across the remaining `total - warmup` steps. `step` is
// the 0-based optimizer step.
double lr_at(std::size_t step, double peak, std::size_t warmup, std::size_t total);

using Sequence = std::vector<std::vector<double>>; // L x input_dim, L >= 1

// Selects the masked-in segments of an encoded sample, in fixed order.
Sequence masked_sequence(const encoder::SampleEncoding& enc, const std::array<bool, 5>& mask);

class FemModel {
public:
    // All weights uniform in +/- 1/sqrt(fan-in), forget-gate biases start at 1.
    explicit FemModel(FemConfig config);

    const FemConfig& config() const { return config_; }

    // Training and serialization surface; tensors are row-major.
    struct Params {
        std::vector<double> w_fwd, u_fwd, b_fwd; // 4H x d, 4H x H, 4H
        std::vector<double> w_bwd, u_bwd, b_bwd;
        std::vector<double> w_cls, b_cls;        // 2 x 2H, 2
    };
    Params& params() { return params_; }
    const Params& params() const { return params_; }

    // {P(misinformation), P(information)}. Evaluation mode, no dropout.
    std::array<double, 2> probs(const Sequence& seq) const;
    int predict(const Sequence& seq) const; // argmax label, ties -> 0
    // Post-ReLU, pre-dropout 2H state feeding the classifier.
    std::vector<double> hidden_state(const Sequence& seq) const;

    // Mean cross-entropy over the batch plus the classifier L2 term.
    // Evaluation mode; matches what grad_batch(nullptr) differentiates.
    double batch_loss(std::span<const Sequence> seqs, std::span<const int> labels) const;

    struct GradResult {
        double loss = 0.0;
        Params grads;
    };
    // Backpropagation through the full batch. When dropout_rng is non-null
    // and config().dropout > 0, fresh inverted-dropout masks are drawn from
    // it; with a null rng the pass is deterministic and the loss equals
    // batch_loss on the same inputs.
    GradResult grad_batch(std::span<const Sequence> seqs, std::span<const int> labels,
                          std::mt19937_64* dropout_rng) const;

private:
    FemConfig config_;
    Params params_;
};

struct TrainData {
    std::vector<Sequence> x;
    std::vector<int> y;
};

struct EpochStats {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    metrics::MetricSet val;
    double lr = 0.0; // learning rate at the epoch's last optimizer step
};

enum class TrainStatus { completed, diverged };

struct TrainResult {
    TrainStatus status = TrainStatus::completed;
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0; // 1-based; 0 when no epoch finished
    metrics::MetricSet best_val;
    std::size_t total_steps = 0;
    std::size_t warmup_steps = 0;
};

// Adam + the warmup/cosine schedule, batching with a deterministic per-epoch
// shuffle. The model is left holding the weights of the best validation-F1
// epoch. A non-finite batch loss stops training with status diverged (best
// weights so far are restored when any epoch completed).
TrainResult train(FemModel& model, const TrainData& train_set, const TrainData& val_set);

// Prediction-based evaluation of a labeled set.
metrics::MetricSet evaluate_set(const FemModel& model, const TrainData& data);

// Checkpoint directory: config.json, weights.bin, history.csv.
void save_checkpoint(const std::string& dir, const FemModel& model, const TrainResult& result);
struct LoadedCheckpoint {
    FemModel model;
    std::vector<EpochStats> history;
};
LoadedCheckpoint load_checkpoint(const std::string& dir);

nlohmann::json config_to_json(const FemConfig& c);
FemConfig config_from_json(const nlohmann::json& j);

} // namespace femkit::fem
