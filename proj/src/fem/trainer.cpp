#include <cmath>

#include "femkit/fem.hpp"
#include "femkit/util.hpp"

namespace femkit::fem {

namespace {

std::array<std::vector<double> FemModel::Params::*, 8> tensor_members() {
    return {&FemModel::Params::w_fwd, &FemModel::Params::u_fwd, &FemModel::Params::b_fwd,
            &FemModel::Params::w_bwd, &FemModel::Params::u_bwd, &FemModel::Params::b_bwd,
            &FemModel::Params::w_cls, &FemModel::Params::b_cls};
}

struct Adam {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    std::size_t t = 0;
    std::array<std::vector<double>, 8> m, v;

    explicit Adam(const FemModel::Params& params) {
        auto members = tensor_members();
        for (std::size_t i = 0; i < members.size(); ++i) {
            m[i].assign((params.*members[i]).size(), 0.0);
            v[i].assign((params.*members[i]).size(), 0.0);
        }
    }

    void step(FemModel::Params& params, const FemModel::Params& grads, double lr) {
        ++t;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
        auto members = tensor_members();
        for (std::size_t i = 0; i < members.size(); ++i) {
            auto& p = params.*members[i];
            const auto& g = grads.*members[i];
            auto& mi = m[i];
            auto& vi = v[i];
            for (std::size_t k = 0; k < p.size(); ++k) {
                mi[k] = kBeta1 * mi[k] + (1.0 - kBeta1) * g[k];
                vi[k] = kBeta2 * vi[k] + (1.0 - kBeta2) * g[k] * g[k];
                p[k] -= lr * (mi[k] / bc1) / (std::sqrt(vi[k] / bc2) + kEps);
            }
        }
    }
};

} // namespace

TrainResult train(FemModel& model, const TrainData& train_set, const TrainData& val_set) {
    const FemConfig& cfg = model.config();
    if (train_set.x.size() != train_set.y.size() || val_set.x.size() != val_set.y.size()) {
        throw FemError("train: features and labels differ in length");
    }
    if (train_set.x.empty()) throw FemError("train: empty training set");
    if (val_set.x.empty()) throw FemError("train: empty validation set");
    if (cfg.epochs == 0) throw FemError("train: epochs must be positive");
    if (cfg.batch_size == 0) throw FemError("train: batch_size must be positive");

    const std::size_t n = train_set.x.size();
    const std::size_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    TrainResult result;
    result.total_steps = cfg.epochs * steps_per_epoch;
    result.warmup_steps =
        cfg.warmup_steps > 0 ? cfg.warmup_steps : std::max<std::size_t>(1, result.total_steps / 10);

    Adam adam(model.params());
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL); // shuffles and dropout masks
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    double best_score = -1.0;
    FemModel::Params best_params;
    std::size_t global_step = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        util::deterministic_shuffle(order, rng);

        double epoch_loss = 0.0;
        double epoch_lr = 0.0;
        bool diverged = false;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            std::vector<Sequence> bx(count);
            std::vector<int> by(count);
            for (std::size_t k = 0; k < count; ++k) {
                bx[k] = train_set.x[order[start + k]];
                by[k] = train_set.y[order[start + k]];
            }
            auto grad = model.grad_batch(bx, by, &rng);
            if (!std::isfinite(grad.loss)) {
                diverged = true;
                break;
            }
            epoch_lr = lr_at(global_step, cfg.peak_lr, result.warmup_steps, result.total_steps);
            adam.step(model.params(), grad.grads, epoch_lr);
            ++global_step;
            epoch_loss += grad.loss * static_cast<double>(count) / static_cast<double>(n);
        }
        if (diverged) {
            result.status = TrainStatus::diverged;
            break;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss;
        stats.lr = epoch_lr;
        stats.val = evaluate_set(model, val_set);
        result.history.push_back(stats);

        const double score = stats.val.has_f1 ? stats.val.f1 : 0.0;
        if (score > best_score) {
            best_score = score;
            best_params = model.params();
            result.best_epoch = epoch;
            result.best_val = stats.val;
        }
    }

    if (result.best_epoch > 0) model.params() = best_params;
    return result;
}

} // namespace femkit::fem
