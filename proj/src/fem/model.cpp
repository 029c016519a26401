#include "femkit/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "femkit/kernels.hpp"

namespace femkit::fem {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One direction of the BiLSTM over inputs in processing order. Gate packing
// within the 4H axis is [input, forget, cell, output].
struct DirCache {
    std::vector<std::vector<double>> gates; // post-activation, 4H per step
    std::vector<std::vector<double>> c;
    std::vector<std::vector<double>> tanh_c;
    std::vector<std::vector<double>> h;
};

DirCache run_direction(const std::vector<double>& w, const std::vector<double>& u,
                       const std::vector<double>& b,
                       const std::vector<const std::vector<double>*>& inputs,
                       std::size_t hidden, std::size_t dim) {
    const std::size_t steps = inputs.size();
    DirCache cache;
    cache.gates.resize(steps);
    cache.c.resize(steps);
    cache.tanh_c.resize(steps);
    cache.h.resize(steps);

    std::vector<double> h_prev(hidden, 0.0), c_prev(hidden, 0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        std::vector<double> z = b; // 4H
        kernels::gemv(4 * hidden, dim, w.data(), inputs[s]->data(), z.data());
        kernels::gemv(4 * hidden, hidden, u.data(), h_prev.data(), z.data());

        auto& gates = cache.gates[s];
        gates.resize(4 * hidden);
        for (std::size_t k = 0; k < hidden; ++k) {
            gates[k] = sigmoid(z[k]);                           // input
            gates[hidden + k] = sigmoid(z[hidden + k]);         // forget
            gates[2 * hidden + k] = std::tanh(z[2 * hidden + k]); // cell candidate
            gates[3 * hidden + k] = sigmoid(z[3 * hidden + k]); // output
        }

        auto& c = cache.c[s];
        auto& tc = cache.tanh_c[s];
        auto& h = cache.h[s];
        c.resize(hidden);
        tc.resize(hidden);
        h.resize(hidden);
        for (std::size_t k = 0; k < hidden; ++k) {
            c[k] = gates[hidden + k] * c_prev[k] + gates[k] * gates[2 * hidden + k];
            tc[k] = std::tanh(c[k]);
            h[k] = gates[3 * hidden + k] * tc[k];
        }
        h_prev = h;
        c_prev = c;
    }
    return cache;
}

struct SampleCache {
    std::vector<std::vector<double>> x; // inputs actually consumed (post-dropout when training)
    std::vector<std::vector<double>> x_mask;
    DirCache fwd, bwd;
    std::vector<double> u;     // concat of final states, 2H
    std::vector<double> r;     // relu(u)
    std::vector<double> r_mask;
    std::vector<double> r_drop;
    std::array<double, 2> logits{};
    std::array<double, 2> p{};
    double log_p[2] = {0.0, 0.0};
};

std::vector<double> dropout_mask(std::size_t n, double rate, std::mt19937_64& rng) {
    std::vector<double> mask(n);
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = uniform01(rng) >= rate ? keep_scale : 0.0;
    }
    return mask;
}

} // namespace

double lr_at(std::size_t step, double peak, std::size_t warmup, std::size_t total) {
    if (total == 0) throw FemError("lr_at: total steps must be positive");
    if (step >= total) return 0.0;
    if (step < warmup) {
        return peak * static_cast<double>(step + 1) / static_cast<double>(warmup);
    }
    const double span = static_cast<double>(total - warmup);
    const double into = static_cast<double>(step - warmup);
    return peak * 0.5 * (1.0 + std::cos(M_PI * into / span));
}

Sequence masked_sequence(const encoder::SampleEncoding& enc, const std::array<bool, 5>& mask) {
    Sequence seq;
    for (std::size_t i = 0; i < enc.size(); ++i) {
        if (mask[i]) seq.push_back(enc[i].values);
    }
    if (seq.empty()) throw FemError("segment mask selects no segments");
    return seq;
}

FemModel::FemModel(FemConfig config) : config_(std::move(config)) {
    if (config_.input_dim == 0) throw FemError("input_dim must be positive");
    if (config_.hidden_dim == 0) throw FemError("hidden_dim must be positive");
    if (config_.dropout < 0.0 || config_.dropout >= 1.0) {
        throw FemError("dropout must be in [0, 1)");
    }
    const std::size_t d = config_.input_dim;
    const std::size_t h = config_.hidden_dim;

    std::mt19937_64 rng(config_.seed);
    auto fill = [&rng](std::vector<double>& v, std::size_t n, std::size_t fan_in) {
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        v.resize(n);
        for (auto& x : v) x = (2.0 * uniform01(rng) - 1.0) * a;
    };
    auto init_bias = [h](std::vector<double>& b) {
        b.assign(4 * h, 0.0);
        for (std::size_t k = 0; k < h; ++k) b[h + k] = 1.0; // open forget gates early
    };

    fill(params_.w_fwd, 4 * h * d, d);
    fill(params_.u_fwd, 4 * h * h, h);
    init_bias(params_.b_fwd);
    fill(params_.w_bwd, 4 * h * d, d);
    fill(params_.u_bwd, 4 * h * h, h);
    init_bias(params_.b_bwd);
    fill(params_.w_cls, 2 * 2 * h, 2 * h);
    params_.b_cls.assign(2, 0.0);
}

namespace {

SampleCache forward_sample(const FemModel::Params& params, const FemConfig& cfg,
                           const Sequence& seq, std::mt19937_64* dropout_rng) {
    if (seq.empty()) throw FemError("empty input sequence");
    const std::size_t d = cfg.input_dim;
    const std::size_t h = cfg.hidden_dim;
    const bool use_dropout = dropout_rng != nullptr && cfg.dropout > 0.0;

    SampleCache cache;
    cache.x.reserve(seq.size());
    for (const auto& v : seq) {
        if (v.size() != d) {
            throw FemError("input vector has dimension " + std::to_string(v.size()) +
                           ", model expects " + std::to_string(d));
        }
        if (use_dropout) {
            auto mask = dropout_mask(d, cfg.dropout, *dropout_rng);
            std::vector<double> dropped = v;
            kernels::vmul(mask, dropped);
            cache.x_mask.push_back(std::move(mask));
            cache.x.push_back(std::move(dropped));
        } else {
            cache.x.push_back(v);
        }
    }

    std::vector<const std::vector<double>*> fwd_in, bwd_in;
    for (const auto& v : cache.x) fwd_in.push_back(&v);
    bwd_in.assign(fwd_in.rbegin(), fwd_in.rend());

    cache.fwd = run_direction(params.w_fwd, params.u_fwd, params.b_fwd, fwd_in, h, d);
    cache.bwd = run_direction(params.w_bwd, params.u_bwd, params.b_bwd, bwd_in, h, d);

    cache.u.resize(2 * h);
    std::memcpy(cache.u.data(), cache.fwd.h.back().data(), h * sizeof(double));
    std::memcpy(cache.u.data() + h, cache.bwd.h.back().data(), h * sizeof(double));

    cache.r.resize(2 * h);
    for (std::size_t k = 0; k < 2 * h; ++k) cache.r[k] = cache.u[k] > 0.0 ? cache.u[k] : 0.0;

    if (use_dropout) {
        cache.r_mask = dropout_mask(2 * h, cfg.dropout, *dropout_rng);
        cache.r_drop = cache.r;
        kernels::vmul(cache.r_mask, cache.r_drop);
    } else {
        cache.r_drop = cache.r;
    }

    cache.logits = {params.b_cls[0], params.b_cls[1]};
    kernels::gemv(2, 2 * h, params.w_cls.data(), cache.r_drop.data(), cache.logits.data());

    const double m = std::max(cache.logits[0], cache.logits[1]);
    const double e0 = std::exp(cache.logits[0] - m);
    const double e1 = std::exp(cache.logits[1] - m);
    const double lse = m + std::log(e0 + e1);
    cache.p = {e0 / (e0 + e1), e1 / (e0 + e1)};
    cache.log_p[0] = cache.logits[0] - lse;
    cache.log_p[1] = cache.logits[1] - lse;
    return cache;
}

// Backpropagation through one direction; returns nothing, accumulates into
// the gradient tensors. d_last_h is the loss gradient at the final step's h.
void direction_backward(const std::vector<double>& u_weights, const DirCache& cache,
                        const std::vector<const std::vector<double>*>& inputs,
                        const std::vector<double>& d_last_h, std::size_t h, std::size_t d,
                        std::vector<double>& dw, std::vector<double>& du,
                        std::vector<double>& db) {
    const std::size_t steps = inputs.size();
    std::vector<double> dh = d_last_h;
    std::vector<double> dc(h, 0.0);
    std::vector<double> dz(4 * h);
    std::vector<double> zeros(h, 0.0);

    for (std::size_t s = steps; s-- > 0;) {
        const auto& gates = cache.gates[s];
        const auto& tc = cache.tanh_c[s];
        const std::vector<double>& c_prev = s > 0 ? cache.c[s - 1] : zeros;
        const std::vector<double>& h_prev = s > 0 ? cache.h[s - 1] : zeros;

        for (std::size_t k = 0; k < h; ++k) {
            const double gi = gates[k], gf = gates[h + k], gg = gates[2 * h + k],
                         go = gates[3 * h + k];
            const double d_o = dh[k] * tc[k];
            const double d_c = dc[k] + dh[k] * go * (1.0 - tc[k] * tc[k]);
            const double d_i = d_c * gg;
            const double d_f = d_c * c_prev[k];
            const double d_g = d_c * gi;
            dc[k] = d_c * gf; // becomes dc_prev
            dz[k] = d_i * gi * (1.0 - gi);
            dz[h + k] = d_f * gf * (1.0 - gf);
            dz[2 * h + k] = d_g * (1.0 - gg * gg);
            dz[3 * h + k] = d_o * go * (1.0 - go);
        }

        kernels::vadd(dz, db);
        kernels::ger(4 * h, d, 1.0, dz.data(), inputs[s]->data(), dw.data());
        if (s > 0) kernels::ger(4 * h, h, 1.0, dz.data(), h_prev.data(), du.data());

        std::fill(dh.begin(), dh.end(), 0.0);
        kernels::gemv_t(4 * h, h, u_weights.data(), dz.data(), dh.data());
    }
}

} // namespace

std::array<double, 2> FemModel::probs(const Sequence& seq) const {
    return forward_sample(params_, config_, seq, nullptr).p;
}

int FemModel::predict(const Sequence& seq) const {
    auto p = probs(seq);
    return p[1] > p[0] ? 1 : 0;
}

std::vector<double> FemModel::hidden_state(const Sequence& seq) const {
    return forward_sample(params_, config_, seq, nullptr).r;
}

double FemModel::batch_loss(std::span<const Sequence> seqs, std::span<const int> labels) const {
    if (seqs.size() != labels.size()) throw FemError("batch_loss: size mismatch");
    if (seqs.empty()) throw FemError("batch_loss: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw FemError("labels must be 0 or 1");
        auto cache = forward_sample(params_, config_, seqs[i], nullptr);
        total -= cache.log_p[labels[i]];
    }
    return total / static_cast<double>(seqs.size()) +
           config_.weight_decay * kernels::sumsq(params_.w_cls);
}

FemModel::GradResult FemModel::grad_batch(std::span<const Sequence> seqs,
                                          std::span<const int> labels,
                                          std::mt19937_64* dropout_rng) const {
    if (seqs.size() != labels.size()) throw FemError("grad_batch: size mismatch");
    if (seqs.empty()) throw FemError("grad_batch: empty batch");
    const std::size_t d = config_.input_dim;
    const std::size_t h = config_.hidden_dim;
    const double inv_n = 1.0 / static_cast<double>(seqs.size());

    GradResult out;
    auto& g = out.grads;
    g.w_fwd.assign(params_.w_fwd.size(), 0.0);
    g.u_fwd.assign(params_.u_fwd.size(), 0.0);
    g.b_fwd.assign(params_.b_fwd.size(), 0.0);
    g.w_bwd.assign(params_.w_bwd.size(), 0.0);
    g.u_bwd.assign(params_.u_bwd.size(), 0.0);
    g.b_bwd.assign(params_.b_bwd.size(), 0.0);
    g.w_cls.assign(params_.w_cls.size(), 0.0);
    g.b_cls.assign(params_.b_cls.size(), 0.0);

    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw FemError("labels must be 0 or 1");
        auto cache = forward_sample(params_, config_, seqs[i], dropout_rng);
        out.loss -= cache.log_p[labels[i]] * inv_n;

        // softmax + cross-entropy
        std::array<double, 2> dlogits = {cache.p[0] * inv_n, cache.p[1] * inv_n};
        dlogits[static_cast<std::size_t>(labels[i])] -= inv_n;

        g.b_cls[0] += dlogits[0];
        g.b_cls[1] += dlogits[1];
        kernels::ger(2, 2 * h, 1.0, dlogits.data(), cache.r_drop.data(), g.w_cls.data());

        std::vector<double> dr(2 * h, 0.0);
        kernels::gemv_t(2, 2 * h, params_.w_cls.data(), dlogits.data(), dr.data());
        if (!cache.r_mask.empty()) kernels::vmul(cache.r_mask, dr);
        for (std::size_t k = 0; k < 2 * h; ++k) {
            if (cache.u[k] <= 0.0) dr[k] = 0.0; // through ReLU
        }

        std::vector<double> d_fwd_h(dr.begin(), dr.begin() + static_cast<std::ptrdiff_t>(h));
        std::vector<double> d_bwd_h(dr.begin() + static_cast<std::ptrdiff_t>(h), dr.end());

        std::vector<const std::vector<double>*> fwd_in, bwd_in;
        for (const auto& v : cache.x) fwd_in.push_back(&v);
        bwd_in.assign(fwd_in.rbegin(), fwd_in.rend());

        direction_backward(params_.u_fwd, cache.fwd, fwd_in, d_fwd_h, h, d, g.w_fwd, g.u_fwd,
                           g.b_fwd);
        direction_backward(params_.u_bwd, cache.bwd, bwd_in, d_bwd_h, h, d, g.w_bwd, g.u_bwd,
                           g.b_bwd);
    }

    out.loss += config_.weight_decay * kernels::sumsq(params_.w_cls);
    kernels::axpy(2.0 * config_.weight_decay, params_.w_cls, g.w_cls);
    return out;
}

metrics::MetricSet evaluate_set(const FemModel& model, const TrainData& data) {
    if (data.x.size() != data.y.size()) throw FemError("evaluate_set: size mismatch");
    std::vector<int> pred;
    pred.reserve(data.x.size());
    for (const auto& seq : data.x) pred.push_back(model.predict(seq));
    return metrics::metrics(metrics::confusion(data.y, pred));
}

} // namespace femkit::fem
