#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "jamsup/layers.hpp"
#include "jamsup/rng.hpp"
#include "jamsup/tensor.hpp"

namespace jamsup {

struct NetworkConfig {
    std::size_t depth = 5;
    std::size_t hidden_filters = 32;
    std::size_t kernel_rows = 5;
    std::size_t kernel_cols = 1;
    std::size_t input_channels = 4;
    std::size_t output_channels = 2;

    void validate() const {
        if (depth < 2) throw std::invalid_argument("network depth must be >= 2");
        if (hidden_filters == 0) throw std::invalid_argument("hidden_filters must be > 0");
    }
    std::size_t num_bn_layers() const { return depth - 2; }
};

// Layer 1: conv -> ReLU; layers 2..D-1: conv -> ReLU -> BN; layer D: conv.
template <typename Real>
struct NetworkWeights {
    std::vector<ConvLayerParams<Real>> conv_layers;  // size D
    std::vector<BatchNormParams<Real>> bn_layers;    // size D-2

    void check_consistent(const NetworkConfig& cfg) const {
        if (conv_layers.size() != cfg.depth || bn_layers.size() != cfg.num_bn_layers())
            throw std::invalid_argument("weights inconsistent with network config");
    }
};

// Kernels and biases U(-1/sqrt(fan_in), 1/sqrt(fan_in)); BN gamma 1, beta 0.
template <typename Real>
NetworkWeights<Real> init_weights(const NetworkConfig& cfg, Rng& rng) {
    cfg.validate();
    NetworkWeights<Real> w;
    for (std::size_t d = 0; d < cfg.depth; ++d) {
        const std::size_t cin = d == 0 ? cfg.input_channels : cfg.hidden_filters;
        const std::size_t cout = d == cfg.depth - 1 ? cfg.output_channels : cfg.hidden_filters;
        ConvLayerParams<Real> layer(cfg.kernel_rows, cfg.kernel_cols, cin, cout);
        // uniform fan-in init; the wider He-normal init trains equally well at
        // the operating point but generalizes measurably worse off it
        const double bound =
            1.0 / std::sqrt(static_cast<double>(cfg.kernel_rows * cfg.kernel_cols * cin));
        for (auto& k : layer.kernels) k = static_cast<Real>(rng.uniform(-bound, bound));
        for (auto& b : layer.biases) b = static_cast<Real>(rng.uniform(-bound, bound));
        w.conv_layers.push_back(std::move(layer));
    }
    for (std::size_t d = 0; d < cfg.num_bn_layers(); ++d)
        w.bn_layers.emplace_back(cfg.hidden_filters);
    return w;
}

template <typename Real>
struct ForwardCache {
    // conv_inputs[d] is the batch fed to conv layer d; pre_relu[d] the conv
    // output of layers 0..D-2 (needed for the ReLU mask)
    std::vector<std::vector<Tensor3<Real>>> conv_inputs;
    std::vector<std::vector<Tensor3<Real>>> pre_relu;
    std::vector<BnCache<Real>> bn_caches;
};

template <typename Real>
std::vector<Tensor3<Real>> network_forward(const std::vector<Tensor3<Real>>& batch,
                                           NetworkWeights<Real>& weights,
                                           const NetworkConfig& cfg, BnMode mode,
                                           ForwardCache<Real>* cache = nullptr) {
    weights.check_consistent(cfg);
    if (batch.empty()) throw std::invalid_argument("network_forward: empty batch");

    if (cache) {
        cache->conv_inputs.assign(cfg.depth, {});
        cache->pre_relu.assign(cfg.depth, {});
        cache->bn_caches.assign(cfg.num_bn_layers(), {});
    }

    std::vector<Tensor3<Real>> cur = batch;
    for (std::size_t d = 0; d < cfg.depth; ++d) {
        if (cache) cache->conv_inputs[d] = cur;
        std::vector<Tensor3<Real>> next(cur.size());
        for (std::size_t b = 0; b < cur.size(); ++b)
            next[b] = conv2d_forward(cur[b], weights.conv_layers[d]);
        if (d == cfg.depth - 1) {
            cur = std::move(next);
            break;
        }
        if (cache) cache->pre_relu[d] = next;
        for (auto& t : next) t = relu_forward(t);
        if (d >= 1) {
            next = batchnorm_forward(next, weights.bn_layers[d - 1], mode,
                                     cache ? &cache->bn_caches[d - 1] : nullptr);
        }
        cur = std::move(next);
    }
    return cur;
}

template <typename Real>
struct WeightGrads {
    std::vector<std::vector<Real>> kernel_grads, bias_grads;  // per conv layer
    std::vector<std::vector<Real>> gamma_grads, beta_grads;   // per BN layer
};

// Gradients of the training-mode forward pass w.r.t. all parameters.
template <typename Real>
WeightGrads<Real> network_backward(const ForwardCache<Real>& cache,
                                   const NetworkWeights<Real>& weights,
                                   const NetworkConfig& cfg,
                                   const std::vector<Tensor3<Real>>& upstream) {
    WeightGrads<Real> g;
    g.kernel_grads.resize(cfg.depth);
    g.bias_grads.resize(cfg.depth);
    g.gamma_grads.resize(cfg.num_bn_layers());
    g.beta_grads.resize(cfg.num_bn_layers());

    std::vector<Tensor3<Real>> up = upstream;
    for (std::size_t di = cfg.depth; di-- > 0;) {
        if (di != cfg.depth - 1) {
            if (di >= 1) {
                BnGrads<Real> bg =
                    batchnorm_backward(cache.bn_caches[di - 1], weights.bn_layers[di - 1], up);
                g.gamma_grads[di - 1] = std::move(bg.gamma_grad);
                g.beta_grads[di - 1] = std::move(bg.beta_grad);
                up = std::move(bg.input_grad);
            }
            for (std::size_t b = 0; b < up.size(); ++b)
                up[b] = relu_backward(cache.pre_relu[di][b], up[b]);
        }
        g.kernel_grads[di].assign(weights.conv_layers[di].kernels.size(), Real(0));
        g.bias_grads[di].assign(weights.conv_layers[di].biases.size(), Real(0));
        std::vector<Tensor3<Real>> down(up.size());
        for (std::size_t b = 0; b < up.size(); ++b) {
            ConvGrads<Real> cg =
                conv2d_backward(cache.conv_inputs[di][b], weights.conv_layers[di], up[b]);
            for (std::size_t i = 0; i < cg.kernel_grad.size(); ++i)
                g.kernel_grads[di][i] += cg.kernel_grad[i];
            for (std::size_t i = 0; i < cg.bias_grad.size(); ++i)
                g.bias_grads[di][i] += cg.bias_grad[i];
            down[b] = std::move(cg.input_grad);
        }
        up = std::move(down);
    }
    return g;
}

// Squared l2 error summed over the batch and both real/imag planes.
template <typename Real>
Real loss(const std::vector<Tensor3<Real>>& predictions,
          const std::vector<Tensor3<Real>>& targets) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("loss: batch size mismatch");
    Real total = Real(0);
    for (std::size_t b = 0; b < predictions.size(); ++b) {
        if (!predictions[b].same_shape(targets[b]))
            throw std::invalid_argument("loss: shape mismatch");
        for (std::size_t i = 0; i < predictions[b].data.size(); ++i) {
            const Real d = targets[b].data[i] - predictions[b].data[i];
            total += d * d;
        }
    }
    return total;
}

template <typename Real>
std::vector<Tensor3<Real>> loss_grad(const std::vector<Tensor3<Real>>& predictions,
                                     const std::vector<Tensor3<Real>>& targets) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("loss_grad: batch size mismatch");
    std::vector<Tensor3<Real>> g(predictions.size());
    for (std::size_t b = 0; b < predictions.size(); ++b) {
        if (!predictions[b].same_shape(targets[b]))
            throw std::invalid_argument("loss_grad: shape mismatch");
        g[b] = Tensor3<Real>(predictions[b].rows, predictions[b].cols, predictions[b].channels);
        for (std::size_t i = 0; i < predictions[b].data.size(); ++i)
            g[b].data[i] = Real(2) * (predictions[b].data[i] - targets[b].data[i]);
    }
    return g;
}

// Visits every trainable parameter in a fixed order (conv kernels+biases per
// layer, then BN gamma+beta per layer); serialization and ADAM share it.
template <typename Real, typename Fn>
void for_each_param(NetworkWeights<Real>& w, Fn&& fn) {
    for (auto& layer : w.conv_layers) {
        for (auto& k : layer.kernels) fn(k);
        for (auto& b : layer.biases) fn(b);
    }
    for (auto& bn : w.bn_layers) {
        for (auto& gm : bn.gamma) fn(gm);
        for (auto& bt : bn.beta) fn(bt);
    }
}

template <typename Real, typename Fn>
void for_each_param_grad(NetworkWeights<Real>& w, const WeightGrads<Real>& g, Fn&& fn) {
    for (std::size_t d = 0; d < w.conv_layers.size(); ++d) {
        auto& layer = w.conv_layers[d];
        for (std::size_t i = 0; i < layer.kernels.size(); ++i)
            fn(layer.kernels[i], g.kernel_grads[d][i]);
        for (std::size_t i = 0; i < layer.biases.size(); ++i)
            fn(layer.biases[i], g.bias_grads[d][i]);
    }
    for (std::size_t d = 0; d < w.bn_layers.size(); ++d) {
        auto& bn = w.bn_layers[d];
        for (std::size_t i = 0; i < bn.gamma.size(); ++i) fn(bn.gamma[i], g.gamma_grads[d][i]);
        for (std::size_t i = 0; i < bn.beta.size(); ++i) fn(bn.beta[i], g.beta_grads[d][i]);
    }
}

template <typename Real>
std::size_t num_params(const NetworkWeights<Real>& w) {
    std::size_t n = 0;
    for_each_param(const_cast<NetworkWeights<Real>&>(w), [&](Real&) { ++n; });
    return n;
}

}  // namespace jamsup
