#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "jamsup/tensor.hpp"

namespace jamsup {

// kernels indexed (row, col, in_channel, out_channel), out innermost
template <typename Real>
struct ConvLayerParams {
    std::size_t kernel_rows = 5, kernel_cols = 2;
    std::size_t in_channels = 0, out_channels = 0;
    std::vector<Real> kernels;
    std::vector<Real> biases;

    ConvLayerParams() = default;
    ConvLayerParams(std::size_t kr, std::size_t kc, std::size_t cin, std::size_t cout)
        : kernel_rows(kr), kernel_cols(kc), in_channels(cin), out_channels(cout),
          kernels(kr * kc * cin * cout, Real(0)), biases(cout, Real(0)) {}

    Real& kernel(std::size_t r, std::size_t c, std::size_t i, std::size_t o) {
        return kernels[((r * kernel_cols + c) * in_channels + i) * out_channels + o];
    }
    Real kernel(std::size_t r, std::size_t c, std::size_t i, std::size_t o) const {
        return kernels[((r * kernel_cols + c) * in_channels + i) * out_channels + o];
    }
};

// Cross-correlation with zero padding of (kernel_rows-1)/2 rows top and bottom
// and kernel_cols-1 columns on the right; spatial dims are preserved.
template <typename Real>
Tensor3<Real> conv2d_forward(const Tensor3<Real>& input,
                             const ConvLayerParams<Real>& params) {
    if (input.channels != params.in_channels)
        throw std::invalid_argument("conv2d_forward: channel mismatch");
    if (params.kernel_rows % 2 == 0)
        throw std::invalid_argument("conv2d_forward: kernel_rows must be odd");
    const std::size_t rows = input.rows, cols = input.cols;
    const std::size_t cin = params.in_channels, cout = params.out_channels;
    const std::size_t row_pad = (params.kernel_rows - 1) / 2;

    Tensor3<Real> out(rows, cols, cout);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            Real* acc = &out.at(r, c, 0);
            for (std::size_t o = 0; o < cout; ++o) acc[o] = params.biases[o];
            for (std::size_t kr = 0; kr < params.kernel_rows; ++kr) {
                const std::ptrdiff_t rr =
                    static_cast<std::ptrdiff_t>(r + kr) - static_cast<std::ptrdiff_t>(row_pad);
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(rows)) continue;
                for (std::size_t kc = 0; kc < params.kernel_cols; ++kc) {
                    const std::size_t cc = c + kc;
                    if (cc >= cols) continue;
                    const Real* in = &input.at(static_cast<std::size_t>(rr), cc, 0);
                    const Real* ker =
                        &params.kernels[((kr * params.kernel_cols + kc) * cin) * cout];
                    for (std::size_t i = 0; i < cin; ++i) {
                        const Real x = in[i];
                        const Real* kr_ptr = ker + i * cout;
                        for (std::size_t o = 0; o < cout; ++o) acc[o] += x * kr_ptr[o];
                    }
                }
            }
        }
    }
    return out;
}

template <typename Real>
struct ConvGrads {
    Tensor3<Real> input_grad;
    std::vector<Real> kernel_grad;
    std::vector<Real> bias_grad;
};

template <typename Real>
ConvGrads<Real> conv2d_backward(const Tensor3<Real>& input,
                                const ConvLayerParams<Real>& params,
                                const Tensor3<Real>& upstream) {
    if (input.channels != params.in_channels ||
        upstream.channels != params.out_channels ||
        upstream.rows != input.rows || upstream.cols != input.cols)
        throw std::invalid_argument("conv2d_backward: shape mismatch");
    const std::size_t rows = input.rows, cols = input.cols;
    const std::size_t cin = params.in_channels, cout = params.out_channels;
    const std::size_t row_pad = (params.kernel_rows - 1) / 2;

    ConvGrads<Real> g;
    g.input_grad = Tensor3<Real>(rows, cols, cin);
    g.kernel_grad.assign(params.kernels.size(), Real(0));
    g.bias_grad.assign(cout, Real(0));

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const Real* up = &upstream.at(r, c, 0);
            for (std::size_t o = 0; o < cout; ++o) g.bias_grad[o] += up[o];
            for (std::size_t kr = 0; kr < params.kernel_rows; ++kr) {
                const std::ptrdiff_t rr =
                    static_cast<std::ptrdiff_t>(r + kr) - static_cast<std::ptrdiff_t>(row_pad);
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(rows)) continue;
                for (std::size_t kc = 0; kc < params.kernel_cols; ++kc) {
                    const std::size_t cc = c + kc;
                    if (cc >= cols) continue;
                    const Real* in = &input.at(static_cast<std::size_t>(rr), cc, 0);
                    Real* ing = &g.input_grad.at(static_cast<std::size_t>(rr), cc, 0);
                    const std::size_t base = (kr * params.kernel_cols + kc) * cin;
                    for (std::size_t i = 0; i < cin; ++i) {
                        const Real x = in[i];
                        const Real* ker = &params.kernels[(base + i) * cout];
                        Real* kg = &g.kernel_grad[(base + i) * cout];
                        Real acc = Real(0);
                        for (std::size_t o = 0; o < cout; ++o) {
                            kg[o] += x * up[o];
                            acc += ker[o] * up[o];
                        }
                        ing[i] += acc;
                    }
                }
            }
        }
    }
    return g;
}

template <typename Real>
Tensor3<Real> relu_forward(const Tensor3<Real>& x) {
    Tensor3<Real> y = x;
    for (auto& v : y.data) v = v > Real(0) ? v : Real(0);
    return y;
}

// subgradient 0 at x == 0
template <typename Real>
Tensor3<Real> relu_backward(const Tensor3<Real>& x, const Tensor3<Real>& upstream) {
    if (!x.same_shape(upstream))
        throw std::invalid_argument("relu_backward: shape mismatch");
    Tensor3<Real> g(x.rows, x.cols, x.channels);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        g.data[i] = x.data[i] > Real(0) ? upstream.data[i] : Real(0);
    return g;
}

template <typename Real>
struct BatchNormParams {
    std::vector<Real> gamma, beta;
    std::vector<Real> running_mean, running_var;
    Real momentum = Real(0.9);
    Real epsilon = Real(1e-5);

    BatchNormParams() = default;
    explicit BatchNormParams(std::size_t channels)
        : gamma(channels, Real(1)), beta(channels, Real(0)),
          running_mean(channels, Real(0)), running_var(channels, Real(1)) {}
};

enum class BnMode { training, inference };

template <typename Real>
struct BnCache {
    bool training = false;
    std::vector<Tensor3<Real>> input;  // pre-normalization batch
    std::vector<Real> mean, var, inv_std;
};

// Statistics are taken per channel over (batch x rows x cols); training mode
// updates running stats as running <- momentum*running + (1-momentum)*batch.
template <typename Real>
std::vector<Tensor3<Real>> batchnorm_forward(const std::vector<Tensor3<Real>>& batch,
                                             BatchNormParams<Real>& params,
                                             BnMode mode,
                                             BnCache<Real>* cache = nullptr) {
    if (batch.empty())
        throw std::invalid_argument("batchnorm_forward: empty batch");
    const std::size_t channels = batch[0].channels;
    if (params.gamma.size() != channels)
        throw std::invalid_argument("batchnorm_forward: channel mismatch");
    for (const auto& t : batch)
        if (t.rows != batch[0].rows || t.cols != batch[0].cols ||
            t.channels != channels)
            throw std::invalid_argument("batchnorm_forward: ragged batch shapes");

    std::vector<Tensor3<Real>> out(batch.size());
    const std::size_t per_example = batch[0].rows * batch[0].cols;
    const std::size_t count = batch.size() * per_example;

    if (mode == BnMode::training) {
        if (batch.size() < 2)
            throw std::invalid_argument("batchnorm_forward: training needs batch size >= 2");
        std::vector<Real> mean(channels, Real(0)), var(channels, Real(0));
        for (const auto& t : batch)
            for (std::size_t p = 0; p < per_example; ++p)
                for (std::size_t ch = 0; ch < channels; ++ch)
                    mean[ch] += t.data[p * channels + ch];
        for (auto& m : mean) m /= static_cast<Real>(count);
        for (const auto& t : batch)
            for (std::size_t p = 0; p < per_example; ++p)
                for (std::size_t ch = 0; ch < channels; ++ch) {
                    const Real d = t.data[p * channels + ch] - mean[ch];
                    var[ch] += d * d;
                }
        for (auto& v : var) v /= static_cast<Real>(count);

        std::vector<Real> inv_std(channels);
        for (std::size_t ch = 0; ch < channels; ++ch)
            inv_std[ch] = Real(1) / std::sqrt(var[ch] + params.epsilon);

        for (std::size_t b = 0; b < batch.size(); ++b) {
            out[b] = Tensor3<Real>(batch[b].rows, batch[b].cols, channels);
            for (std::size_t p = 0; p < per_example; ++p)
                for (std::size_t ch = 0; ch < channels; ++ch) {
                    const Real xhat =
                        (batch[b].data[p * channels + ch] - mean[ch]) * inv_std[ch];
                    out[b].data[p * channels + ch] = params.gamma[ch] * xhat + params.beta[ch];
                }
        }
        for (std::size_t ch = 0; ch < channels; ++ch) {
            params.running_mean[ch] =
                params.momentum * params.running_mean[ch] + (Real(1) - params.momentum) * mean[ch];
            params.running_var[ch] =
                params.momentum * params.running_var[ch] + (Real(1) - params.momentum) * var[ch];
        }
        if (cache) {
            cache->training = true;
            cache->input = batch;
            cache->mean = std::move(mean);
            cache->var = std::move(var);
            cache->inv_std = std::move(inv_std);
        }
    } else {
        std::vector<Real> inv_std(channels);
        for (std::size_t ch = 0; ch < channels; ++ch)
            inv_std[ch] = Real(1) / std::sqrt(params.running_var[ch] + params.epsilon);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            out[b] = Tensor3<Real>(batch[b].rows, batch[b].cols, channels);
            for (std::size_t p = 0; p < per_example; ++p)
                for (std::size_t ch = 0; ch < channels; ++ch) {
                    const Real xhat =
                        (batch[b].data[p * channels + ch] - params.running_mean[ch]) * inv_std[ch];
                    out[b].data[p * channels + ch] = params.gamma[ch] * xhat + params.beta[ch];
                }
        }
        if (cache) cache->training = false;
    }
    return out;
}

template <typename Real>
struct BnGrads {
    std::vector<Tensor3<Real>> input_grad;
    std::vector<Real> gamma_grad, beta_grad;
};

// Full coupled gradient through the batch statistics.
template <typename Real>
BnGrads<Real> batchnorm_backward(const BnCache<Real>& cache,
                                 const BatchNormParams<Real>& params,
                                 const std::vector<Tensor3<Real>>& upstream) {
    if (!cache.training)
        throw std::invalid_argument("batchnorm_backward: cache is not from training mode");
    if (upstream.size() != cache.input.size())
        throw std::invalid_argument("batchnorm_backward: batch size mismatch");

    const std::size_t channels = cache.mean.size();
    const std::size_t per_example = cache.input[0].rows * cache.input[0].cols;
    const std::size_t count = cache.input.size() * per_example;
    const Real m = static_cast<Real>(count);

    BnGrads<Real> g;
    g.gamma_grad.assign(channels, Real(0));
    g.beta_grad.assign(channels, Real(0));
    std::vector<Real> sum_dxhat(channels, Real(0));
    std::vector<Real> sum_dxhat_xhat(channels, Real(0));

    for (std::size_t b = 0; b < upstream.size(); ++b)
        for (std::size_t p = 0; p < per_example; ++p)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                const Real up = upstream[b].data[p * channels + ch];
                const Real xhat =
                    (cache.input[b].data[p * channels + ch] - cache.mean[ch]) * cache.inv_std[ch];
                g.beta_grad[ch] += up;
                g.gamma_grad[ch] += up * xhat;
                const Real dxhat = up * params.gamma[ch];
                sum_dxhat[ch] += dxhat;
                sum_dxhat_xhat[ch] += dxhat * xhat;
            }

    g.input_grad.resize(upstream.size());
    for (std::size_t b = 0; b < upstream.size(); ++b) {
        g.input_grad[b] =
            Tensor3<Real>(cache.input[b].rows, cache.input[b].cols, channels);
        for (std::size_t p = 0; p < per_example; ++p)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                const Real up = upstream[b].data[p * channels + ch];
                const Real xhat =
                    (cache.input[b].data[p * channels + ch] - cache.mean[ch]) * cache.inv_std[ch];
                const Real dxhat = up * params.gamma[ch];
                g.input_grad[b].data[p * channels + ch] =
                    cache.inv_std[ch] *
                    (dxhat - sum_dxhat[ch] / m - xhat * sum_dxhat_xhat[ch] / m);
            }
    }
    return g;
}

}  // namespace jamsup
