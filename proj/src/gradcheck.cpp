#include "jamsup/gradcheck.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "jamsup/network.hpp"
#include "jamsup/rng.hpp"

namespace jamsup {

namespace {

double rel_error(double analytic, double numeric) {
    const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    return std::abs(analytic - numeric) / denom;
}

double central_diff(const std::function<double()>& objective, double& param,
                    double step) {
    const double saved = param;
    param = saved + step;
    const double plus = objective();
    param = saved - step;
    const double minus = objective();
    param = saved;
    return (plus - minus) / (2.0 * step);
}

Tensor3<double> random_tensor(std::size_t r, std::size_t c, std::size_t ch, Rng& rng) {
    Tensor3<double> t(r, c, ch);
    for (auto& v : t.data) v = rng.gaussian();
    return t;
}

// objective = sum of weights * output entries, so upstream grad = weights
struct Probe {
    Tensor3<double> weights;
    double apply(const Tensor3<double>& out) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < out.data.size(); ++i)
            acc += weights.data[i] * out.data[i];
        return acc;
    }
};

bool check_conv(Rng& rng, const GradCheckOptions& opts, double& worst) {
    const std::size_t s = 8, cin = 2, cout = 3;
    Tensor3<double> input = random_tensor(s, 2, cin, rng);
    ConvLayerParams<double> params(5, 2, cin, cout);
    for (auto& k : params.kernels) k = rng.gaussian();
    for (auto& b : params.biases) b = rng.gaussian();
    Probe probe{random_tensor(s, 2, cout, rng)};

    const auto objective = [&] { return probe.apply(conv2d_forward(input, params)); };
    const ConvGrads<double> g = conv2d_backward(input, params, probe.weights);

    bool ok = true;
    auto check = [&](double analytic, double& param) {
        const double numeric = central_diff(objective, param, opts.fd_step);
        const double err = rel_error(analytic, numeric);
        worst = std::max(worst, err);
        if (err >= opts.tolerance) ok = false;
    };
    for (std::size_t i = 0; i < input.data.size(); ++i)
        check(g.input_grad.data[i], input.data[i]);
    for (std::size_t i = 0; i < params.kernels.size(); ++i)
        check(g.kernel_grad[i], params.kernels[i]);
    for (std::size_t i = 0; i < params.biases.size(); ++i)
        check(g.bias_grad[i], params.biases[i]);
    return ok;
}

bool check_relu(Rng& rng, const GradCheckOptions& opts, double& worst) {
    Tensor3<double> x = random_tensor(8, 2, 3, rng);
    // keep every entry away from the kink so central differences are valid
    for (auto& v : x.data)
        if (std::abs(v) < 0.1) v = v < 0 ? v - 0.1 : v + 0.1;
    Probe probe{random_tensor(8, 2, 3, rng)};
    const auto objective = [&] { return probe.apply(relu_forward(x)); };
    const Tensor3<double> g = relu_backward(x, probe.weights);

    bool ok = true;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double numeric = central_diff(objective, x.data[i], opts.fd_step);
        const double err = rel_error(g.data[i], numeric);
        worst = std::max(worst, err);
        if (err >= opts.tolerance) ok = false;
    }
    return ok;
}

bool check_batchnorm(Rng& rng, const GradCheckOptions& opts, double& worst) {
    const std::size_t batch = 3, channels = 4;
    std::vector<Tensor3<double>> input(batch);
    std::vector<Tensor3<double>> probes(batch);
    for (auto& t : input) t = random_tensor(8, 2, channels, rng);
    for (auto& t : probes) t = random_tensor(8, 2, channels, rng);
    BatchNormParams<double> params(channels);
    for (auto& v : params.gamma) v = 1.0 + 0.5 * rng.gaussian();
    for (auto& v : params.beta) v = rng.gaussian();

    const auto objective = [&] {
        BatchNormParams<double> scratch = params;  // keep running stats untouched
        const auto out = batchnorm_forward(input, scratch, BnMode::training);
        double acc = 0.0;
        for (std::size_t b = 0; b < batch; ++b) acc += Probe{probes[b]}.apply(out[b]);
        return acc;
    };

    BatchNormParams<double> scratch = params;
    BnCache<double> cache;
    batchnorm_forward(input, scratch, BnMode::training, &cache);
    const BnGrads<double> g = batchnorm_backward(cache, params, probes);

    bool ok = true;
    auto check = [&](double analytic, double& param) {
        const double numeric = central_diff(objective, param, opts.fd_step);
        const double err = rel_error(analytic, numeric);
        worst = std::max(worst, err);
        if (err >= opts.tolerance) ok = false;
    };
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < input[b].data.size(); ++i)
            check(g.input_grad[b].data[i], input[b].data[i]);
    for (std::size_t i = 0; i < channels; ++i) check(g.gamma_grad[i], params.gamma[i]);
    for (std::size_t i = 0; i < channels; ++i) check(g.beta_grad[i], params.beta[i]);
    return ok;
}

bool check_end_to_end(Rng& rng, const GradCheckOptions& opts, double& worst) {
    NetworkConfig cfg;
    cfg.depth = 3;
    cfg.hidden_filters = 4;
    const std::size_t s = 8, batch = 3;

    NetworkWeights<double> weights = init_weights<double>(cfg, rng);
    std::vector<Tensor3<double>> inputs(batch), targets(batch);
    for (auto& t : inputs) t = random_tensor(s, 1, cfg.input_channels, rng);
    for (auto& t : targets) t = random_tensor(s, 1, cfg.output_channels, rng);

    const auto objective = [&] {
        NetworkWeights<double> scratch = weights;  // BN running stats untouched
        return static_cast<double>(
            loss(network_forward(inputs, scratch, cfg, BnMode::training), targets));
    };

    NetworkWeights<double> scratch = weights;
    ForwardCache<double> cache;
    const auto pred = network_forward(inputs, scratch, cfg, BnMode::training, &cache);
    const WeightGrads<double> grads =
        network_backward(cache, weights, cfg, loss_grad(pred, targets));

    bool ok = true;
    for_each_param_grad(weights, grads, [&](double& param, double analytic) {
        const double numeric = central_diff(objective, param, opts.fd_step);
        const double err = rel_error(analytic, numeric);
        worst = std::max(worst, err);
        if (err >= opts.tolerance) ok = false;
    });
    return ok;
}

}  // namespace

bool run_gradcheck(std::ostream& os, const GradCheckOptions& opts) {
    struct Category {
        const char* name;
        bool (*fn)(Rng&, const GradCheckOptions&, double&);
    };
    const Category categories[] = {
        {"conv2d", check_conv},
        {"relu", check_relu},
        {"batchnorm", check_batchnorm},
        {"end_to_end_loss", check_end_to_end},
    };

    bool all_ok = true;
    for (const auto& cat : categories) {
        bool ok = true;
        double worst = 0.0;
        for (std::size_t t = 0; t < opts.trials; ++t) {
            Rng rng(derive_seed(opts.seed, 0x67726164, t));
            ok = cat.fn(rng, opts, worst) && ok;
        }
        os << (ok ? "PASS" : "FAIL") << " " << cat.name << " (" << opts.trials
           << " trials, worst rel err " << worst << ")\n";
        all_ok = all_ok && ok;
    }
    return all_ok;
}

}  // namespace jamsup
