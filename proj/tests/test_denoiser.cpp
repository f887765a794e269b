#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jamsup/denoiser.hpp"
#include "jamsup/gradcheck.hpp"
#include "jamsup/model_io.hpp"

using namespace jamsup;

namespace {

Tensor3<double> random_tensor(std::size_t r, std::size_t c, std::size_t ch, Rng& rng) {
    Tensor3<double> t(r, c, ch);
    for (auto& v : t.data) v = rng.gaussian();
    return t;
}

// independent reference convolution: direct summation, no layout tricks
Tensor3<double> conv_oracle(const Tensor3<double>& in, const ConvLayerParams<double>& p) {
    const std::ptrdiff_t row_pad = static_cast<std::ptrdiff_t>((p.kernel_rows - 1) / 2);
    Tensor3<double> out(in.rows, in.cols, p.out_channels);
    for (std::size_t r = 0; r < in.rows; ++r)
        for (std::size_t c = 0; c < in.cols; ++c)
            for (std::size_t o = 0; o < p.out_channels; ++o) {
                double acc = p.biases[o];
                for (std::size_t kr = 0; kr < p.kernel_rows; ++kr)
                    for (std::size_t kc = 0; kc < p.kernel_cols; ++kc)
                        for (std::size_t i = 0; i < p.in_channels; ++i) {
                            const std::ptrdiff_t rr =
                                static_cast<std::ptrdiff_t>(r + kr) - row_pad;
                            const std::size_t cc = c + kc;
                            if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(in.rows) ||
                                cc >= in.cols)
                                continue;
                            acc += in.at(static_cast<std::size_t>(rr), cc, i) *
                                   p.kernel(kr, kc, i, o);
                        }
                out.at(r, c, o) = acc;
            }
    return out;
}

TrainedModel random_model(const NetworkConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    TrainedModel m;
    m.config = cfg;
    m.weights = init_weights<float>(cfg, rng);
    for (auto& bn : m.weights.bn_layers) {
        for (auto& v : bn.running_mean) v = static_cast<float>(0.1 * rng.gaussian());
        for (auto& v : bn.running_var) v = static_cast<float>(1.0 + 0.2 * rng.uniform01());
    }
    return m;
}

std::string model_bytes(const TrainedModel& m) {
    std::ostringstream os(std::ios::binary);
    save_model(m, os);
    return os.str();
}

std::vector<Example> small_dataset(std::size_t count, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.spreading_factor = 16;
    cfg.num_users = 16;
    cfg.num_active = 2;
    cfg.num_segments = 12;
    cfg.seed = seed;
    return generate_dataset(cfg, hadamard_codes(16), qpsk(), count);
}

}  // namespace

TEST_CASE("build_input_tensor shape and normalization") {
    const auto codes = hadamard_codes(16);
    Rng rng(2);
    std::vector<cplx> r(16);
    for (auto& v : r) v = cplx(rng.gaussian(), rng.gaussian());

    const auto in = build_input_tensor<double>(r, codes);
    CHECK(in.tensor.rows == 16);
    CHECK(in.tensor.cols == 1);
    CHECK(in.tensor.channels == 4);

    // max complex magnitude of each normalized Re/Im channel pair is exactly 1
    for (std::size_t pair = 0; pair < 2; ++pair) {
        double max_mag = 0.0;
        for (std::size_t k = 0; k < 16; ++k)
            max_mag = std::max(max_mag, std::hypot(in.tensor.at(k, 0, 2 * pair),
                                                   in.tensor.at(k, 0, 2 * pair + 1)));
        CHECK(max_mag == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("build_input_tensor zero guard") {
    const auto codes = hadamard_codes(8);
    const std::vector<cplx> r(8, cplx(0, 0));
    const auto in = build_input_tensor<double>(r, codes);
    CHECK(in.scale_received == 1.0);
    CHECK(in.scale_mfb == 1.0);
    for (double v : in.tensor.data) CHECK(v == 0.0);
}

TEST_CASE("build_input_tensor requires N == S") {
    SpreadingMatrix codes = hadamard_codes(8);
    codes.num_users = 4;
    codes.entries.resize(8 * 4);
    const std::vector<cplx> r(8, cplx(1, 0));
    CHECK_THROWS_AS(build_input_tensor<double>(r, codes), std::invalid_argument);
}

TEST_CASE("conv2d with zero kernels emits the bias") {
    ConvLayerParams<double> p(5, 2, 3, 2);
    p.biases = {0.7, -1.2};
    Rng rng(5);
    const auto out = conv2d_forward(random_tensor(10, 2, 3, rng), p);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(out.at(r, c, 0) == doctest::Approx(0.7));
            CHECK(out.at(r, c, 1) == doctest::Approx(-1.2));
        }
}

TEST_CASE("conv2d all-ones kernel on all-ones input") {
    ConvLayerParams<double> p(5, 2, 1, 1);
    for (auto& k : p.kernels) k = 1.0;
    Tensor3<double> in(8, 2, 1);
    for (auto& v : in.data) v = 1.0;
    const auto out = conv2d_forward(in, p);
    for (std::size_t r = 2; r <= 5; ++r) {
        CHECK(out.at(r, 0, 0) == doctest::Approx(10.0));  // 5 rows x 2 cols
        CHECK(out.at(r, 1, 0) == doctest::Approx(5.0));   // right column is zero padding
    }
}

TEST_CASE("conv2d matches the brute-force oracle on random tensors") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t cin = 1 + rng.uniform_below(3);
        const std::size_t cout = 1 + rng.uniform_below(3);
        const std::size_t rows = 4 + rng.uniform_below(12);
        ConvLayerParams<double> p(5, 2, cin, cout);
        for (auto& k : p.kernels) k = rng.gaussian();
        for (auto& b : p.biases) b = rng.gaussian();
        const auto in = random_tensor(rows, 2, cin, rng);
        const auto got = conv2d_forward(in, p);
        const auto want = conv_oracle(in, p);
        REQUIRE(got.data.size() == want.data.size());
        for (std::size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("conv2d rejects mismatched channels") {
    ConvLayerParams<double> p(5, 2, 3, 2);
    Rng rng(1);
    CHECK_THROWS_AS(conv2d_forward(random_tensor(8, 2, 2, rng), p),
                    std::invalid_argument);
}

TEST_CASE("conv2d backward is linear and zero on zero upstream") {
    Rng rng(30);
    ConvLayerParams<double> p(5, 2, 2, 2);
    for (auto& k : p.kernels) k = rng.gaussian();
    const auto in = random_tensor(8, 2, 2, rng);

    const Tensor3<double> zero(8, 2, 2);
    const auto gz = conv2d_backward(in, p, zero);
    for (double v : gz.input_grad.data) CHECK(v == 0.0);
    for (double v : gz.kernel_grad) CHECK(v == 0.0);
    for (double v : gz.bias_grad) CHECK(v == 0.0);

    const auto u1 = random_tensor(8, 2, 2, rng);
    const auto u2 = random_tensor(8, 2, 2, rng);
    Tensor3<double> usum = u1;
    for (std::size_t i = 0; i < usum.data.size(); ++i) usum.data[i] += u2.data[i];
    const auto g1 = conv2d_backward(in, p, u1);
    const auto g2 = conv2d_backward(in, p, u2);
    const auto gs = conv2d_backward(in, p, usum);
    for (std::size_t i = 0; i < gs.kernel_grad.size(); ++i)
        CHECK(std::abs(gs.kernel_grad[i] - (g1.kernel_grad[i] + g2.kernel_grad[i])) < 1e-12);
    for (std::size_t i = 0; i < gs.input_grad.data.size(); ++i)
        CHECK(std::abs(gs.input_grad.data[i] -
                       (g1.input_grad.data[i] + g2.input_grad.data[i])) < 1e-12);
}

TEST_CASE("relu forward and backward") {
    Tensor3<double> x(1, 1, 3);
    x.data = {-1.0, 0.0, 2.0};
    const auto y = relu_forward(x);
    CHECK(y.data == std::vector<double>{0.0, 0.0, 2.0});

    Tensor3<double> up(1, 1, 3);
    up.data = {5.0, 5.0, 5.0};
    const auto g = relu_backward(x, up);
    CHECK(g.data == std::vector<double>{0.0, 0.0, 5.0});
}

TEST_CASE("batchnorm training normalizes per channel") {
    Rng rng(14);
    std::vector<Tensor3<double>> batch(4);
    for (auto& t : batch) t = random_tensor(8, 2, 3, rng);
    BatchNormParams<double> p(3);
    const auto out = batchnorm_forward(batch, p, BnMode::training);

    for (std::size_t ch = 0; ch < 3; ++ch) {
        double mean = 0.0, var = 0.0;
        std::size_t n = 0;
        for (const auto& t : out)
            for (std::size_t r = 0; r < 8; ++r)
                for (std::size_t c = 0; c < 2; ++c) {
                    mean += t.at(r, c, ch);
                    ++n;
                }
        mean /= n;
        for (const auto& t : out)
            for (std::size_t r = 0; r < 8; ++r)
                for (std::size_t c = 0; c < 2; ++c)
                    var += (t.at(r, c, ch) - mean) * (t.at(r, c, ch) - mean);
        var /= n;
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("batchnorm inference with unit running stats is near identity") {
    Rng rng(6);
    std::vector<Tensor3<double>> batch(2);
    for (auto& t : batch) {
        t = Tensor3<double>(8, 2, 3);
        for (auto& v : t.data) v = rng.uniform(-1.0, 1.0);
    }
    BatchNormParams<double> p(3);  // gamma 1, beta 0, running (0, 1)
    const auto out = batchnorm_forward(batch, p, BnMode::inference);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < batch[b].data.size(); ++i)
            CHECK(std::abs(out[b].data[i] - batch[b].data[i]) < p.epsilon);
}

TEST_CASE("batchnorm training rejects batch size 1") {
    Rng rng(2);
    std::vector<Tensor3<double>> batch{random_tensor(8, 2, 3, rng)};
    BatchNormParams<double> p(3);
    CHECK_THROWS_AS(batchnorm_forward(batch, p, BnMode::training),
                    std::invalid_argument);
    CHECK_NOTHROW(batchnorm_forward(batch, p, BnMode::inference));
}

TEST_CASE("batchnorm backward basics") {
    Rng rng(23);
    std::vector<Tensor3<double>> batch(3);
    for (auto& t : batch) t = random_tensor(8, 2, 2, rng);
    BatchNormParams<double> p(2);
    for (auto& g : p.gamma) g = 1.0 + 0.3 * rng.gaussian();

    BnCache<double> cache;
    batchnorm_forward(batch, p, BnMode::training, &cache);

    std::vector<Tensor3<double>> zero(3, Tensor3<double>(8, 2, 2));
    const auto gz = batchnorm_backward(cache, p, zero);
    for (const auto& t : gz.input_grad)
        for (double v : t.data) CHECK(v == 0.0);
    for (double v : gz.gamma_grad) CHECK(v == 0.0);
    for (double v : gz.beta_grad) CHECK(v == 0.0);

    std::vector<Tensor3<double>> up(3);
    for (auto& t : up) t = random_tensor(8, 2, 2, rng);
    const auto g = batchnorm_backward(cache, p, up);
    for (std::size_t ch = 0; ch < 2; ++ch) {
        double sum = 0.0;
        for (const auto& t : up)
            for (std::size_t r = 0; r < 8; ++r)
                for (std::size_t c = 0; c < 2; ++c) sum += t.at(r, c, ch);
        CHECK(g.beta_grad[ch] == doctest::Approx(sum).epsilon(1e-12));
    }

    BnCache<double> inference_cache;
    batchnorm_forward(batch, p, BnMode::inference, &inference_cache);
    CHECK_THROWS_AS(batchnorm_backward(inference_cache, p, up), std::invalid_argument);
}

TEST_CASE("network_forward output shape and zero-weight behavior") {
    NetworkConfig cfg;
    cfg.depth = 4;
    cfg.hidden_filters = 6;
    Rng rng(3);
    auto w = init_weights<double>(cfg, rng);

    std::vector<Tensor3<double>> batch(3);
    for (auto& t : batch) t = random_tensor(12, 1, cfg.input_channels, rng);
    const auto out = network_forward(batch, w, cfg, BnMode::training);
    REQUIRE(out.size() == 3);
    for (const auto& t : out) {
        CHECK(t.rows == 12);
        CHECK(t.cols == 1);
        CHECK(t.channels == cfg.output_channels);
    }

    NetworkWeights<double> zero = w;
    for_each_param(zero, [](double& v) { v = 0.0; });
    // gamma = 0 too, so every path is annihilated
    const auto out0 = network_forward(batch, zero, cfg, BnMode::training);
    for (const auto& t : out0)
        for (double v : t.data) CHECK(v == 0.0);
}

TEST_CASE("gradcheck suite passes") {
    std::ostringstream os;
    GradCheckOptions opts;
    opts.trials = 5;
    CHECK(run_gradcheck(os, opts));
}

TEST_CASE("loss definition") {
    Rng rng(44);
    std::vector<Tensor3<double>> target{random_tensor(16, 2, 1, rng)};
    std::vector<Tensor3<double>> pred = target;
    CHECK(loss(pred, target) == 0.0);

    const double c = 0.37;
    for (auto& v : pred[0].data) v += c;
    CHECK(loss(pred, target) == doctest::Approx(2.0 * 16.0 * c * c).epsilon(1e-12));

    // equals the complex-domain squared error when planes recombine
    double complex_err = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        const cplx d(pred[0].at(k, 0, 0) - target[0].at(k, 0, 0),
                     pred[0].at(k, 1, 0) - target[0].at(k, 1, 0));
        complex_err += std::norm(d);
    }
    CHECK(std::abs(loss(pred, target) - complex_err) < 1e-12);

    std::vector<Tensor3<double>> wrong{random_tensor(8, 2, 1, rng)};
    CHECK_THROWS_AS(loss(pred, wrong), std::invalid_argument);
}

TEST_CASE("adam zero gradient is a no-op from a fresh state") {
    NetworkConfig cfg;
    cfg.depth = 3;
    cfg.hidden_filters = 4;
    Rng rng(10);
    auto w = init_weights<double>(cfg, rng);
    const auto before = w;

    WeightGrads<double> zero;
    zero.kernel_grads.resize(cfg.depth);
    zero.bias_grads.resize(cfg.depth);
    for (std::size_t d = 0; d < cfg.depth; ++d) {
        zero.kernel_grads[d].assign(w.conv_layers[d].kernels.size(), 0.0);
        zero.bias_grads[d].assign(w.conv_layers[d].biases.size(), 0.0);
    }
    zero.gamma_grads.assign(1, std::vector<double>(4, 0.0));
    zero.beta_grads.assign(1, std::vector<double>(4, 0.0));

    AdamState<double> state(num_params(w));
    adam_step(w, zero, state);
    CHECK(state.step_count == 1);
    for (std::size_t d = 0; d < cfg.depth; ++d)
        CHECK(w.conv_layers[d].kernels == before.conv_layers[d].kernels);
}

TEST_CASE("adam first step moves each weight by about the learning rate") {
    NetworkConfig cfg;
    cfg.depth = 2;
    cfg.hidden_filters = 3;
    Rng rng(10);
    auto w = init_weights<double>(cfg, rng);
    const auto before = w;

    WeightGrads<double> g;
    g.kernel_grads.resize(2);
    g.bias_grads.resize(2);
    Rng grng(77);
    for (std::size_t d = 0; d < 2; ++d) {
        g.kernel_grads[d].resize(w.conv_layers[d].kernels.size());
        g.bias_grads[d].resize(w.conv_layers[d].biases.size());
        for (auto& v : g.kernel_grads[d])
            v = (grng.gaussian() > 0 ? 1.0 : -1.0) * (0.5 + grng.uniform01());
        for (auto& v : g.bias_grads[d])
            v = (grng.gaussian() > 0 ? 1.0 : -1.0) * (0.5 + grng.uniform01());
    }

    AdamState<double> state(num_params(w));
    adam_step(w, g, state);
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t i = 0; i < w.conv_layers[d].kernels.size(); ++i) {
            const double step =
                std::abs(w.conv_layers[d].kernels[i] - before.conv_layers[d].kernels[i]);
            CHECK(step == doctest::Approx(state.learning_rate).epsilon(1e-4));
        }
}

TEST_CASE("adam is deterministic") {
    NetworkConfig cfg;
    cfg.depth = 2;
    cfg.hidden_filters = 2;
    Rng rng(1);
    auto w1 = init_weights<double>(cfg, rng);
    auto w2 = w1;

    WeightGrads<double> g;
    g.kernel_grads.resize(2);
    g.bias_grads.resize(2);
    Rng grng(5);
    for (std::size_t d = 0; d < 2; ++d) {
        g.kernel_grads[d].resize(w1.conv_layers[d].kernels.size());
        g.bias_grads[d].resize(w1.conv_layers[d].biases.size());
        for (auto& v : g.kernel_grads[d]) v = grng.gaussian();
        for (auto& v : g.bias_grads[d]) v = grng.gaussian();
    }
    AdamState<double> s1(num_params(w1)), s2(num_params(w2));
    adam_step(w1, g, s1);
    adam_step(w2, g, s2);
    for (std::size_t d = 0; d < 2; ++d)
        CHECK(w1.conv_layers[d].kernels == w2.conv_layers[d].kernels);
}

TEST_CASE("train reduces the loss and is deterministic") {
    const auto codes = hadamard_codes(16);
    const auto dataset = small_dataset(400, 5);

    NetworkConfig net;
    net.depth = 3;
    net.hidden_filters = 4;
    TrainConfig tc;
    tc.batch_size = 32;
    tc.epochs = 3;
    tc.seed = 9;

    ScenarioConfig meta;
    const auto m1 = train(dataset, codes, net, tc, meta);
    REQUIRE(m1.meta.epoch_losses.size() == 3);
    CHECK(m1.meta.epoch_losses[1] < m1.meta.epoch_losses[0]);

    const auto m2 = train(dataset, codes, net, tc, meta);
    CHECK(model_bytes(m1) == model_bytes(m2));

    CHECK_THROWS_AS(train({}, codes, net, tc, meta), std::invalid_argument);
}

TEST_CASE("train defaults match batch 64 and 200 epochs") {
    TrainConfig tc;
    CHECK(tc.batch_size == 64);
    CHECK(tc.epochs == 200);
    NetworkConfig nc;
    CHECK(nc.depth == 5);
    CHECK(nc.hidden_filters == 32);
}

TEST_CASE("denoise emits a deterministic length-S complex signal") {
    NetworkConfig cfg;
    cfg.depth = 3;
    cfg.hidden_filters = 4;
    const auto model = random_model(cfg, 4);
    const auto codes = hadamard_codes(16);
    Rng rng(8);
    std::vector<cplx> r(16);
    for (auto& v : r) v = cplx(rng.gaussian(), rng.gaussian());

    const auto y1 = denoise(model, r, codes);
    const auto y2 = denoise(model, r, codes);
    CHECK(y1.size() == 16);
    CHECK(y1 == y2);

    const auto wrong_codes = hadamard_codes(8);
    CHECK_THROWS_AS(denoise(model, r, wrong_codes), std::invalid_argument);
}

TEST_CASE("model serialization round trip") {
    NetworkConfig cfg;
    cfg.depth = 4;
    cfg.hidden_filters = 5;
    const auto model = random_model(cfg, 123);
    const std::string bytes = model_bytes(model);

    std::istringstream is(bytes, std::ios::binary);
    const auto loaded = load_model(is);
    CHECK(model_bytes(loaded) == bytes);
    CHECK(loaded.config.depth == 4);
    CHECK(loaded.config.hidden_filters == 5);
}

TEST_CASE("model loader rejects corrupted input") {
    NetworkConfig cfg;
    cfg.depth = 3;
    cfg.hidden_filters = 2;
    std::string bytes = model_bytes(random_model(cfg, 3));

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::istringstream m(bad_magic, std::ios::binary);
    CHECK_THROWS_WITH_AS(load_model(m), "load_model: bad magic", std::runtime_error);

    std::istringstream t(bytes.substr(0, bytes.size() / 2), std::ios::binary);
    CHECK_THROWS_WITH_AS(load_model(t), "load_model: truncated file", std::runtime_error);

    std::string bad_version = bytes;
    bad_version[4] = 9;
    std::istringstream v(bad_version, std::ios::binary);
    CHECK_THROWS_AS(load_model(v), std::runtime_error);
}
