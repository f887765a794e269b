#include <cmath>
#include <stdexcept>

#include "jamsup/denoiser.hpp"

namespace jamsup {

namespace {

// Residual target: the network learns the jammer+noise component
// (received - clean) in received-normalized units; the clean estimate is
// recovered as received - prediction. The squared error against this target
// equals the squared error of the clean estimate against the clean signal,
// but the regression surface is much better conditioned (the residual is the
// dominant part of the input instead of a small perturbation of it).
Tensor3<float> make_target(const std::vector<cplx>& received,
                           const std::vector<cplx>& clean, float scale_received) {
    Tensor3<float> t(clean.size(), 1, 2);
    for (std::size_t k = 0; k < clean.size(); ++k) {
        const cplx resid = received[k] - clean[k];
        t.at(k, 0, 0) = static_cast<float>(resid.real()) / scale_received;
        t.at(k, 0, 1) = static_cast<float>(resid.imag()) / scale_received;
    }
    return t;
}

}  // namespace

TrainedModel train(const std::vector<Example>& dataset, const SpreadingMatrix& codes,
                   const NetworkConfig& net_config, const TrainConfig& train_config,
                   const ScenarioConfig& scenario_meta) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    net_config.validate();

    const std::size_t n = dataset.size();
    std::vector<Tensor3<float>> inputs(n);
    std::vector<Tensor3<float>> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        InputTensor<float> in = build_input_tensor<float>(dataset[i].received, codes);
        inputs[i] = std::move(in.tensor);
        targets[i] = make_target(dataset[i].received, dataset[i].clean,
                                 in.scale_received);
    }

    Rng init_rng(derive_seed(train_config.seed, /*stream=*/0x696e6974, 0));
    Rng shuffle_rng(derive_seed(train_config.seed, /*stream=*/0x73687566, 0));

    TrainedModel model;
    model.config = net_config;
    model.weights = init_weights<float>(net_config, init_rng);

    AdamState<float> adam(num_params(model.weights),
                          static_cast<float>(train_config.learning_rate));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> epoch_losses;
    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        // Fisher-Yates with the pinned Rng keeps shuffles platform-independent
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = shuffle_rng.uniform_below(i + 1);
            std::swap(order[i], order[j]);
        }

        double loss_sum = 0.0;
        std::size_t examples_seen = 0;
        for (std::size_t start = 0; start < n; start += train_config.batch_size) {
            const std::size_t stop = std::min(n, start + train_config.batch_size);
            if (stop - start < 2) break;  // BN needs batch size >= 2

            std::vector<Tensor3<float>> batch_in, batch_tgt;
            batch_in.reserve(stop - start);
            batch_tgt.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                batch_in.push_back(inputs[order[i]]);
                batch_tgt.push_back(targets[order[i]]);
            }

            ForwardCache<float> cache;
            std::vector<Tensor3<float>> pred = network_forward(
                batch_in, model.weights, net_config, BnMode::training, &cache);
            const float batch_loss = loss(pred, batch_tgt);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                         std::to_string(epoch + 1));
            loss_sum += batch_loss;
            examples_seen += stop - start;

            WeightGrads<float> grads = network_backward(
                cache, model.weights, net_config, loss_grad(pred, batch_tgt));
            adam_step(model.weights, grads, adam);
        }
        epoch_losses.push_back(loss_sum / static_cast<double>(examples_seen));
    }

    model.meta.scenario = scenario_meta;
    model.meta.epochs = train_config.epochs;
    model.meta.batch_size = train_config.batch_size;
    model.meta.epoch_losses = std::move(epoch_losses);
    model.meta.final_loss =
        model.meta.epoch_losses.empty() ? 0.0 : model.meta.epoch_losses.back();
    return model;
}

std::vector<cplx> denoise(const TrainedModel& model, const std::vector<cplx>& received,
                          const SpreadingMatrix& codes) {
    InputTensor<float> in = build_input_tensor<float>(received, codes);
    if (in.tensor.rows != codes.spreading_factor)
        throw std::invalid_argument("denoise: dimension mismatch");
    // inference mode never mutates the weights
    auto& weights = const_cast<NetworkWeights<float>&>(model.weights);
    std::vector<Tensor3<float>> batch{std::move(in.tensor)};
    std::vector<Tensor3<float>> out =
        network_forward(batch, weights, model.config, BnMode::inference);

    // the network predicts the jammer+noise residual; subtract it
    std::vector<cplx> y(codes.spreading_factor);
    for (std::size_t k = 0; k < codes.spreading_factor; ++k)
        y[k] = received[k] -
               cplx(static_cast<double>(out[0].at(k, 0, 0)) * in.scale_received,
                    static_cast<double>(out[0].at(k, 0, 1)) * in.scale_received);
    return y;
}

}  // namespace jamsup
