#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jamsup/adam.hpp"
#include "jamsup/detector.hpp"
#include "jamsup/network.hpp"
#include "jamsup/sigmodel.hpp"
#include "jamsup/tensor.hpp"

namespace jamsup {

template <typename Real>
struct InputTensor {
    // (S, 1, 4): ch 0/1 = Re/Im received, ch 2/3 = Re/Im MFB output
    Tensor3<Real> tensor;
    Real scale_received = Real(1);
    Real scale_mfb = Real(1);
};

// Each signal contributes a Re and an Im channel, divided by the maximum
// complex chip magnitude of that signal (1 when the signal is all zero).
// Re/Im live on the channel axis rather than a width-2 spatial axis: with a
// width-2 axis and single-sided zero padding one output column could only
// ever see one quadrature component, which makes the clean signal
// unrecoverable there.
template <typename Real>
InputTensor<Real> build_input_tensor(const std::vector<cplx>& received,
                                     const SpreadingMatrix& codes) {
    if (received.size() != codes.spreading_factor)
        throw std::invalid_argument("build_input_tensor: length mismatch");
    if (codes.num_users != codes.spreading_factor)
        throw std::invalid_argument(
            "build_input_tensor: requires N == S so both channels have S rows");
    const std::size_t s = codes.spreading_factor;
    const DetectionStatistics stats = mfb(codes, received);

    double max_r = 0.0, max_m = 0.0;
    for (const auto& v : received) max_r = std::max(max_r, std::abs(v));
    for (const auto& v : stats.values) max_m = std::max(max_m, std::abs(v));
    if (max_r == 0.0) max_r = 1.0;
    if (max_m == 0.0) max_m = 1.0;

    InputTensor<Real> in;
    in.scale_received = static_cast<Real>(max_r);
    in.scale_mfb = static_cast<Real>(max_m);
    in.tensor = Tensor3<Real>(s, 1, 4);
    for (std::size_t k = 0; k < s; ++k) {
        in.tensor.at(k, 0, 0) = static_cast<Real>(received[k].real() / max_r);
        in.tensor.at(k, 0, 1) = static_cast<Real>(received[k].imag() / max_r);
        in.tensor.at(k, 0, 2) = static_cast<Real>(stats.values[k].real() / max_m);
        in.tensor.at(k, 0, 3) = static_cast<Real>(stats.values[k].imag() / max_m);
    }
    return in;
}

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
};

struct TrainingMeta {
    ScenarioConfig scenario;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    double final_loss = 0.0;
    std::vector<double> epoch_losses;  // mean per-example loss per epoch
};

struct TrainedModel {
    NetworkConfig config;
    NetworkWeights<float> weights;  // BN running statistics frozen after training
    TrainingMeta meta;
};

// Shuffled mini-batch training on Example pairs (received, clean). The
// network regresses the jammer+noise residual (received - clean, in
// received-normalized units); denoise() subtracts the prediction, so the
// training loss still measures the squared error of the clean estimate.
TrainedModel train(const std::vector<Example>& dataset, const SpreadingMatrix& codes,
                   const NetworkConfig& net_config, const TrainConfig& train_config,
                   const ScenarioConfig& scenario_meta);

std::vector<cplx> denoise(const TrainedModel& model, const std::vector<cplx>& received,
                          const SpreadingMatrix& codes);

}  // namespace jamsup
