#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jamsup/network.hpp"

namespace jamsup {

template <typename Real>
struct AdamState {
    std::vector<Real> first_moment, second_moment;
    std::uint64_t step_count = 0;
    Real beta1 = Real(0.9);
    Real beta2 = Real(0.999);
    Real epsilon = Real(1e-8);
    Real learning_rate = Real(1e-3);

    explicit AdamState(std::size_t num_parameters, Real lr = Real(1e-3))
        : first_moment(num_parameters, Real(0)),
          second_moment(num_parameters, Real(0)), learning_rate(lr) {}
};

// Standard ADAM with bias correction.
template <typename Real>
void adam_step(NetworkWeights<Real>& weights, const WeightGrads<Real>& grads,
               AdamState<Real>& state) {
    state.step_count += 1;
    const Real bc1 = Real(1) - std::pow(state.beta1, static_cast<Real>(state.step_count));
    const Real bc2 = Real(1) - std::pow(state.beta2, static_cast<Real>(state.step_count));
    std::size_t i = 0;
    for_each_param_grad(weights, grads, [&](Real& w, Real g) {
        if (i >= state.first_moment.size())
            throw std::invalid_argument("adam_step: state size mismatch");
        Real& m = state.first_moment[i];
        Real& v = state.second_moment[i];
        m = state.beta1 * m + (Real(1) - state.beta1) * g;
        v = state.beta2 * v + (Real(1) - state.beta2) * g * g;
        const Real mhat = m / bc1;
        const Real vhat = v / bc2;
        w -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        ++i;
    });
    if (i != state.first_moment.size())
        throw std::invalid_argument("adam_step: state size mismatch");
}

}  // namespace jamsup
