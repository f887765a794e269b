#pragma once

#include <iosfwd>
#include <string>

#include "jamsup/denoiser.hpp"

namespace jamsup {

// "JSDN" v1: header (D, hidden_filters, kernel_rows, kernel_cols), conv
// kernels+biases per layer, then gamma/beta/running stats/momentum/epsilon per
// BN layer; all little-endian float32.
void save_model(const TrainedModel& model, std::ostream& sink);
void save_model(const TrainedModel& model, const std::string& path);

TrainedModel load_model(std::istream& source);
TrainedModel load_model(const std::string& path);

}  // namespace jamsup
