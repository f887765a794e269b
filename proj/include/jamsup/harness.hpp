#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jamsup/denoiser.hpp"
#include "jamsup/sigmodel.hpp"

namespace jamsup {

struct EvalResult {
    std::size_t num_runs = 0;
    std::size_t errors_proposed = 0;
    std::size_t errors_baseline = 0;
    double proposed_rate = 0.0;
    double baseline_rate = 0.0;
};

// Monte-Carlo error rates: proposed path denoise -> MFB -> RDD, baseline path
// MFB on the raw received signal -> RDD. Per-run seeds derive from
// (config.seed, run index). With model == nullptr only the baseline runs.
EvalResult evaluate(const TrainedModel* model, const ScenarioConfig& config,
                    std::size_t num_runs);

struct SweepSpec {
    std::string variable;  // noise_power_db | jammer_power_db | num_active
    std::vector<double> values;
    ScenarioConfig base;
    std::size_t num_runs = 10000;
};

struct SweepRow {
    double swept_value = 0.0;
    double proposed_error_rate = 0.0;
    double baseline_error_rate = 0.0;
    std::size_t num_runs = 0;
    std::size_t errors_proposed = 0;
    std::size_t errors_baseline = 0;
};

using SweepResult = std::vector<SweepRow>;

// Model held fixed across swept values (train once, test across conditions).
SweepResult sweep(const TrainedModel* model, const SweepSpec& spec);

void write_sweep_csv(const SweepResult& rows, std::ostream& os);

// 95% binomial confidence half-width (normal approximation)
double binomial_halfwidth(std::size_t errors, std::size_t runs);

// Flat key=value config file; '#' starts a comment; unknown keys are errors.
struct RunConfig {
    ScenarioConfig scenario;
    NetworkConfig network;
    TrainConfig training;
    std::size_t num_examples = 20000;
    std::size_t num_runs = 10000;
};

RunConfig parse_config_text(std::istream& is);
RunConfig parse_config_file(const std::string& path);

}  // namespace jamsup
