#include "jamsup/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jamsup/detector.hpp"

namespace jamsup {

EvalResult evaluate(const TrainedModel* model, const ScenarioConfig& config,
                    std::size_t num_runs) {
    config.validate();
    if (num_runs == 0) throw std::invalid_argument("evaluate: num_runs must be >= 1");
    if (model && model->weights.conv_layers.at(0).kernel_rows !=
                     model->config.kernel_rows)
        throw std::invalid_argument("evaluate: inconsistent model");

    const SpreadingMatrix codes = hadamard_codes(config.spreading_factor);
    const SymbolAlphabet alphabet = qpsk();

    EvalResult res;
    res.num_runs = num_runs;
    for (std::size_t run = 0; run < num_runs; ++run) {
        Rng rng(derive_seed(config.seed, /*stream=*/0x6576616c, run));
        const ScenarioRealization sc = generate_scenario(config, codes, alphabet, rng);
        const std::size_t k = sc.active.indices.size();

        const DetectionResult baseline =
            rdd_detect(mfb(codes, sc.received), k, alphabet);
        if (run_error(baseline, sc.active)) ++res.errors_baseline;

        if (model) {
            const std::vector<cplx> dejammed = denoise(*model, sc.received, codes);
            const DetectionResult proposed =
                rdd_detect(mfb(codes, dejammed), k, alphabet);
            if (run_error(proposed, sc.active)) ++res.errors_proposed;
        }
    }
    res.proposed_rate =
        static_cast<double>(res.errors_proposed) / static_cast<double>(num_runs);
    res.baseline_rate =
        static_cast<double>(res.errors_baseline) / static_cast<double>(num_runs);
    return res;
}

SweepResult sweep(const TrainedModel* model, const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep: empty value list");
    if (spec.num_runs == 0) throw std::invalid_argument("sweep: num_runs must be >= 1");

    SweepResult rows;
    for (double value : spec.values) {
        ScenarioConfig cfg = spec.base;
        if (spec.variable == "noise_power_db") {
            cfg.noise_power_db = value;
        } else if (spec.variable == "jammer_power_db") {
            cfg.jammer_power_db = value;
        } else if (spec.variable == "num_active") {
            cfg.num_active = static_cast<std::size_t>(value);
        } else {
            throw std::invalid_argument("sweep: unknown variable '" + spec.variable + "'");
        }
        const EvalResult r = evaluate(model, cfg, spec.num_runs);
        rows.push_back(SweepRow{value, r.proposed_rate, r.baseline_rate, r.num_runs,
                                r.errors_proposed, r.errors_baseline});
    }
    return rows;
}

void write_sweep_csv(const SweepResult& rows, std::ostream& os) {
    os << "swept_value,proposed_error_rate,baseline_error_rate,num_runs,"
          "errors_proposed,errors_baseline\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.6f,%.6f,%zu,%zu,%zu\n", r.swept_value,
                      r.proposed_error_rate, r.baseline_error_rate, r.num_runs,
                      r.errors_proposed, r.errors_baseline);
        os << buf;
    }
}

double binomial_halfwidth(std::size_t errors, std::size_t runs) {
    const double p = static_cast<double>(errors) / static_cast<double>(runs);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

namespace {

std::size_t to_size(const std::string& v, const std::string& key) {
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (...) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    }
}

double to_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (...) {
        throw std::invalid_argument("config: bad number for " + key + ": " + v);
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(std::istream& is) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "spreading_factor") cfg.scenario.spreading_factor = to_size(value, key);
        else if (key == "num_users") cfg.scenario.num_users = to_size(value, key);
        else if (key == "num_active") cfg.scenario.num_active = to_size(value, key);
        else if (key == "jammer_power_db") cfg.scenario.jammer_power_db = to_double(value, key);
        else if (key == "noise_power_db") cfg.scenario.noise_power_db = to_double(value, key);
        else if (key == "jammer_enabled") cfg.scenario.jammer_enabled = to_bool(value, key);
        else if (key == "channel_mag_low") cfg.scenario.channel_mag_low = to_double(value, key);
        else if (key == "channel_mag_high") cfg.scenario.channel_mag_high = to_double(value, key);
        else if (key == "num_segments") cfg.scenario.num_segments = to_size(value, key);
        else if (key == "seed") cfg.scenario.seed = std::stoull(value);
        else if (key == "depth") cfg.network.depth = to_size(value, key);
        else if (key == "hidden_filters") cfg.network.hidden_filters = to_size(value, key);
        else if (key == "kernel_rows") cfg.network.kernel_rows = to_size(value, key);
        else if (key == "kernel_cols") cfg.network.kernel_cols = to_size(value, key);
        else if (key == "batch_size") cfg.training.batch_size = to_size(value, key);
        else if (key == "epochs") cfg.training.epochs = to_size(value, key);
        else if (key == "learning_rate") cfg.training.learning_rate = to_double(value, key);
        else if (key == "num_examples") cfg.num_examples = to_size(value, key);
        else if (key == "num_runs") cfg.num_runs = to_size(value, key);
        else
            throw std::invalid_argument("config: unknown key '" + key + "' at line " +
                                        std::to_string(lineno));
    }
    cfg.training.seed = cfg.scenario.seed;
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    return parse_config_text(f);
}

}  // namespace jamsup
