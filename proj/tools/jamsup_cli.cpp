// Command-line front end: dataset generation, training, evaluation,
// parameter sweeps and the gradient self-check.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jamsup/dataset_io.hpp"
#include "jamsup/gradcheck.hpp"
#include "jamsup/harness.hpp"
#include "jamsup/model_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct GlobalOpts {
    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int verbosity = 1;
};

jamsup::RunConfig load_run_config(const GlobalOpts& g) {
    jamsup::RunConfig cfg;
    if (!g.config_path.empty()) cfg = jamsup::parse_config_file(g.config_path);
    if (g.seed_set) {
        cfg.scenario.seed = g.seed;
        cfg.training.seed = g.seed;
    }
    return cfg;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty --values list");
    return out;
}

int cmd_gen_data(const GlobalOpts& g, std::size_t count) {
    jamsup::RunConfig cfg = load_run_config(g);
    if (count == 0) count = cfg.num_examples;
    if (g.output_path.empty()) throw CLI::ValidationError("gen-data requires --output");

    const auto codes = jamsup::hadamard_codes(cfg.scenario.spreading_factor);
    const auto alphabet = jamsup::qpsk();
    const auto dataset =
        jamsup::generate_dataset(cfg.scenario, codes, alphabet, count);
    jamsup::write_dataset(dataset, g.output_path);
    if (g.verbosity > 0)
        std::cerr << "wrote " << count << " examples to " << g.output_path << "\n";
    return kExitOk;
}

int cmd_train(const GlobalOpts& g, const std::string& data_path,
              const std::string& loss_log_path) {
    jamsup::RunConfig cfg = load_run_config(g);
    if (g.output_path.empty()) throw CLI::ValidationError("train requires --output");

    const auto codes = jamsup::hadamard_codes(cfg.scenario.spreading_factor);
    const auto alphabet = jamsup::qpsk();

    std::vector<jamsup::Example> dataset;
    if (!data_path.empty()) {
        dataset = jamsup::read_dataset(data_path);
    } else {
        if (g.verbosity > 0)
            std::cerr << "generating " << cfg.num_examples << " training examples\n";
        dataset = jamsup::generate_dataset(cfg.scenario, codes, alphabet,
                                           cfg.num_examples);
    }

    const jamsup::TrainedModel model =
        jamsup::train(dataset, codes, cfg.network, cfg.training, cfg.scenario);
    jamsup::save_model(model, g.output_path);

    if (!loss_log_path.empty()) {
        std::ofstream log(loss_log_path);
        if (!log) throw std::runtime_error("cannot open loss log " + loss_log_path);
        log << "epoch,mean_loss\n";
        for (std::size_t e = 0; e < model.meta.epoch_losses.size(); ++e)
            log << e + 1 << "," << model.meta.epoch_losses[e] << "\n";
    }
    if (g.verbosity > 0) {
        std::cerr << "trained " << model.meta.epochs << " epochs, final mean loss "
                  << model.meta.final_loss << "\n";
        std::cerr << "model written to " << g.output_path << "\n";
    }
    return kExitOk;
}

int cmd_eval(const GlobalOpts& g, const std::string& model_path, std::size_t runs) {
    jamsup::RunConfig cfg = load_run_config(g);
    if (runs == 0) runs = cfg.num_runs;
    const jamsup::TrainedModel model = jamsup::load_model(model_path);
    const jamsup::EvalResult r = jamsup::evaluate(&model, cfg.scenario, runs);
    std::cout << "proposed_error_rate=" << r.proposed_rate
              << " (+-" << jamsup::binomial_halfwidth(r.errors_proposed, r.num_runs)
              << ")\nbaseline_error_rate=" << r.baseline_rate
              << " (+-" << jamsup::binomial_halfwidth(r.errors_baseline, r.num_runs)
              << ")\nnum_runs=" << r.num_runs << "\n";
    return kExitOk;
}

int cmd_sweep(const GlobalOpts& g, const std::string& model_path,
              const std::string& variable, const std::string& values_csv,
              std::size_t runs) {
    jamsup::RunConfig cfg = load_run_config(g);
    if (runs == 0) runs = cfg.num_runs;
    const jamsup::TrainedModel model = jamsup::load_model(model_path);

    jamsup::SweepSpec spec;
    spec.variable = variable;
    spec.values = parse_values(values_csv);
    spec.base = cfg.scenario;
    spec.num_runs = runs;

    const jamsup::SweepResult rows = jamsup::sweep(&model, spec);
    if (g.output_path.empty()) {
        jamsup::write_sweep_csv(rows, std::cout);
    } else {
        std::ofstream out(g.output_path);
        if (!out) throw std::runtime_error("cannot open " + g.output_path);
        jamsup::write_sweep_csv(rows, out);
    }
    if (g.verbosity > 0)
        for (const auto& r : rows)
            std::cerr << variable << "=" << r.swept_value << " proposed "
                      << r.proposed_error_rate << " +-"
                      << jamsup::binomial_halfwidth(r.errors_proposed, r.num_runs)
                      << ", baseline " << r.baseline_error_rate << " +-"
                      << jamsup::binomial_halfwidth(r.errors_baseline, r.num_runs)
                      << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jammer-suppression simulator: synthesize jammed multiuser "
                 "uplink signals, train the convolutional denoiser, and measure "
                 "detection error rates"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("-c,--config", g.config_path, "flat key=value config file");
    auto* seed_opt = app.add_option("-s,--seed", g.seed, "override the config seed");
    app.add_option("-o,--output", g.output_path, "output path");
    app.add_option("-v,--verbosity", g.verbosity, "0 = quiet, 1 = progress (default)");

    std::size_t count = 0;
    auto* gen = app.add_subcommand("gen-data", "emit a binary dataset file");
    gen->add_option("-n,--count", count, "number of examples (default from config)");

    std::string data_path, loss_log_path;
    auto* train = app.add_subcommand("train", "train a denoiser model");
    train->add_option("-d,--data", data_path,
                      "dataset file (default: generate from config)");
    train->add_option("-l,--loss-log", loss_log_path, "per-epoch loss CSV");

    std::string model_path;
    std::size_t runs = 0;
    auto* eval = app.add_subcommand("eval", "Monte-Carlo error rates for one scenario");
    eval->add_option("-m,--model", model_path, "model file")->required();
    eval->add_option("-r,--runs", runs, "Monte-Carlo runs (default from config)");

    std::string variable = "jammer_power_db", values_csv;
    auto* sweep = app.add_subcommand("sweep", "sweep one scenario variable, emit CSV");
    sweep->add_option("-m,--model", model_path, "model file")->required();
    sweep->add_option("--variable", variable,
                      "noise_power_db | jammer_power_db | num_active");
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("-r,--runs", runs, "Monte-Carlo runs per value");

    auto* gradcheck = app.add_subcommand(
        "gradcheck", "finite-difference verification of all gradients");

    try {
        app.parse(argc, argv);
        g.seed_set = seed_opt->count() > 0;
        if (gen->parsed()) return cmd_gen_data(g, count);
        if (train->parsed()) return cmd_train(g, data_path, loss_log_path);
        if (eval->parsed()) return cmd_eval(g, model_path, runs);
        if (sweep->parsed()) return cmd_sweep(g, model_path, variable, values_csv, runs);
        if (gradcheck->parsed())
            return jamsup::run_gradcheck(std::cout) ? kExitOk : kExitRuntime;
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
