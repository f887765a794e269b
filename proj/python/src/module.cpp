// Python bindings for the main operations: signal synthesis, the
// convolutional denoiser, RDD detection and Monte-Carlo evaluation.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jamsup/dataset_io.hpp"
#include "jamsup/gradcheck.hpp"
#include "jamsup/harness.hpp"
#include "jamsup/model_io.hpp"

namespace py = pybind11;
using namespace jamsup;

namespace {

py::array_t<std::complex<double>> to_array(const std::vector<cplx>& v) {
    py::array_t<std::complex<double>> out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<cplx> to_vector(py::array_t<std::complex<double>, py::array::c_style |
                                                              py::array::forcecast> a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D complex array");
    return std::vector<cplx>(a.data(), a.data() + a.shape(0));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "jammer suppression for spreading-code massive connectivity";

    py::class_<SpreadingMatrix>(m, "SpreadingMatrix")
        .def_readonly("spreading_factor", &SpreadingMatrix::spreading_factor)
        .def_readonly("num_users", &SpreadingMatrix::num_users)
        .def_property_readonly("entries", [](const SpreadingMatrix& s) {
            py::array_t<std::complex<double>> out(
                {static_cast<py::ssize_t>(s.spreading_factor),
                 static_cast<py::ssize_t>(s.num_users)});
            auto r = out.mutable_unchecked<2>();
            for (std::size_t row = 0; row < s.spreading_factor; ++row)
                for (std::size_t col = 0; col < s.num_users; ++col)
                    r(row, col) = s.at(row, col);
            return out;
        });

    py::class_<SymbolAlphabet>(m, "SymbolAlphabet")
        .def_readonly("points", &SymbolAlphabet::points)
        .def_readonly("name", &SymbolAlphabet::name);

    py::class_<ActiveSet>(m, "ActiveSet")
        .def(py::init<>())
        .def_readwrite("indices", &ActiveSet::indices)
        .def_readwrite("symbols", &ActiveSet::symbols);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("spreading_factor", &ScenarioConfig::spreading_factor)
        .def_readwrite("num_users", &ScenarioConfig::num_users)
        .def_readwrite("num_active", &ScenarioConfig::num_active)
        .def_readwrite("jammer_power_db", &ScenarioConfig::jammer_power_db)
        .def_readwrite("noise_power_db", &ScenarioConfig::noise_power_db)
        .def_readwrite("jammer_enabled", &ScenarioConfig::jammer_enabled)
        .def_readwrite("channel_mag_low", &ScenarioConfig::channel_mag_low)
        .def_readwrite("channel_mag_high", &ScenarioConfig::channel_mag_high)
        .def_readwrite("num_segments", &ScenarioConfig::num_segments)
        .def_readwrite("seed", &ScenarioConfig::seed);

    py::class_<ScenarioRealization>(m, "ScenarioRealization")
        .def_readonly("active", &ScenarioRealization::active)
        .def_property_readonly("clean",
                               [](const ScenarioRealization& s) { return to_array(s.clean); })
        .def_property_readonly("jammer_chips",
                               [](const ScenarioRealization& s) { return to_array(s.jammer.chips); })
        .def_property_readonly("noise",
                               [](const ScenarioRealization& s) { return to_array(s.noise); })
        .def_property_readonly("received",
                               [](const ScenarioRealization& s) { return to_array(s.received); });

    py::class_<DetectionResult>(m, "DetectionResult")
        .def_readonly("indices", &DetectionResult::indices)
        .def_readonly("symbols", &DetectionResult::symbols)
        .def_property_readonly("statistics", [](const DetectionResult& r) {
            return to_array(r.statistics.values);
        });

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init<>())
        .def_readwrite("depth", &NetworkConfig::depth)
        .def_readwrite("hidden_filters", &NetworkConfig::hidden_filters)
        .def_readwrite("kernel_rows", &NetworkConfig::kernel_rows)
        .def_readwrite("kernel_cols", &NetworkConfig::kernel_cols);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_property_readonly("depth",
                               [](const TrainedModel& m_) { return m_.config.depth; })
        .def_property_readonly("hidden_filters",
                               [](const TrainedModel& m_) { return m_.config.hidden_filters; })
        .def_property_readonly("epoch_losses",
                               [](const TrainedModel& m_) { return m_.meta.epoch_losses; });

    py::class_<EvalResult>(m, "EvalResult")
        .def_readonly("num_runs", &EvalResult::num_runs)
        .def_readonly("errors_proposed", &EvalResult::errors_proposed)
        .def_readonly("errors_baseline", &EvalResult::errors_baseline)
        .def_readonly("proposed_rate", &EvalResult::proposed_rate)
        .def_readonly("baseline_rate", &EvalResult::baseline_rate);

    m.def("qpsk", &qpsk);
    m.def("hadamard_codes", &hadamard_codes, py::arg("spreading_factor"));
    m.def("precode_symbol", &precode_symbol, py::arg("symbol"), py::arg("channel"));

    m.def(
        "generate_scenario",
        [](const ScenarioConfig& cfg, std::uint64_t seed) {
            const auto codes = hadamard_codes(cfg.spreading_factor);
            const auto alphabet = qpsk();
            Rng rng(seed);
            return generate_scenario(cfg, codes, alphabet, rng);
        },
        py::arg("config"), py::arg("seed"));

    m.def(
        "mfb",
        [](const SpreadingMatrix& codes, py::array_t<std::complex<double>> signal) {
            return to_array(mfb(codes, to_vector(signal)).values);
        },
        py::arg("codes"), py::arg("signal"));

    m.def(
        "rdd_detect",
        [](const SpreadingMatrix& codes, py::array_t<std::complex<double>> signal,
           std::size_t num_active) {
            return rdd_detect(mfb(codes, to_vector(signal)), num_active, qpsk());
        },
        py::arg("codes"), py::arg("signal"), py::arg("num_active"));

    m.def(
        "train",
        [](const ScenarioConfig& scenario, const NetworkConfig& net,
           const TrainConfig& tc, std::size_t num_examples) {
            const auto codes = hadamard_codes(scenario.spreading_factor);
            const auto alphabet = qpsk();
            const auto dataset = generate_dataset(scenario, codes, alphabet, num_examples);
            return train(dataset, codes, net, tc, scenario);
        },
        py::arg("scenario"), py::arg("network"), py::arg("training"),
        py::arg("num_examples"));

    m.def(
        "denoise",
        [](const TrainedModel& model, py::array_t<std::complex<double>> received) {
            const std::vector<cplx> r = to_vector(received);
            const auto codes = hadamard_codes(r.size());
            return to_array(denoise(model, r, codes));
        },
        py::arg("model"), py::arg("received"));

    m.def(
        "evaluate",
        [](const TrainedModel* model, const ScenarioConfig& cfg, std::size_t runs) {
            return evaluate(model, cfg, runs);
        },
        py::arg("model").none(true), py::arg("config"), py::arg("num_runs"));

    m.def("save_model",
          [](const TrainedModel& model, const std::string& path) { save_model(model, path); },
          py::arg("model"), py::arg("path"));
    m.def("load_model", [](const std::string& path) { return load_model(path); },
          py::arg("path"));

    m.def(
        "run_gradcheck",
        [](std::size_t trials) {
            std::ostringstream os;
            GradCheckOptions opts;
            opts.trials = trials;
            const bool ok = run_gradcheck(os, opts);
            return py::make_tuple(ok, os.str());
        },
        py::arg("trials") = 20);
}
