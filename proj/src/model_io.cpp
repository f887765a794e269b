#include "jamsup/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace jamsup {

static_assert(std::endian::native == std::endian::little,
              "model file format is little-endian");

namespace {

constexpr char kMagic[4] = {'J', 'S', 'D', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f32(std::ostream& os, float v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("load_model: truncated file");
    return v;
}

float get_f32(std::istream& is) {
    float v;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("load_model: truncated file");
    return v;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& sink) {
    sink.write(kMagic, 4);
    put_u32(sink, kVersion);
    put_u32(sink, static_cast<std::uint32_t>(model.config.depth));
    put_u32(sink, static_cast<std::uint32_t>(model.config.hidden_filters));
    put_u32(sink, static_cast<std::uint32_t>(model.config.kernel_rows));
    put_u32(sink, static_cast<std::uint32_t>(model.config.kernel_cols));
    for (const auto& layer : model.weights.conv_layers) {
        for (float k : layer.kernels) put_f32(sink, k);
        for (float b : layer.biases) put_f32(sink, b);
    }
    for (const auto& bn : model.weights.bn_layers) {
        for (float v : bn.gamma) put_f32(sink, v);
        for (float v : bn.beta) put_f32(sink, v);
        for (float v : bn.running_mean) put_f32(sink, v);
        for (float v : bn.running_var) put_f32(sink, v);
        put_f32(sink, bn.momentum);
        put_f32(sink, bn.epsilon);
    }
    if (!sink) throw std::runtime_error("save_model: write failed");
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_model: cannot open " + path);
    save_model(model, f);
}

TrainedModel load_model(std::istream& source) {
    char magic[4];
    source.read(magic, 4);
    if (!source || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_model: bad magic");
    const std::uint32_t version = get_u32(source);
    if (version != kVersion)
        throw std::runtime_error("load_model: unsupported version " +
                                 std::to_string(version));

    TrainedModel model;
    model.config.depth = get_u32(source);
    model.config.hidden_filters = get_u32(source);
    model.config.kernel_rows = get_u32(source);
    model.config.kernel_cols = get_u32(source);
    model.config.validate();

    const NetworkConfig& cfg = model.config;
    for (std::size_t d = 0; d < cfg.depth; ++d) {
        const std::size_t cin = d == 0 ? cfg.input_channels : cfg.hidden_filters;
        const std::size_t cout =
            d == cfg.depth - 1 ? cfg.output_channels : cfg.hidden_filters;
        ConvLayerParams<float> layer(cfg.kernel_rows, cfg.kernel_cols, cin, cout);
        for (auto& k : layer.kernels) k = get_f32(source);
        for (auto& b : layer.biases) b = get_f32(source);
        model.weights.conv_layers.push_back(std::move(layer));
    }
    for (std::size_t d = 0; d < cfg.num_bn_layers(); ++d) {
        BatchNormParams<float> bn(cfg.hidden_filters);
        for (auto& v : bn.gamma) v = get_f32(source);
        for (auto& v : bn.beta) v = get_f32(source);
        for (auto& v : bn.running_mean) v = get_f32(source);
        for (auto& v : bn.running_var) v = get_f32(source);
        bn.momentum = get_f32(source);
        bn.epsilon = get_f32(source);
        model.weights.bn_layers.push_back(std::move(bn));
    }
    return model;
}

TrainedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_model: cannot open " + path);
    return load_model(f);
}

}  // namespace jamsup
