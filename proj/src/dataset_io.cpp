#include "jamsup/dataset_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace jamsup {

static_assert(std::endian::native == std::endian::little,
              "dataset file format is little-endian");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return static_cast<bool>(is);
}

void put_cplx(std::ostream& os, const cplx& v) {
    put(os, static_cast<float>(v.real()));
    put(os, static_cast<float>(v.imag()));
}

cplx get_cplx(std::istream& is) {
    float re, im;
    if (!get(is, re) || !get(is, im))
        throw std::runtime_error("read_dataset: truncated record");
    return cplx(re, im);
}

}  // namespace

void write_dataset(const std::vector<Example>& examples, std::ostream& sink) {
    for (const auto& ex : examples) {
        put(sink, static_cast<std::uint32_t>(ex.received.size()));
        for (const auto& v : ex.received) put_cplx(sink, v);
        for (const auto& v : ex.clean) put_cplx(sink, v);
        put(sink, static_cast<std::uint16_t>(ex.active.indices.size()));
        for (std::size_t k = 0; k < ex.active.indices.size(); ++k) {
            put(sink, static_cast<std::uint32_t>(ex.active.indices[k]));
            put_cplx(sink, ex.active.symbols[k]);
        }
    }
    if (!sink) throw std::runtime_error("write_dataset: write failed");
}

void write_dataset(const std::vector<Example>& examples, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_dataset: cannot open " + path);
    write_dataset(examples, f);
}

std::vector<Example> read_dataset(std::istream& source) {
    std::vector<Example> out;
    std::uint32_t s;
    while (get(source, s)) {
        Example ex;
        ex.received.resize(s);
        ex.clean.resize(s);
        for (auto& v : ex.received) v = get_cplx(source);
        for (auto& v : ex.clean) v = get_cplx(source);
        std::uint16_t k;
        if (!get(source, k)) throw std::runtime_error("read_dataset: truncated record");
        ex.active.indices.resize(k);
        ex.active.symbols.resize(k);
        for (std::uint16_t i = 0; i < k; ++i) {
            std::uint32_t idx;
            if (!get(source, idx)) throw std::runtime_error("read_dataset: truncated record");
            ex.active.indices[i] = idx;
            ex.active.symbols[i] = get_cplx(source);
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<Example> read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_dataset: cannot open " + path);
    return read_dataset(f);
}

}  // namespace jamsup
