#pragma once

#include <cstddef>
#include <vector>

namespace jamsup {

// (rows, cols, channels) with channel innermost
template <typename Real>
struct Tensor3 {
    std::size_t rows = 0, cols = 0, channels = 0;
    std::vector<Real> data;

    Tensor3() = default;
    Tensor3(std::size_t r, std::size_t c, std::size_t ch)
        : rows(r), cols(c), channels(ch), data(r * c * ch, Real(0)) {}

    Real& at(std::size_t r, std::size_t c, std::size_t ch) {
        return data[(r * cols + c) * channels + ch];
    }
    const Real& at(std::size_t r, std::size_t c, std::size_t ch) const {
        return data[(r * cols + c) * channels + ch];
    }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor3& o) const {
        return rows == o.rows && cols == o.cols && channels == o.channels;
    }
};

}  // namespace jamsup
