#include "jamsup/detector.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace jamsup {

DetectionStatistics mfb(const SpreadingMatrix& codes,
                        const std::vector<cplx>& signal) {
    if (signal.size() != codes.spreading_factor)
        throw std::invalid_argument("mfb: signal length does not match spreading factor");
    DetectionStatistics stats;
    stats.values.resize(codes.num_users);
    for (std::size_t i = 0; i < codes.num_users; ++i) {
        const cplx* code = codes.column(i);
        cplx t(0.0, 0.0);
        for (std::size_t k = 0; k < codes.spreading_factor; ++k)
            t += std::conj(code[k]) * signal[k];
        stats.values[i] = t;
    }
    return stats;
}

DetectionResult rdd_detect(const DetectionStatistics& stats, std::size_t num_active,
                           const SymbolAlphabet& alphabet) {
    const std::size_t n = stats.values.size();
    if (num_active > n)
        throw std::invalid_argument("rdd_detect: num_active exceeds number of users");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(stats.values[a]);
        const double mb = std::abs(stats.values[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });

    DetectionResult result;
    result.indices.assign(order.begin(), order.begin() + num_active);
    std::sort(result.indices.begin(), result.indices.end());
    result.symbols.resize(num_active);
    for (std::size_t k = 0; k < num_active; ++k) {
        const cplx t = stats.values[result.indices[k]];
        std::size_t best = 0;
        double best_dist = std::abs(t - alphabet.points[0]);
        for (std::size_t m = 1; m < alphabet.points.size(); ++m) {
            const double d = std::abs(t - alphabet.points[m]);
            if (d < best_dist) {
                best_dist = d;
                best = m;
            }
        }
        result.symbols[k] = alphabet.points[best];
    }
    result.statistics = stats;
    return result;
}

bool run_error(const DetectionResult& result, const ActiveSet& truth) {
    if (result.indices != truth.indices) return true;
    for (std::size_t k = 0; k < result.indices.size(); ++k)
        if (result.symbols[k] != truth.symbols[k]) return true;
    return false;
}

}  // namespace jamsup
