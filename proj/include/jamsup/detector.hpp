#pragma once

#include <vector>

#include "jamsup/sigmodel.hpp"

namespace jamsup {

struct DetectionStatistics {
    std::vector<cplx> values;  // t_i = s_i^H signal
};

struct DetectionResult {
    std::vector<std::size_t> indices;  // sorted, distinct, |indices| = K
    std::vector<cplx> symbols;         // detected symbol per index
    DetectionStatistics statistics;
};

DetectionStatistics mfb(const SpreadingMatrix& codes,
                        const std::vector<cplx>& signal);

// Reduced-dimension decorrelating detector: K largest |t_i| (ties by lowest
// index), then nearest constellation symbol (ties by alphabet order).
DetectionResult rdd_detect(const DetectionStatistics& stats, std::size_t num_active,
                           const SymbolAlphabet& alphabet);

// true iff the detected index set or any matched symbol differs from truth
bool run_error(const DetectionResult& result, const ActiveSet& truth);

}  // namespace jamsup
