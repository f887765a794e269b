#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jamsup/detector.hpp"

using namespace jamsup;

namespace {

// brute-force reference: full sort plus exhaustive nearest-symbol search
DetectionResult rdd_oracle(const DetectionStatistics& stats, std::size_t k,
                           const SymbolAlphabet& alphabet) {
    std::vector<std::pair<double, std::size_t>> mags;
    for (std::size_t i = 0; i < stats.values.size(); ++i)
        mags.emplace_back(-std::abs(stats.values[i]), i);
    std::sort(mags.begin(), mags.end());

    DetectionResult r;
    for (std::size_t j = 0; j < k; ++j) r.indices.push_back(mags[j].second);
    std::sort(r.indices.begin(), r.indices.end());
    for (auto idx : r.indices) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < alphabet.points.size(); ++m)
            if (std::abs(stats.values[idx] - alphabet.points[m]) <
                std::abs(stats.values[idx] - alphabet.points[best]))
                best = m;
        r.symbols.push_back(alphabet.points[best]);
    }
    r.statistics = stats;
    return r;
}

}  // namespace

TEST_CASE("mfb on a single-user clean signal isolates that user") {
    const auto codes = hadamard_codes(16);
    const std::size_t user = 5;
    const cplx gain = 1.3 * qpsk().points[2];
    std::vector<cplx> signal(16);
    for (std::size_t k = 0; k < 16; ++k) signal[k] = gain * codes.at(k, user);

    const auto t = mfb(codes, signal);
    REQUIRE(t.values.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) {
        const cplx expected = i == user ? gain : cplx(0, 0);
        CHECK(std::abs(t.values[i] - expected) < 1e-12);
    }
}

TEST_CASE("mfb of zero is zero and length mismatches throw") {
    const auto codes = hadamard_codes(8);
    const auto t = mfb(codes, std::vector<cplx>(8, cplx(0, 0)));
    for (const auto& v : t.values) CHECK(v == cplx(0, 0));
    CHECK_THROWS_AS(mfb(codes, std::vector<cplx>(7)), std::invalid_argument);
}

TEST_CASE("mfb equals the naive double loop") {
    const auto codes = hadamard_codes(32);
    Rng rng(3);
    std::vector<cplx> signal(32);
    for (auto& v : signal) v = cplx(rng.gaussian(), rng.gaussian());

    const auto t = mfb(codes, signal);
    for (std::size_t i = 0; i < 32; ++i) {
        cplx acc(0, 0);
        for (std::size_t k = 0; k < 32; ++k)
            acc += std::conj(codes.at(k, i)) * signal[k];
        CHECK(std::abs(t.values[i] - acc) < 1e-12);
    }
}

TEST_CASE("mfb is linear") {
    const auto codes = hadamard_codes(16);
    Rng rng(12);
    std::vector<cplx> u(16), v(16);
    for (auto& x : u) x = cplx(rng.gaussian(), rng.gaussian());
    for (auto& x : v) x = cplx(rng.gaussian(), rng.gaussian());
    const double a = 2.7;
    std::vector<cplx> combo(16);
    for (std::size_t k = 0; k < 16; ++k) combo[k] = a * u[k] + v[k];

    const auto tu = mfb(codes, u), tv = mfb(codes, v), tc = mfb(codes, combo);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(tc.values[i] - (a * tu.values[i] + tv.values[i])) < 1e-12);
}

TEST_CASE("rdd_detect picks the strongest user and nearest symbol") {
    const auto alphabet = qpsk();
    const double a = 1.0 / std::sqrt(2.0);
    DetectionStatistics stats;
    stats.values = {cplx(0, 0), 0.9 * cplx(a, a), cplx(0.1, 0), cplx(0, 0)};
    const auto r = rdd_detect(stats, 1, alphabet);
    REQUIRE(r.indices.size() == 1);
    CHECK(r.indices[0] == 1);
    CHECK(r.symbols[0] == cplx(a, a));
}

TEST_CASE("rdd_detect with K=0 and K>N") {
    const auto alphabet = qpsk();
    DetectionStatistics stats;
    stats.values = {cplx(1, 0), cplx(0, 1)};
    const auto r = rdd_detect(stats, 0, alphabet);
    CHECK(r.indices.empty());
    CHECK(r.symbols.empty());
    CHECK_THROWS_AS(rdd_detect(stats, 3, alphabet), std::invalid_argument);
}

TEST_CASE("rdd_detect matches the exhaustive oracle") {
    const auto alphabet = qpsk();
    Rng rng(50);
    for (int trial = 0; trial < 10000; ++trial) {
        DetectionStatistics stats;
        stats.values.resize(8);
        for (auto& v : stats.values) v = cplx(rng.gaussian(), rng.gaussian());
        const std::size_t k = 1 + rng.uniform_below(4);
        const auto got = rdd_detect(stats, k, alphabet);
        const auto want = rdd_oracle(stats, k, alphabet);
        CHECK(got.indices == want.indices);
        CHECK(got.symbols == want.symbols);
    }
}

TEST_CASE("rdd_detect is invariant to positive scaling") {
    const auto alphabet = qpsk();
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        DetectionStatistics stats;
        stats.values.resize(10);
        for (auto& v : stats.values) v = cplx(rng.gaussian(), rng.gaussian());
        const double c = 0.01 + 10.0 * rng.uniform01();
        DetectionStatistics scaled;
        for (const auto& v : stats.values) scaled.values.push_back(c * v);

        const std::size_t k = 1 + rng.uniform_below(4);
        const auto a = rdd_detect(stats, k, alphabet);
        const auto b = rdd_detect(scaled, k, alphabet);
        CHECK(a.indices == b.indices);
        CHECK(a.symbols == b.symbols);
    }
}

TEST_CASE("nearest QPSK symbol is the quadrant decision off the axes") {
    const auto alphabet = qpsk();
    const double a = 1.0 / std::sqrt(2.0);
    Rng rng(72);
    for (int trial = 0; trial < 500; ++trial) {
        cplx t(rng.gaussian(), rng.gaussian());
        if (std::abs(t.real()) < 1e-9 || std::abs(t.imag()) < 1e-9) continue;
        DetectionStatistics stats;
        stats.values = {t};
        const auto r = rdd_detect(stats, 1, alphabet);
        const cplx quadrant(t.real() > 0 ? a : -a, t.imag() > 0 ? a : -a);
        CHECK(r.symbols[0] == quadrant);
    }
}

TEST_CASE("noiseless orthonormal detection is exact") {
    const auto codes = hadamard_codes(32);
    const auto alphabet = qpsk();
    ScenarioConfig cfg;
    cfg.spreading_factor = 32;
    cfg.num_users = 32;
    cfg.num_active = 3;
    Rng rng(83);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ch = draw_channel(cfg, rng);
        const auto truth = draw_active_set(cfg, alphabet, rng);
        const auto y = clean_mixture(codes, ch, truth);
        const auto r = rdd_detect(mfb(codes, y), truth.indices.size(), alphabet);
        CHECK_FALSE(run_error(r, truth));
    }
}

TEST_CASE("run_error flags index and symbol mistakes") {
    const auto alphabet = qpsk();
    ActiveSet truth;
    truth.indices = {1, 4};
    truth.symbols = {alphabet.points[0], alphabet.points[3]};

    DetectionResult exact;
    exact.indices = truth.indices;
    exact.symbols = truth.symbols;
    CHECK_FALSE(run_error(exact, truth));

    DetectionResult wrong_symbol = exact;
    wrong_symbol.symbols[1] = alphabet.points[1];
    CHECK(run_error(wrong_symbol, truth));

    DetectionResult wrong_index = exact;
    wrong_index.indices = {1, 5};
    CHECK(run_error(wrong_index, truth));
}
