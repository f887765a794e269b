#include "jamsup/sigmodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace jamsup {

void ScenarioConfig::validate() const {
    if (spreading_factor == 0 || num_users == 0)
        throw std::invalid_argument("spreading_factor and num_users must be positive");
    if (num_active > num_users)
        throw std::invalid_argument("num_active exceeds num_users");
    if (channel_mag_low > channel_mag_high)
        throw std::invalid_argument("channel_mag_low exceeds channel_mag_high");
    if (num_segments == 0 || num_segments > spreading_factor)
        throw std::invalid_argument("num_segments must be in [1, spreading_factor]");
}

SymbolAlphabet qpsk() {
    const double a = 1.0 / std::sqrt(2.0);
    return SymbolAlphabet{{cplx(a, a), cplx(a, -a), cplx(-a, a), cplx(-a, -a)},
                          "qpsk"};
}

SpreadingMatrix hadamard_codes(std::size_t spreading_factor) {
    if (spreading_factor == 0 || (spreading_factor & (spreading_factor - 1)) != 0)
        throw std::invalid_argument(
            "hadamard_codes: spreading factor must be a power of two, got " +
            std::to_string(spreading_factor));
    const std::size_t s = spreading_factor;
    const double scale = 1.0 / std::sqrt(static_cast<double>(s));

    SpreadingMatrix m;
    m.spreading_factor = s;
    m.num_users = s;
    m.entries.resize(s * s);
    // Sylvester construction: H[r][c] = (-1)^popcount(r & c)
    for (std::size_t col = 0; col < s; ++col)
        for (std::size_t row = 0; row < s; ++row) {
            const int sign = std::popcount(row & col) & 1 ? -1 : 1;
            m.entries[col * s + row] = cplx(sign * scale, 0.0);
        }
    return m;
}

cplx precode_symbol(cplx symbol, cplx channel) {
    const double mag = std::abs(channel);
    if (mag == 0.0)
        throw std::invalid_argument("precode_symbol: zero channel");
    return symbol * std::conj(channel) / mag;
}

ChannelRealization draw_channel(const ScenarioConfig& config, Rng& rng) {
    ChannelRealization ch;
    ch.magnitudes.resize(config.num_users);
    ch.phases.resize(config.num_users);
    for (std::size_t i = 0; i < config.num_users; ++i) {
        ch.magnitudes[i] = rng.uniform(config.channel_mag_low, config.channel_mag_high);
        ch.phases[i] = rng.uniform(0.0, 2.0 * M_PI);
    }
    return ch;
}

ActiveSet draw_active_set(const ScenarioConfig& config,
                          const SymbolAlphabet& alphabet, Rng& rng) {
    if (config.num_active > config.num_users)
        throw std::invalid_argument("draw_active_set: num_active exceeds num_users");

    // partial Fisher-Yates: first K entries are a uniform sample w/o replacement
    std::vector<std::size_t> pool(config.num_users);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < config.num_active; ++k) {
        const std::size_t j = k + rng.uniform_below(config.num_users - k);
        std::swap(pool[k], pool[j]);
    }
    ActiveSet set;
    set.indices.assign(pool.begin(), pool.begin() + config.num_active);
    std::sort(set.indices.begin(), set.indices.end());
    set.symbols.resize(config.num_active);
    for (auto& s : set.symbols)
        s = alphabet.points[rng.uniform_below(alphabet.points.size())];
    return set;
}

std::vector<cplx> clean_mixture(const SpreadingMatrix& codes,
                                const ChannelRealization& channel,
                                const ActiveSet& active) {
    std::vector<cplx> y(codes.spreading_factor, cplx(0.0, 0.0));
    for (std::size_t a = 0; a < active.indices.size(); ++a) {
        const std::size_t i = active.indices[a];
        const cplx gain = channel.magnitudes[i] * active.symbols[a];
        const cplx* code = codes.column(i);
        for (std::size_t k = 0; k < codes.spreading_factor; ++k)
            y[k] += gain * code[k];
    }
    return y;
}

std::vector<cplx> jammer_chips(double amplitude,
                               const std::vector<std::size_t>& segment_boundaries,
                               const std::vector<double>& frequencies,
                               const std::vector<double>& phases,
                               std::size_t spreading_factor) {
    std::vector<cplx> z(spreading_factor);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < spreading_factor; ++k) {
        while (seg < segment_boundaries.size() && k >= segment_boundaries[seg])
            ++seg;
        const double arg = 2.0 * M_PI * frequencies[seg] * static_cast<double>(k) +
                           phases[seg];
        z[k] = amplitude * cplx(std::cos(arg), std::sin(arg));
    }
    return z;
}

JammerRealization draw_jammer(const JammerConfig& config,
                              std::size_t spreading_factor, Rng& rng) {
    if (config.num_segments > spreading_factor)
        throw std::invalid_argument("draw_jammer: num_segments exceeds spreading factor");

    JammerRealization jam;
    if (!config.enabled) {
        jam.chips.assign(spreading_factor, cplx(0.0, 0.0));
        return jam;
    }

    // num_segments - 1 distinct boundaries among the S - 1 inter-chip positions
    std::vector<std::size_t> positions(spreading_factor - 1);
    std::iota(positions.begin(), positions.end(), std::size_t{1});
    const std::size_t nb = config.num_segments - 1;
    for (std::size_t k = 0; k < nb; ++k) {
        const std::size_t j = k + rng.uniform_below(positions.size() - k);
        std::swap(positions[k], positions[j]);
    }
    jam.segment_boundaries.assign(positions.begin(), positions.begin() + nb);
    std::sort(jam.segment_boundaries.begin(), jam.segment_boundaries.end());

    jam.frequencies.resize(config.num_segments);
    jam.phases.resize(config.num_segments);
    for (std::size_t m = 0; m < config.num_segments; ++m) {
        jam.frequencies[m] = rng.uniform01();
        jam.phases[m] = rng.uniform(0.0, 2.0 * M_PI);
    }
    jam.chips = jammer_chips(config.amplitude, jam.segment_boundaries,
                             jam.frequencies, jam.phases, spreading_factor);
    return jam;
}

std::vector<cplx> draw_awgn(double variance, std::size_t length, Rng& rng) {
    const double sigma = std::sqrt(variance / 2.0);  // per real/imag part
    std::vector<cplx> v(length);
    for (auto& x : v) {
        const double re = sigma * rng.gaussian();
        const double im = sigma * rng.gaussian();
        x = cplx(re, im);
    }
    return v;
}

ScenarioRealization generate_scenario(const ScenarioConfig& config,
                                      const SpreadingMatrix& codes,
                                      const SymbolAlphabet& alphabet, Rng& rng) {
    config.validate();
    ScenarioRealization sc;
    sc.channel = draw_channel(config, rng);
    sc.active = draw_active_set(config, alphabet, rng);
    sc.clean = clean_mixture(codes, sc.channel, sc.active);
    JammerConfig jcfg{config.jammer_amplitude(), config.num_segments,
                      config.jammer_enabled};
    sc.jammer = draw_jammer(jcfg, config.spreading_factor, rng);
    sc.noise = draw_awgn(config.noise_variance(), config.spreading_factor, rng);
    sc.received.resize(config.spreading_factor);
    for (std::size_t k = 0; k < config.spreading_factor; ++k)
        sc.received[k] = sc.clean[k] + sc.jammer.chips[k] + sc.noise[k];
    return sc;
}

Example generate_example(const ScenarioConfig& config,
                         const SpreadingMatrix& codes,
                         const SymbolAlphabet& alphabet, std::uint64_t index) {
    Rng rng(derive_seed(config.seed, /*stream=*/0x64617461, index));
    ScenarioRealization sc = generate_scenario(config, codes, alphabet, rng);
    return Example{std::move(sc.received), std::move(sc.clean), std::move(sc.active)};
}

std::vector<Example> generate_dataset(const ScenarioConfig& config,
                                      const SpreadingMatrix& codes,
                                      const SymbolAlphabet& alphabet,
                                      std::size_t count) {
    std::vector<Example> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(generate_example(config, codes, alphabet, i));
    return out;
}

}  // namespace jamsup
