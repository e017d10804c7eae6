#pragma once

// Seeded synthetic spike matrices.
//
// bernoulli: every cell is 1 independently with probability `density`.
// clustered: draw `base_patterns` bernoulli rows first, then every output row
// copies a uniformly chosen base row and flips each bit with probability
// `flip_probability`. With no flips the matrix has at most `base_patterns`
// distinct rows, which is exactly the row similarity prefix reuse exploits.
//
// Draws come from std::mt19937_64, whose output sequence is fixed by the
// standard, and are mapped to [0, 1) with 53-bit precision, so a (spec, seed)
// pair yields the same matrix on every platform.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "prosparse/spike_matrix.hpp"

namespace prosparse {

enum class SynthKind { bernoulli, clustered };

struct SynthSpec {
    SynthKind kind = SynthKind::bernoulli;
    std::size_t rows = 256;
    std::size_t cols = 16;
    double density = 0.3;
    std::size_t base_patterns = 8;
    double flip_probability = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        detail::require(rows >= 1 && cols >= 1, "synthetic matrix needs rows >= 1 and cols >= 1");
        detail::require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
        detail::require(flip_probability >= 0.0 && flip_probability <= 1.0, "flip probability must lie in [0, 1]");
        detail::require(base_patterns >= 1, "clustered generation needs at least one base pattern");
    }
};

class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

inline SpikeMatrix generate(const SynthSpec& spec) {
    spec.validate();
    SynthRng rng(spec.seed);
    SpikeMatrix out(spec.rows, spec.cols);
    if (spec.kind == SynthKind::bernoulli) {
        for (std::size_t r = 0; r < spec.rows; ++r)
            for (std::size_t c = 0; c < spec.cols; ++c)
                if (rng.bernoulli(spec.density)) out.set(r, c);
        return out;
    }

    SpikeMatrix bases(spec.base_patterns, spec.cols);
    for (std::size_t b = 0; b < spec.base_patterns; ++b)
        for (std::size_t c = 0; c < spec.cols; ++c)
            if (rng.bernoulli(spec.density)) bases.set(b, c);
    for (std::size_t r = 0; r < spec.rows; ++r) {
        const std::size_t b = rng.index(spec.base_patterns);
        for (std::size_t c = 0; c < spec.cols; ++c) {
            bool v = bases.get(b, c);
            if (spec.flip_probability > 0.0 && rng.bernoulli(spec.flip_probability)) v = !v;
            if (v) out.set(r, c);
        }
    }
    return out;
}

// Uniform int8 weights over the full range.
inline WeightMatrix<std::int8_t> generate_int8_weights(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SynthRng rng(seed);
    WeightMatrix<std::int8_t> w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) w(r, c) = static_cast<std::int8_t>(static_cast<int>(rng.bits() % 256) - 128);
    return w;
}

// Uniform float weights in [-1, 1).
inline WeightMatrix<float> generate_float_weights(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SynthRng rng(seed);
    WeightMatrix<float> w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) w(r, c) = static_cast<float>(2.0 * rng.uniform() - 1.0);
    return w;
}

}  // namespace prosparse
