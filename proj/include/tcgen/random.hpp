#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "error.hpp"

namespace tcgen {

using Rng = std::mt19937_64;

/// Independent engine for a (seed, tag...) tuple. Used to give every
/// timestep and every stage its own reproducible stream.
inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags.size());
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Shape parameters of a Beta distribution.
struct ShapeParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const {
        if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
            throw ValidationError("beta shape parameters must be positive and finite");
    }
    bool uniform() const { return alpha == 1.0 && beta == 1.0; }
};

inline double sample_beta(Rng& rng, ShapeParams shape) {
    if (shape.uniform())
        return uniform01(rng);
    std::gamma_distribution<double> ga(shape.alpha, 1.0);
    std::gamma_distribution<double> gb(shape.beta, 1.0);
    double x = ga(rng);
    double y = gb(rng);
    if (x + y <= 0.0)
        return shape.alpha >= shape.beta ? 1.0 : 0.0;
    return x / (x + y);
}

/// Index in [0, n) drawn by scaling a Beta variate to the list length.
/// With alpha = beta = 1 this is a uniform draw.
inline std::size_t beta_index(Rng& rng, ShapeParams shape, std::size_t n) {
    auto k = static_cast<std::size_t>(std::floor(sample_beta(rng, shape) * static_cast<double>(n)));
    return std::min(k, n - 1);
}

} // namespace tcgen
