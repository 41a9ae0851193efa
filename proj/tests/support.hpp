#pragma once

#include <cmath>
#include <cstdint>

#include "czlab/grid.hpp"
#include "czlab/rng.hpp"

namespace czlab::test {

inline GridFunction random_function(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    Vec v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = cplx(rng.normal(), rng.normal());
    return {g, v};
}

/// Random function times a bump, so it vanishes near the ends of the grid.
inline GridFunction random_interior(const Grid& g, std::uint64_t seed, double radius) {
    GridFunction f = random_function(g, seed);
    for (int i = 0; i < g.size(); ++i) {
        const double t = g.x(i) / radius;
        f.values()[i] *= std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    }
    return f;
}

inline DenseOperator random_operator(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    Mat c(g.size(), g.size());
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j) c(i, j) = cplx(rng.normal(), rng.normal());
    return {g, c};
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace czlab::test
