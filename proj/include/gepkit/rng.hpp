#pragma once

#include <cstdint>
#include <random>

#include "gepkit/matrix.hpp"

namespace gepkit {

/// Seeded random stream with platform-independent draws. std::mt19937_64
/// output is pinned by the standard; the mapping to doubles below avoids
/// std::uniform_real_distribution, whose results vary across stdlibs.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    std::uint64_t uniform_index(std::uint64_t lo, std::uint64_t hi) {
        return lo + engine_() % (hi - lo + 1);
    }

    Matrix matrix(std::size_t rows, std::size_t cols, double scale = 1.0) {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * symmetric();
        return m;
    }

    Vector vector(std::size_t n, double scale = 1.0) {
        Vector v(n);
        for (double& x : v) x = scale * symmetric();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gepkit
