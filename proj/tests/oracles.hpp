// Test-only oracles, deliberately independent of the library's Jacobi
// eigensolver and one-sided Jacobi SVD so that agreement between the two
// routes is evidence rather than tautology.
#pragma once

#include <cmath>
#include <cstddef>

#include "gepkit/matrix.hpp"
#include "gepkit/objective.hpp"

namespace oracles {

using gepkit::Matrix;
using gepkit::Vector;

/// Number of eigenvalues of symmetric A strictly below x, via the inertia of
/// A - xI under symmetric Gaussian elimination (Sylvester's law). A zero
/// pivot means x is an eigenvalue of a leading principal submatrix; nudging
/// it negative is harmless inside a bisection loop.
inline std::size_t count_eigs_below(const Matrix& a, double x) {
    const std::size_t n = a.rows();
    Matrix c = a;
    for (std::size_t i = 0; i < n; ++i) c(i, i) -= x;

    std::size_t negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double pivot = c(k, k);
        if (pivot == 0.0) pivot = -1e-300;
        if (pivot < 0.0) ++negatives;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = c(i, k) / pivot;
            for (std::size_t j = k + 1; j < n; ++j) c(i, j) -= f * c(k, j);
        }
    }
    return negatives;
}

/// All eigenvalues of symmetric A, descending, each located by bisection on
/// the inertia count. Pure counting plus interval halving; shares no code
/// with the library's rotation-based solver.
inline Vector bisection_eigenvalues(const Matrix& a) {
    const std::size_t n = a.rows();
    const double radius = a.frobenius_norm() + 1.0;
    Vector out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        // The i-th largest eigenvalue is the infimum of x with at least
        // n - i + 1 eigenvalues below x.
        const std::size_t target = n - i + 1;
        double lo = -radius, hi = radius;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_eigs_below(a, mid) >= target)
                hi = mid;
            else
                lo = mid;
        }
        out[i - 1] = 0.5 * (lo + hi);
    }
    return out;
}

/// Singular values of X, descending, as square roots of the bisection
/// eigenvalues of the smaller Gram matrix.
inline Vector gram_singulars(const Matrix& x) {
    const Matrix g = x.cols() <= x.rows()
                         ? gepkit::symmetrize(x.transpose() * x)
                         : gepkit::symmetrize(x * x.transpose());
    Vector ev = bisection_eigenvalues(g);
    for (double& v : ev) v = std::sqrt(std::max(0.0, v));
    return ev;
}

/// Central finite differences of the ascent objective in every coordinate
/// of W.
inline Matrix fd_gradient(const Matrix& a, const Matrix& b, const Matrix& w,
                          double step = 0.0) {
    const double h = step > 0.0 ? step : 1e-5 * (1.0 + w.max_abs());
    Matrix g(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) {
            Matrix wp = w, wm = w;
            wp(i, j) += h;
            wm(i, j) -= h;
            g(i, j) =
                (gepkit::h_value(a, b, wp) - gepkit::h_value(a, b, wm)) / (2.0 * h);
        }
    return g;
}

}  // namespace oracles
