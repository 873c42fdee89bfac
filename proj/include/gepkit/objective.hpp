#pragma once

#include <cmath>
#include <cstddef>

#include "gepkit/decomp.hpp"
#include "gepkit/gep.hpp"
#include "gepkit/matrix.hpp"

namespace gepkit {

/// The unconstrained trace objective for a problem (A, B) at subspace size k:
///   h(W) = trace(W^T A W (2 I_k - W^T B W))
/// Maximizing h over all d x k matrices recovers the top-k subspace when A is
/// positive semi-definite; no constraint on W is ever imposed.
struct Objective {
    GepProblem problem;
    std::size_t k;

    Objective(GepProblem p, std::size_t k_) : problem(std::move(p)), k(k_) {
        if (k < 1 || k > problem.dim()) throw BadK("Objective: need 1 <= k <= d");
    }
};

namespace detail {

inline void require_iterate_shape(const Matrix& a, const Matrix& w, std::size_t k) {
    if (w.rows() != a.rows() || w.cols() != k)
        throw ShapeMismatch("objective: W must be d x k");
    w.require_finite();
}

}  // namespace detail

/// h for arbitrary symmetric A and B of matching size; no validation beyond
/// shapes. The Objective overloads below are the checked entry points.
inline double h_value(const Matrix& a, const Matrix& b, const Matrix& w) {
    const Matrix aw = a * w;
    const Matrix bw = b * w;
    const Matrix p = w.transpose() * aw;  // W^T A W
    const Matrix q = w.transpose() * bw;  // W^T B W
    double trace_pq = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) trace_pq += p(i, j) * q(j, i);
    return 2.0 * p.trace() - trace_pq;
}

inline double h_value(const Objective& obj, const Matrix& w) {
    detail::require_iterate_shape(obj.problem.a(), w, obj.k);
    return h_value(obj.problem.a(), obj.problem.b(), w);
}

/// Analytic gradient of h:
///   grad h(W) = 4 A W - 2 A W (W^T B W) - 2 B W (W^T A W)
inline Matrix h_gradient(const Matrix& a, const Matrix& b, const Matrix& w) {
    const Matrix aw = a * w;
    const Matrix bw = b * w;
    const Matrix p = w.transpose() * aw;
    const Matrix q = w.transpose() * bw;
    return 4.0 * aw - 2.0 * (aw * q) - 2.0 * (bw * p);
}

inline Matrix h_gradient(const Objective& obj, const Matrix& w) {
    detail::require_iterate_shape(obj.problem.a(), w, obj.k);
    return h_gradient(obj.problem.a(), obj.problem.b(), w);
}

/// The matrix perspective functional trace(Lambda M (2I - M)) for a strictly
/// positive diagonal Lambda and symmetric PSD M. Bounded by trace(Lambda),
/// attained exactly at M = I.
inline double perspective_value(const Matrix& lambda, const Matrix& m) {
    if (!lambda.square()) throw BadLambda("perspective: Lambda must be square");
    const std::size_t p = lambda.rows();
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (i != j && lambda(i, j) != 0.0)
                throw BadLambda("perspective: Lambda must be diagonal");
        }
        if (lambda(i, i) <= 0.0)
            throw BadLambda("perspective: Lambda entries must be positive");
    }
    if (!m.square() || m.rows() != p)
        throw ShapeMismatch("perspective: M must match Lambda's size");
    if (asymmetry(m) > 1e-10 * m.max_abs())
        throw NotPSD("perspective: M is not symmetric");
    const SymEig meig = sym_eig(m);
    if (meig.eigenvalues.back() < -1e-8 * (1.0 + m.max_abs()))
        throw NotPSD("perspective: M is not positive semi-definite");

    // trace(Lambda K) with K = 2M - M^2 only needs K's diagonal.
    const Matrix m2 = m * m;
    double value = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        value += lambda(i, i) * (2.0 * m(i, i) - m2(i, i));
    return value;
}

/// Radius R* = 1 + sqrt(1 + (p-1) lambda_max / lambda_min): the perspective
/// functional is non-positive whenever ||M||_op >= R*.
inline double perspective_radius(const Matrix& lambda) {
    const std::size_t p = lambda.rows();
    double lo = lambda(0, 0), hi = lambda(0, 0);
    for (std::size_t i = 1; i < p; ++i) {
        lo = std::min(lo, lambda(i, i));
        hi = std::max(hi, lambda(i, i));
    }
    if (lo <= 0.0) throw BadLambda("perspective_radius: Lambda entries must be positive");
    return 1.0 + std::sqrt(1.0 + static_cast<double>(p - 1) * hi / lo);
}

/// Replace W by a matrix with the same column space and B-orthonormal columns:
/// W_bar = W (W^T B W)^{-1/2} using the symmetric inverse square root. For
/// positive semi-definite A this never decreases h.
inline Matrix b_orthonormalize(const Objective& obj, const Matrix& w) {
    detail::require_iterate_shape(obj.problem.a(), w, obj.k);
    const Matrix s = symmetrize(w.transpose() * (obj.problem.b() * w));
    const SymEig eig = sym_eig(s);
    if (eig.eigenvalues.back() <= 1e-10 * eig.eigenvalues.front())
        throw RankDeficient("b_orthonormalize: W^T B W is numerically singular");

    const std::size_t k = obj.k;
    Matrix scaled = eig.eigenvectors;
    for (std::size_t j = 0; j < k; ++j) {
        const double f = 1.0 / std::sqrt(eig.eigenvalues[j]);
        for (std::size_t i = 0; i < k; ++i) scaled(i, j) *= f;
    }
    const Matrix gamma = symmetrize(scaled * eig.eigenvectors.transpose());
    return w * gamma;
}

}  // namespace gepkit
