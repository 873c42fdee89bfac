#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "gepkit/matrix.hpp"

namespace gepkit {

/// Eigendecomposition of a symmetric matrix: A = U diag(eigenvalues) U^T with
/// eigenvalues in descending order and orthonormal columns in `eigenvectors`.
struct SymEig {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Singular value decomposition X = left diag(singulars) right^T with
/// q = min(rows, cols) triples and singular values descending.
struct Svd {
    Matrix left;
    Vector singulars;
    Matrix right;
};

namespace detail {

// Flip column sign so the largest-magnitude entry is positive; ties go to the
// first occurrence. Returns true if the column was flipped.
inline bool sign_normalize_col(Matrix& m, std::size_t j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double a = std::abs(m(i, j));
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (m(arg, j) < 0.0) {
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
        return true;
    }
    return false;
}

inline double max_offdiag(const Matrix& s) {
    double m = 0.0;
    for (std::size_t p = 0; p < s.rows(); ++p)
        for (std::size_t q = p + 1; q < s.cols(); ++q)
            m = std::max(m, std::abs(s(p, q)));
    return m;
}

}  // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Sweeps until every
/// off-diagonal entry is at most `tol * ||A||_F` (default 1e-12), capped at 100
/// sweeps. Equal eigenvalues keep their post-rotation encounter order.
inline SymEig sym_eig(const Matrix& a, double tol = 1e-12) {
    if (!a.square()) throw ShapeMismatch("sym_eig needs a square matrix");
    const std::size_t n = a.rows();
    if (asymmetry(a) > 1e-10 * a.max_abs())
        throw NotSymmetric("sym_eig: matrix is not symmetric");

    Matrix s = symmetrize(a);
    Matrix v = Matrix::identity(n);
    const double threshold = tol * s.frobenius_norm();

    if (n > 1 && threshold > 0.0) {
        bool converged = false;
        for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
            bool rotated = false;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = s(p, q);
                    if (std::abs(apq) <= threshold) continue;
                    rotated = true;

                    const double tau = (s(q, q) - s(p, p)) / (2.0 * apq);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double sn = t * c;

                    const double app = s(p, p), aqq = s(q, q);
                    s(p, p) = app - t * apq;
                    s(q, q) = aqq + t * apq;
                    s(p, q) = s(q, p) = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i == p || i == q) continue;
                        const double aip = s(i, p), aiq = s(i, q);
                        s(i, p) = s(p, i) = c * aip - sn * aiq;
                        s(i, q) = s(q, i) = sn * aip + c * aiq;
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vip = v(i, p), viq = v(i, q);
                        v(i, p) = c * vip - sn * viq;
                        v(i, q) = sn * vip + c * viq;
                    }
                }
            }
            converged = !rotated || detail::max_offdiag(s) <= threshold;
            if (!converged && sweep == 99)
                throw NoConvergence("sym_eig: Jacobi sweep limit exceeded");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return s(i, i) > s(j, j); });

    SymEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = s(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
        detail::sign_normalize_col(out.eigenvectors, j);
    }
    return out;
}

namespace detail {

// One-sided Jacobi on the columns of x (rows >= cols assumed by the caller).
// On return the columns of x are mutually orthogonal and r accumulates the
// right rotations.
inline void one_sided_jacobi(Matrix& x, Matrix& r) {
    const std::size_t n = x.cols();
    const double tol = 1e-13;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    alpha += x(i, p) * x(i, p);
                    beta += x(i, q) * x(i, q);
                    gamma += x(i, p) * x(i, q);
                }
                const double scale = std::sqrt(alpha * beta);
                if (scale == 0.0 || std::abs(gamma) <= tol * scale) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    const double xip = x(i, p), xiq = x(i, q);
                    x(i, p) = c * xip - sn * xiq;
                    x(i, q) = sn * xip + c * xiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double rip = r(i, p), riq = r(i, q);
                    r(i, p) = c * rip - sn * riq;
                    r(i, q) = sn * rip + c * riq;
                }
            }
        }
        converged = !rotated;
        if (!converged && sweep == 99)
            throw NoConvergence("svd: Jacobi sweep limit exceeded");
    }
}

// Replace column j of u with a unit vector orthogonal to all columns in
// `taken`; used to complete the left factor when X is rank deficient.
inline void fill_orthonormal_col(Matrix& u, std::size_t j,
                                 const std::vector<std::size_t>& taken) {
    const std::size_t m = u.rows();
    for (std::size_t cand = 0; cand < m; ++cand) {
        Vector e(m, 0.0);
        e[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t t : taken) {
                double proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += e[i] * u(i, t);
                for (std::size_t i = 0; i < m; ++i) e[i] -= proj * u(i, t);
            }
        }
        const double nrm = norm2(e);
        if (nrm > 0.5) {
            for (std::size_t i = 0; i < m; ++i) u(i, j) = e[i] / nrm;
            return;
        }
    }
    throw Error("svd: failed to complete an orthonormal basis");
}

}  // namespace detail

/// SVD by one-sided Jacobi on columns (the transpose is used when cols > rows,
/// so left/right swap). Zero singular directions get an orthonormal fill-in.
inline Svd svd(const Matrix& x) {
    x.require_finite();
    if (x.rows() < x.cols()) {
        Svd t = svd(x.transpose());
        return Svd{std::move(t.right), std::move(t.singulars), std::move(t.left)};
    }
    const std::size_t m = x.rows(), n = x.cols();

    Matrix w = x;
    Matrix r = Matrix::identity(n);
    detail::one_sided_jacobi(w, r);

    Vector sig(n);
    for (std::size_t j = 0; j < n; ++j) sig[j] = norm2(w.col(j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

    Svd out;
    out.singulars.resize(n);
    out.left = Matrix(m, n);
    out.right = Matrix(n, n);
    std::vector<std::size_t> nonzero;
    std::vector<std::size_t> zero;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.singulars[j] = sig[src];
        for (std::size_t i = 0; i < n; ++i) out.right(i, j) = r(i, src);
        if (sig[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.left(i, j) = w(i, src) / sig[src];
            nonzero.push_back(j);
        } else {
            zero.push_back(j);
        }
    }
    for (std::size_t j : zero) {
        detail::fill_orthonormal_col(out.left, j, nonzero);
        nonzero.push_back(j);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (detail::sign_normalize_col(out.left, j)) {
            for (std::size_t i = 0; i < n; ++i) out.right(i, j) = -out.right(i, j);
        }
    }
    return out;
}

/// B^{1/2} (sign = +1) or B^{-1/2} (sign = -1) of a symmetric positive
/// definite matrix, via its eigendecomposition.
inline Matrix mat_pow_half(const Matrix& b, int sign) {
    if (sign != 1 && sign != -1)
        throw Error("mat_pow_half: sign must be +1 or -1");
    const SymEig eig = sym_eig(b);
    const double pd_tol = 1e-10 * b.max_abs();
    if (eig.eigenvalues.empty() || eig.eigenvalues.back() <= pd_tol)
        throw NotPositiveDefinite("mat_pow_half: matrix is not positive definite");

    const std::size_t n = b.rows();
    Matrix scaled = eig.eigenvectors;
    for (std::size_t j = 0; j < n; ++j) {
        const double f = sign > 0 ? std::sqrt(eig.eigenvalues[j])
                                  : 1.0 / std::sqrt(eig.eigenvalues[j]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= f;
    }
    return symmetrize(scaled * eig.eigenvectors.transpose());
}

/// Principal angles between the column spaces of w1 and w2, ascending, in
/// [0, pi/2]. Both inputs must have the same shape and full column rank.
inline Vector principal_angles(const Matrix& w1, const Matrix& w2) {
    if (w1.rows() != w2.rows() || w1.cols() != w2.cols())
        throw ShapeMismatch("principal_angles: shapes do not match");
    if (w1.cols() == 0 || w1.cols() > w1.rows())
        throw RankDeficient("principal_angles: need 1 <= k <= d columns");

    const auto basis = [](const Matrix& w) {
        Svd s = svd(w);
        if (s.singulars.back() <= 1e-10 * s.singulars.front())
            throw RankDeficient("principal_angles: input is rank deficient");
        return std::move(s.left);
    };
    const Matrix q1 = basis(w1);
    const Matrix q2 = basis(w2);

    const Svd g = svd(q1.transpose() * q2);
    Vector angles(g.singulars.size());
    for (std::size_t j = 0; j < angles.size(); ++j)
        angles[j] = std::acos(std::clamp(g.singulars[j], 0.0, 1.0));
    return angles;  // singulars descending => angles ascending
}

}  // namespace gepkit
