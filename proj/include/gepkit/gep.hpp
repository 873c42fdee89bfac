#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "gepkit/decomp.hpp"
#include "gepkit/matrix.hpp"

namespace gepkit {

/// A generalized eigenvalue problem (A, B): A symmetric, B symmetric positive
/// definite, both d x d. B's eigendecomposition is computed once at
/// construction (it both certifies definiteness and feeds the whitening).
class GepProblem {
public:
    GepProblem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
        if (!a_.square() || !b_.square() || a_.rows() != b_.rows())
            throw ShapeMismatch("GepProblem: A and B must be square with equal size");
        if (asymmetry(a_) > 1e-10 * a_.max_abs())
            throw NotSymmetric("GepProblem: A is not symmetric");
        if (asymmetry(b_) > 1e-10 * b_.max_abs())
            throw NotSymmetric("GepProblem: B is not symmetric");

        const SymEig beig = sym_eig(b_);
        if (beig.eigenvalues.empty() ||
            beig.eigenvalues.back() <= 1e-10 * b_.max_abs())
            throw NotPositiveDefinite("GepProblem: B is not positive definite");

        const std::size_t n = dim();
        Matrix scaled = beig.eigenvectors;
        for (std::size_t j = 0; j < n; ++j) {
            const double f = 1.0 / std::sqrt(beig.eigenvalues[j]);
            for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= f;
        }
        b_inv_half_ = symmetrize(scaled * beig.eigenvectors.transpose());
    }

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& b_inv_half() const { return b_inv_half_; }
    std::size_t dim() const { return a_.rows(); }

private:
    Matrix a_;
    Matrix b_;
    Matrix b_inv_half_;
};

/// Full solution of the GEP: eigenvalues descending, columns of `eigenvectors`
/// are B-orthonormal generalized eigenvectors, gaps[i] = lambda_i - lambda_{i+1}.
struct GepSolution {
    Vector eigenvalues;
    Matrix eigenvectors;
    Vector gaps;
};

/// First k eigenvector columns plus the uniqueness diagnostics for the spanned
/// subspace. `unique` is false when the spectral gap at k is below tolerance.
struct TopK {
    Matrix basis;
    double gap;
    bool unique;
};

/// The change of variables mapping (A, B) to the ordinary eigenvalue problem
/// (Atilde, I): Atilde = B^{-1/2} A B^{-1/2}. Also returns B^{-1/2} so callers
/// can map eigenvectors back.
inline std::pair<Matrix, Matrix> whiten(const GepProblem& p) {
    const Matrix& s = p.b_inv_half();
    return {symmetrize(s * p.a() * s), s};
}

/// Dense solve: eigendecompose the whitened matrix and map each eigenvector
/// w_i = B^{-1/2} wtilde_i back to the original variables.
inline GepSolution solve_dense(const GepProblem& p) {
    auto [atilde, b_inv_half] = whiten(p);
    SymEig eig = sym_eig(atilde);

    GepSolution sol;
    sol.eigenvalues = std::move(eig.eigenvalues);
    sol.eigenvectors = b_inv_half * eig.eigenvectors;
    sol.gaps.resize(p.dim() > 0 ? p.dim() - 1 : 0);
    for (std::size_t i = 0; i + 1 < p.dim(); ++i)
        sol.gaps[i] = sol.eigenvalues[i] - sol.eigenvalues[i + 1];
    return sol;
}

inline TopK top_k(const GepSolution& sol, std::size_t k, double gap_tol = 1e-8) {
    const std::size_t d = sol.eigenvalues.size();
    if (k < 1 || k > d) throw BadK("top_k: need 1 <= k <= d");

    TopK out;
    out.basis = Matrix(d, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < d; ++i)
            out.basis(i, j) = sol.eigenvectors(i, j);
    out.gap = k < d ? sol.gaps[k - 1] : std::numeric_limits<double>::infinity();
    out.unique = out.gap > gap_tol;
    return out;
}

}  // namespace gepkit
