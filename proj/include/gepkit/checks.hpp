#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gepkit/decomp.hpp"
#include "gepkit/gep.hpp"
#include "gepkit/matrix.hpp"
#include "gepkit/objective.hpp"

namespace gepkit {

enum class EqualityCase { strict, equality, not_applicable };

inline const char* to_string(EqualityCase c) {
    switch (c) {
        case EqualityCase::strict: return "strict";
        case EqualityCase::equality: return "equality";
        default: return "not-applicable";
    }
}

/// Verdict of one inequality or property check. Bound reports claim
/// lhs <= rhs: holds <=> residual = rhs - lhs >= -tol, and equality_case
/// is equality <=> |residual| <= eq_tol. Property reports carry a value
/// against a ceiling and leave equality_case at not_applicable.
struct CheckReport {
    std::string name;
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tol = 0.0;
    double eq_tol = 1e-8;
    EqualityCase equality_case = EqualityCase::not_applicable;
    std::string note;
    std::vector<std::pair<std::string, Matrix>> witnesses;
    std::vector<CheckReport> details;

    bool all_hold() const {
        if (!holds) return false;
        for (const CheckReport& d : details)
            if (!d.all_hold()) return false;
        return true;
    }
};

inline constexpr double kIneqTol = 1e-9;  // slack for randomized bound checks
inline constexpr double kEqTol = 1e-8;    // equality detection threshold

inline CheckReport make_bound_report(std::string name, double lhs, double rhs,
                                     double tol = kIneqTol,
                                     double eq_tol = kEqTol) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = rhs - lhs;
    r.tol = tol;
    r.eq_tol = eq_tol;
    r.holds = r.residual >= -tol;
    r.equality_case = std::abs(r.residual) <= eq_tol ? EqualityCase::equality
                                                     : EqualityCase::strict;
    return r;
}

inline CheckReport make_residual_report(std::string name, double value,
                                        double ceiling) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = value;
    r.rhs = ceiling;
    r.residual = ceiling - value;
    r.tol = 0.0;
    r.holds = value <= ceiling;
    r.equality_case = EqualityCase::not_applicable;
    return r;
}

namespace detail {

inline Matrix column_matrix(const Vector& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

inline Matrix reconstruct(const SymEig& eig) {
    const Matrix& u = eig.eigenvectors;
    return symmetrize(u * Matrix::diagonal(eig.eigenvalues) * u.transpose());
}

inline bool nonincreasing(const Vector& v, double slack) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i] < v[i + 1] - slack) return false;
    return true;
}

}  // namespace detail

/// Which containment the caller asserts about u before a Rayleigh bound.
enum class RayleighHypothesis { in_leading_span, perp_leading_span };

/// Rayleigh bound on the quotient u^T A u / u^T u against the i-th (1-based,
/// descending) eigenvalue of the decomposition. in_leading_span asserts
/// u in span(u_1..u_i) and claims quotient >= lambda_i; perp_leading_span
/// asserts u perp span(u_1..u_{i-1}) and claims quotient <= lambda_i. The
/// stated hypothesis is verified first (projection residual <= 1e-8 ||u||).
/// Returns {bound report, eigenvector report}; the second is vacuous unless
/// the bound is met with equality, in which case it certifies that u is a
/// lambda_i-eigenvector.
inline std::pair<CheckReport, CheckReport> rayleigh_bounds(
    const SymEig& eig, const Vector& u, std::size_t i,
    RayleighHypothesis hypothesis) {
    const std::size_t d = eig.eigenvalues.size();
    if (i < 1 || i > d) throw BadK("rayleigh: need 1 <= i <= d");
    if (u.size() != d) throw ShapeMismatch("rayleigh: u has wrong dimension");
    const double nu = norm2(u);
    if (nu == 0.0) throw ZeroVector("rayleigh: u is zero");

    Vector un(d);
    for (std::size_t j = 0; j < d; ++j) un[j] = u[j] / nu;

    // Projection of the unit vector onto span(u_1..u_m).
    const auto project = [&](std::size_t m) {
        Vector p(d, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const Vector uj = eig.eigenvectors.col(j);
            const double c = dot(uj, un);
            for (std::size_t r = 0; r < d; ++r) p[r] += c * uj[r];
        }
        return p;
    };

    if (hypothesis == RayleighHypothesis::in_leading_span) {
        Vector p = project(i);
        for (std::size_t r = 0; r < d; ++r) p[r] -= un[r];
        if (norm2(p) > 1e-8)
            throw HypothesisViolated("rayleigh: u is not in the leading span");
    } else if (i > 1) {
        if (norm2(project(i - 1)) > 1e-8)
            throw HypothesisViolated(
                "rayleigh: u is not orthogonal to the leading span");
    }

    const Matrix a = detail::reconstruct(eig);
    const Vector au = a * un;
    const double quotient = dot(un, au);
    const double lambda_i = eig.eigenvalues[i - 1];

    CheckReport bound =
        hypothesis == RayleighHypothesis::in_leading_span
            ? make_bound_report("rayleigh-lower", lambda_i, quotient)
            : make_bound_report("rayleigh-upper", quotient, lambda_i);

    CheckReport vec;
    if (bound.equality_case == EqualityCase::equality) {
        Vector r = au;
        for (std::size_t j = 0; j < d; ++j) r[j] -= lambda_i * un[j];
        vec = make_residual_report("rayleigh-eigenvector", norm2(r),
                                   1e-7 * (1.0 + a.max_abs()));
        vec.witnesses.emplace_back("u", detail::column_matrix(un));
    } else {
        vec = make_residual_report("rayleigh-eigenvector", 0.0, 0.0);
        vec.note = "not triggered (bound is strict)";
    }
    return {std::move(bound), std::move(vec)};
}

/// Interlacing mu_i <= lambda_i between the eigenvalues of the compression
/// S^T A S and of A, one report per i. Requires S^T S = I_k within 1e-8.
/// If every bound is met with equality, each report carries a detail showing
/// that S v_i is a mu_i-eigenvector of A (residual <= 1e-7).
inline std::vector<CheckReport> haemers_interlace(const Matrix& a,
                                                  const Matrix& s) {
    if (s.rows() != a.rows())
        throw ShapeMismatch("interlace: S row count must match A");
    const std::size_t k = s.cols();
    const Matrix gram = s.transpose() * s;
    if (max_abs_diff(gram, Matrix::identity(k)) > 1e-8)
        throw NotOrthonormal("interlace: S^T S is not the identity");

    const SymEig eig_a = sym_eig(a);
    const SymEig eig_c = sym_eig(symmetrize(s.transpose() * (a * s)));

    std::vector<CheckReport> reports;
    reports.reserve(k);
    bool all_equal = true;
    for (std::size_t i = 0; i < k; ++i) {
        reports.push_back(make_bound_report("interlace[" + std::to_string(i + 1) + "]",
                                            eig_c.eigenvalues[i],
                                            eig_a.eigenvalues[i]));
        all_equal = all_equal &&
                    reports.back().equality_case == EqualityCase::equality;
    }

    if (all_equal) {
        for (std::size_t i = 0; i < k; ++i) {
            const Vector w = s * eig_c.eigenvectors.col(i);
            Vector r = a * w;
            for (std::size_t j = 0; j < r.size(); ++j)
                r[j] -= eig_c.eigenvalues[i] * w[j];
            CheckReport prop =
                make_residual_report("eigenvector-propagation", norm2(r), 1e-7);
            prop.witnesses.emplace_back("Sv", detail::column_matrix(w));
            reports[i].details.push_back(std::move(prop));
        }
    }
    return reports;
}

/// Bound trace(W^T A W) <= sum of the k largest generalized eigenvalues for
/// B-orthonormal W. On equality (|residual| <= 1e-7) verifies that col(W)
/// matches the oracle top-k subspace (principal angles <= 1e-5) unless the
/// subspace is not unique at gap_tol; conversely, when col(W) is the oracle
/// subspace within 1e-7 the bound must be met with equality.
inline CheckReport constrained_bound(const GepProblem& p, const Matrix& w,
                                     std::size_t k, double gap_tol = 1e-8) {
    if (w.cols() != k)
        throw ShapeMismatch("constrained: W must have exactly k columns");
    if (w.rows() != p.dim())
        throw ShapeMismatch("constrained: W row count must match problem");
    const Matrix gram = w.transpose() * (p.b() * w);
    if (max_abs_diff(gram, Matrix::identity(k)) > 1e-8)
        throw NotBOrthonormal("constrained: W^T B W is not the identity");

    const GepSolution sol = solve_dense(p);
    double top_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) top_sum += sol.eigenvalues[i];
    const double tr = (w.transpose() * (p.a() * w)).trace();

    CheckReport report = make_bound_report("constrained-trace-bound", tr, top_sum);
    const TopK tk = top_k(sol, k, gap_tol);
    const bool near_equal = std::abs(report.residual) <= 1e-7;

    if (!tk.unique) {
        if (near_equal)
            report.note = "top-k subspace not unique at gap_tol; subspace match skipped";
        return report;
    }

    const Vector angles = principal_angles(w, tk.basis);
    const double worst = angles.empty() ? 0.0 : angles.back();
    if (near_equal)
        report.details.push_back(
            make_residual_report("equality-implies-top-k", worst, 1e-5));
    if (worst <= 1e-7)
        report.details.push_back(make_residual_report(
            "top-k-implies-equality", std::abs(report.residual), 1e-7));
    return report;
}

/// Trace inequality <X, Y> <= sum_j sigma_j(X) sigma_j(Y). On equality,
/// verifies a shared singular frame: with (u_j, v_j) from the decomposition
/// of X + Y (a common refinement when the frames agree), the reconstruction
/// sum_j sigma_j(X) u_j v_j^T must reproduce X within 1e-7 in Frobenius norm.
inline CheckReport von_neumann(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeMismatch("von neumann: X and Y must have the same shape");

    const Vector sx = svd(x).singulars;
    const Vector sy = svd(y).singulars;
    double rhs = 0.0;
    for (std::size_t j = 0; j < sx.size(); ++j) rhs += sx[j] * sy[j];

    CheckReport report =
        make_bound_report("von-neumann", frobenius_dot(x, y), rhs);
    if (report.equality_case == EqualityCase::equality) {
        const Svd joint = svd(x + y);
        const Matrix recon =
            joint.left * Matrix::diagonal(sx) * joint.right.transpose();
        const double err = (x - recon).frobenius_norm();
        report.details.push_back(
            make_residual_report("shared-singular-frame", err, 1e-7));
    }
    return report;
}

/// PSD specialization <A, M> <= sum_i lambda_i(A) mu_i(M), both spectra
/// descending. On equality, certifies simultaneous diagonalization in matched
/// order: some U from sym_eig(A + cM), c in {1, 1/2, 1/3}, makes U^T A U and
/// U^T M U diagonal within 1e-6 with both diagonals descending.
inline CheckReport psd_von_neumann(const Matrix& a, const Matrix& m) {
    if (a.rows() != m.rows() || a.cols() != m.cols())
        throw ShapeMismatch("psd von neumann: A and M must have the same shape");
    const SymEig eig_a = sym_eig(a);
    if (eig_a.eigenvalues.back() < -1e-8 * (1.0 + a.max_abs()))
        throw NotPSD("psd von neumann: A is not positive semi-definite");
    const SymEig eig_m = sym_eig(m);

    double rhs = 0.0;
    for (std::size_t i = 0; i < eig_a.eigenvalues.size(); ++i)
        rhs += eig_a.eigenvalues[i] * eig_m.eigenvalues[i];

    CheckReport report =
        make_bound_report("psd-von-neumann", frobenius_dot(a, m), rhs);
    if (report.equality_case != EqualityCase::equality) return report;

    // Repeated eigenvalues in both A and M can make c = 1 degenerate; sweep
    // a few combinations and keep the best attempt.
    CheckReport best;
    bool have = false;
    for (double c : {1.0, 0.5, 1.0 / 3.0}) {
        const Matrix u = sym_eig(symmetrize(a + c * m)).eigenvectors;
        const Matrix da = u.transpose() * (a * u);
        const Matrix dm = u.transpose() * (m * u);
        double off = 0.0;
        Vector diag_a(a.rows()), diag_m(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            diag_a[i] = da(i, i);
            diag_m[i] = dm(i, i);
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (i != j) off = std::max({off, std::abs(da(i, j)), std::abs(dm(i, j))});
        }
        const double slack_a = 1e-8 * (1.0 + max_abs(diag_a));
        const double slack_m = 1e-8 * (1.0 + max_abs(diag_m));
        CheckReport attempt =
            make_residual_report("simultaneous-diagonalization", off, 1e-6);
        attempt.note = "c = " + std::to_string(c);
        if (!detail::nonincreasing(diag_a, slack_a) ||
            !detail::nonincreasing(diag_m, slack_m)) {
            attempt.holds = false;
            attempt.note += "; diagonal order mismatch";
        }
        if (attempt.holds) {
            best = std::move(attempt);
            have = true;
            break;
        }
        if (!have || attempt.lhs < best.lhs) best = std::move(attempt);
        have = true;
    }
    report.details.push_back(std::move(best));
    return report;
}

/// For symmetric PSD A, the singular value decomposition doubles as an
/// eigendecomposition: every sigma_i above 1e-8 must have u_i = v_i (after
/// sign alignment) and A u_i = sigma_i u_i.
inline CheckReport psd_svd_is_eig(const Matrix& a) {
    const SymEig eig = sym_eig(a);
    if (eig.eigenvalues.back() < -1e-8 * (1.0 + a.max_abs()))
        throw NotPSD("psd svd: A is not positive semi-definite");

    const Svd s = svd(a);
    const double pair_tol = 1e-7;
    const double eig_tol = 1e-7 * (1.0 + a.max_abs());

    double worst = 0.0;
    std::vector<CheckReport> details;
    for (std::size_t i = 0; i < s.singulars.size(); ++i) {
        if (s.singulars[i] <= 1e-8) continue;
        Vector u = s.left.col(i);
        Vector v = s.right.col(i);
        if (dot(u, v) < 0.0)
            for (double& t : v) t = -t;
        Vector duv(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) duv[j] = u[j] - v[j];
        Vector r = a * u;
        for (std::size_t j = 0; j < r.size(); ++j) r[j] -= s.singulars[i] * u[j];

        const std::string idx = "[" + std::to_string(i + 1) + "]";
        details.push_back(make_residual_report("left-equals-right" + idx,
                                               norm2(duv), pair_tol));
        details.push_back(
            make_residual_report("eigenpair" + idx, norm2(r), eig_tol));
        worst = std::max({worst, norm2(duv) / pair_tol, norm2(r) / eig_tol});
    }

    CheckReport report = make_residual_report("psd-svd-is-eig", worst, 1.0);
    if (details.empty()) report.note = "no singular values above threshold";
    report.details = std::move(details);
    return report;
}

/// Bound trace(Lambda M (2I - M)) <= trace(Lambda) for positive diagonal
/// Lambda and symmetric PSD M. On equality verifies the unique argmax M = I
/// within 1e-7. When ||M||_op reaches the sign-change radius
/// 1 + sqrt(1 + (p-1) lambda_max/lambda_min), a detail certifies the value
/// is nonpositive.
inline CheckReport perspective_report(const Matrix& lambda, const Matrix& m) {
    const double val = perspective_value(lambda, m);
    double tr = 0.0;
    for (std::size_t i = 0; i < lambda.rows(); ++i) tr += lambda(i, i);

    CheckReport report = make_bound_report("perspective-bound", val, tr);
    if (report.equality_case == EqualityCase::equality)
        report.details.push_back(make_residual_report(
            "perspective-argmax",
            max_abs_diff(m, Matrix::identity(m.rows())), 1e-7));

    const double op = sym_eig(m).eigenvalues.front();
    if (op >= perspective_radius(lambda)) {
        CheckReport sign = make_residual_report("perspective-sign-change", val, 0.0);
        sign.note = "||M||_op beyond the radius forces a nonpositive value";
        report.details.push_back(std::move(sign));
    }
    return report;
}

/// Eigenvalues of M = W W^T (2I - W W^T), descending. Each equals
/// 2 d_i^2 - d_i^4 for a singular value d_i of W (zero-padded), which is
/// what m_spectrum_report certifies.
inline Vector m_spectrum(const Matrix& w) {
    const Matrix g = w * w.transpose();
    const Matrix m = symmetrize(2.0 * g - g * g);
    return sym_eig(m).eigenvalues;
}

/// Cross-check of the two routes to the spectrum of M: direct eigenvalues
/// against 2 d_i^2 - d_i^4 from svd(W), sorted descending and zero-padded.
/// A detail report enforces the ceiling mu <= 1 + 1e-10.
inline CheckReport m_spectrum_report(const Matrix& w, double tol = 1e-8) {
    const Vector mu = m_spectrum(w);
    const std::size_t d = w.rows();

    Vector predicted(d, 0.0);
    const Vector sing = svd(w).singulars;
    for (std::size_t i = 0; i < sing.size() && i < d; ++i) {
        const double t = sing[i] * sing[i];
        predicted[i] = 2.0 * t - t * t;
    }
    std::sort(predicted.begin(), predicted.end(), std::greater<double>());

    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        diff = std::max(diff, std::abs(mu[i] - predicted[i]));

    CheckReport report = make_residual_report("m-spectrum-formula", diff, tol);
    report.details.push_back(make_residual_report(
        "m-spectrum-upper", mu.empty() ? 0.0 : mu.front(), 1.0 + 1e-10));
    return report;
}

}  // namespace gepkit
