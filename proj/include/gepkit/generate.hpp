#pragma once

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>

#include "gepkit/decomp.hpp"
#include "gepkit/errors.hpp"
#include "gepkit/matrix.hpp"
#include "gepkit/rng.hpp"

namespace gepkit {

namespace detail {

inline double parse_double_strict(const std::string& tok) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end != nullptr && *end != '\0' &&
           std::isspace(static_cast<unsigned char>(*end)))
        ++end;
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw BadSpectrumSpec("spectrum: cannot parse number '" + tok + "'");
    return v;
}

}  // namespace detail

/// Eigenvalue list for generated instances. Two forms: an explicit
/// comma-separated list "3,2,1" (descending, nonnegative, length must match
/// the dimension at resolve time), or "gap:g" meaning lambda_i = 1 + g (d - i)
/// so consecutive eigenvalues differ by exactly g.
struct SpectrumSpec {
    enum class Kind { explicit_list, gap };
    Kind kind = Kind::explicit_list;
    Vector values;
    double gap = 0.0;

    static SpectrumSpec parse(const std::string& text) {
        SpectrumSpec spec;
        if (text.rfind("gap:", 0) == 0) {
            spec.kind = Kind::gap;
            spec.gap = detail::parse_double_strict(text.substr(4));
            if (spec.gap < 0.0)
                throw BadSpectrumSpec("spectrum: gap must be nonnegative");
            return spec;
        }
        if (text.empty()) throw BadSpectrumSpec("spectrum: empty spec");
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = text.find(',', start);
            const std::string tok = text.substr(
                start, comma == std::string::npos ? std::string::npos
                                                  : comma - start);
            spec.values.push_back(detail::parse_double_strict(tok));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        for (std::size_t i = 0; i + 1 < spec.values.size(); ++i)
            if (spec.values[i] < spec.values[i + 1])
                throw BadSpectrumSpec("spectrum: values must be descending");
        if (spec.values.back() < 0.0)
            throw BadSpectrumSpec("spectrum: values must be nonnegative");
        return spec;
    }

    Vector resolve(std::size_t d) const {
        if (d < 1) throw BadSpectrumSpec("spectrum: dimension must be positive");
        if (kind == Kind::explicit_list) {
            if (values.size() != d)
                throw BadSpectrumSpec("spectrum: expected " + std::to_string(d) +
                                      " values, got " +
                                      std::to_string(values.size()));
            return values;
        }
        Vector v(d);
        for (std::size_t i = 0; i < d; ++i)
            v[i] = 1.0 + gap * static_cast<double>(d - 1 - i);
        return v;
    }
};

/// Random orthogonal matrix: modified Gram-Schmidt (two passes per column)
/// on uniform [-1, 1] draws, redrawing near-dependent columns.
inline Matrix make_orthogonal(std::size_t d, RngStream& rng) {
    Matrix q(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        Vector v;
        double n = 0.0;
        do {
            v = rng.vector(d);
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t l = 0; l < j; ++l) {
                    const Vector ql = q.col(l);
                    const double c = dot(ql, v);
                    for (std::size_t r = 0; r < d; ++r) v[r] -= c * ql[r];
                }
            }
            n = norm2(v);
        } while (n < 1e-6);
        for (double& t : v) t /= n;
        q.set_col(j, v);
    }
    return q;
}

/// Symmetric positive definite matrix with the prescribed condition number:
/// eigenvalues geometric from cond down to 1, random orientation.
inline Matrix make_spd_with_cond(std::size_t d, double cond, RngStream& rng) {
    if (cond < 1.0) throw Error("make_spd_with_cond: need cond >= 1");
    Vector lam(d, 1.0);
    for (std::size_t i = 0; i < d; ++i)
        lam[i] = d == 1 ? 1.0
                        : std::pow(cond, static_cast<double>(d - 1 - i) /
                                             static_cast<double>(d - 1));
    const Matrix p = make_orthogonal(d, rng);
    return symmetrize(p * Matrix::diagonal(lam) * p.transpose());
}

struct Instance {
    Matrix a;
    Matrix b;
};

/// Instance with A = Q diag(spectrum) Q^T and B = P diag(geometric) P^T for
/// seeded random orthogonal Q then P. The generalized spectrum of (A, B) is
/// not the written spectrum unless B = I; solve the instance for the truth.
inline Instance make_instance(std::size_t d, const SpectrumSpec& spec,
                              double b_cond, std::uint64_t seed) {
    const Vector lam = spec.resolve(d);
    RngStream rng(seed);
    const Matrix q = make_orthogonal(d, rng);
    Matrix a = symmetrize(q * Matrix::diagonal(lam) * q.transpose());
    Matrix b = make_spd_with_cond(d, b_cond, rng);
    return {std::move(a), std::move(b)};
}

/// Instance whose generalized spectrum is exactly the resolved list:
/// A = B^{1/2} U diag(spectrum) U^T B^{1/2} for random orthogonal U, so the
/// pencil (A, B) has the prescribed eigenvalues and A is PSD when they are
/// nonnegative.
inline Instance make_gep_instance(std::size_t d, const SpectrumSpec& spec,
                                  double b_cond, std::uint64_t seed) {
    const Vector lam = spec.resolve(d);
    RngStream rng(seed);
    const Matrix b = make_spd_with_cond(d, b_cond, rng);
    const Matrix u = make_orthogonal(d, rng);
    const Matrix half = mat_pow_half(b, +1);
    Matrix a =
        symmetrize(half * (u * Matrix::diagonal(lam) * u.transpose()) * half);
    return {std::move(a), b};
}

inline Matrix random_symmetric(std::size_t d, RngStream& rng,
                               double scale = 1.0) {
    return symmetrize(rng.matrix(d, d, scale));
}

/// PSD with rank min(d, rank): X X^T for a d x rank uniform draw.
inline Matrix random_psd(std::size_t d, RngStream& rng, double scale = 1.0,
                         std::size_t rank = 0) {
    const std::size_t r = rank == 0 ? d : rank;
    const Matrix x = rng.matrix(d, r, scale);
    return symmetrize(x * x.transpose());
}

/// Positive definite with smallest eigenvalue at least ridge.
inline Matrix random_spd(std::size_t d, RngStream& rng, double scale = 1.0,
                         double ridge = 0.5) {
    Matrix b = random_psd(d, rng, scale);
    for (std::size_t i = 0; i < d; ++i) b(i, i) += ridge;
    return b;
}

}  // namespace gepkit
