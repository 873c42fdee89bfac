#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "gepkit/gep.hpp"
#include "gepkit/matrix.hpp"
#include "gepkit/objective.hpp"
#include "gepkit/rng.hpp"

namespace gepkit {

enum class StepSchedule { constant, inverse_sqrt };

/// Plain gradient ascent knobs. Unset optionals resolve to the documented
/// defaults: step = auto_step(obj), grad_tol = 1e-8 (1 + ||A||_max),
/// max_iters = 50 d k.
struct AscentConfig {
    std::optional<double> step_size;
    std::optional<std::size_t> max_iters;
    std::optional<double> grad_tol;
    std::uint64_t seed = 0;
    StepSchedule schedule = StepSchedule::constant;
};

struct AscentResult {
    Matrix w;
    std::vector<double> history;  // h at every visited iterate
    std::size_t iterations = 0;   // number of gradient steps taken
    bool converged = false;
    double final_grad_norm = 0.0;  // max-abs gradient entry at the returned W
};

/// Conservative step size 0.1 / (||A||_F (1 + ||B||_F)); falls back to 0.1
/// when A is zero.
inline double auto_step(const Objective& obj) {
    const double fa = obj.problem.a().frobenius_norm();
    const double fb = obj.problem.b().frobenius_norm();
    return fa == 0.0 ? 0.1 : 0.1 / (fa * (1.0 + fb));
}

/// Seeded uniform [-1, 1] start, rescaled so ||W^T B W||_op <= 1.
inline Matrix init_random(std::size_t d, std::size_t k, const Matrix& b,
                          std::uint64_t seed) {
    if (k < 1 || k > d) throw BadK("init_random: need 1 <= k <= d");
    RngStream rng(seed);
    Matrix w = rng.matrix(d, k);
    const Matrix s = symmetrize(w.transpose() * (b * w));
    const double op = sym_eig(s).eigenvalues.front();
    if (op > 1.0) w *= 1.0 / std::sqrt(op);
    return w;
}

/// Gradient ascent on h from the given start. Stops when the gradient
/// max-norm reaches grad_tol (converged = true, that iterate is returned) or
/// after max_iters steps (converged = false, the best-h iterate is returned;
/// not an error). Throws Diverged if h leaves the trust region
/// [-10 sum|lambda_i|, inf) or turns non-finite.
inline AscentResult ascend(const Objective& obj, const AscentConfig& cfg, Matrix w) {
    detail::require_iterate_shape(obj.problem.a(), w, obj.k);
    if (cfg.step_size && *cfg.step_size <= 0.0)
        throw Error("ascend: step_size must be positive");
    if (cfg.max_iters && *cfg.max_iters < 1)
        throw Error("ascend: max_iters must be at least 1");

    const double step = cfg.step_size.value_or(auto_step(obj));
    const double grad_tol =
        cfg.grad_tol.value_or(1e-8 * (1.0 + obj.problem.a().max_abs()));
    const std::size_t max_iters =
        cfg.max_iters.value_or(50 * obj.problem.dim() * obj.k);

    // h is bounded above by the top-k eigenvalue sum; dropping an order of
    // magnitude below -sum|lambda_i| means the step left the stable region.
    double abs_lambda_sum = 0.0;
    for (double lam : solve_dense(obj.problem).eigenvalues)
        abs_lambda_sum += std::abs(lam);
    const double floor = -10.0 * abs_lambda_sum;

    AscentResult res;
    res.history.reserve(max_iters + 1);
    Matrix best = w;
    double best_h = -std::numeric_limits<double>::infinity();
    bool hit_tol = false;

    for (std::size_t t = 0;; ++t) {
        const double h = h_value(obj, w);
        if (!std::isfinite(h) || h < floor)
            throw Diverged("ascend: objective left the stable region");
        res.history.push_back(h);
        if (h >= best_h) {
            best_h = h;
            best = w;
        }

        const Matrix g = h_gradient(obj, w);
        const double gn = g.max_abs();
        if (gn <= grad_tol) {
            hit_tol = true;
            best = w;  // the tolerance holds here, not necessarily at best-h
            res.iterations = t;
            res.final_grad_norm = gn;
            break;
        }
        if (t == max_iters) {
            res.iterations = t;
            break;
        }

        const double eta = cfg.schedule == StepSchedule::constant
                               ? step
                               : step / std::sqrt(static_cast<double>(t) + 1.0);
        w += eta * g;
    }

    res.w = std::move(best);
    if (!hit_tol) res.final_grad_norm = h_gradient(obj, res.w).max_abs();
    res.converged = hit_tol;
    return res;
}

inline AscentResult ascend(const Objective& obj, const AscentConfig& cfg) {
    return ascend(obj, cfg,
                  init_random(obj.problem.dim(), obj.k, obj.problem.b(), cfg.seed));
}

}  // namespace gepkit
