#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gepkit/ascent.hpp"
#include "gepkit/generate.hpp"
#include "gepkit/rng.hpp"

using namespace gepkit;

namespace {

Objective easy_objective(std::size_t k) {
    // Fixed well-gapped PSD pencil used across the convergence tests.
    const Instance inst =
        make_gep_instance(6, SpectrumSpec::parse("5,4,2.5,1,0.5,0.1"), 6.0, 42);
    return Objective(GepProblem(inst.a, inst.b), k);
}

}  // namespace

TEST_CASE("auto_step scales with the problem and falls back on zero A") {
    const Objective obj = easy_objective(2);
    const double fa = obj.problem.a().frobenius_norm();
    const double fb = obj.problem.b().frobenius_norm();
    CHECK(auto_step(obj) == Catch::Approx(0.1 / (fa * (1.0 + fb))));

    const GepProblem zero(Matrix(3, 3), Matrix::identity(3));
    CHECK(auto_step(Objective(zero, 1)) == 0.1);
}

TEST_CASE("init_random is deterministic and spectrally bounded") {
    RngStream rng(3);
    const Matrix b = random_spd(7, rng);
    const Matrix w1 = init_random(7, 3, b, 99);
    const Matrix w2 = init_random(7, 3, b, 99);
    CHECK(max_abs_diff(w1, w2) == 0.0);
    CHECK(max_abs_diff(w1, init_random(7, 3, b, 100)) != 0.0);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix w = init_random(7, 3, b, seed);
        const double op =
            sym_eig(symmetrize(w.transpose() * (b * w))).eigenvalues.front();
        REQUIRE(op <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(init_random(3, 4, Matrix::identity(3), 0), BadK);
}

TEST_CASE("ascent converges to the top subspace on a gapped instance") {
    const Objective obj = easy_objective(2);
    const GepSolution sol = solve_dense(obj.problem);
    const TopK tk = top_k(sol, 2);
    const double target = sol.eigenvalues[0] + sol.eigenvalues[1];

    AscentConfig cfg;
    cfg.seed = 1;
    cfg.max_iters = 200000;
    const AscentResult res = ascend(obj, cfg);

    REQUIRE(res.converged);
    CHECK(std::abs(h_value(obj, res.w) - target) < 1e-6);
    CHECK(max_abs(principal_angles(res.w, tk.basis)) < 1e-5);
    CHECK(max_abs_diff(res.w.transpose() * (obj.problem.b() * res.w),
                       Matrix::identity(2)) < 1e-4);
    CHECK(res.history.size() == res.iterations + 1);
    CHECK(res.final_grad_norm <= 1e-8 * (1.0 + obj.problem.a().max_abs()));
}

TEST_CASE("history is monotone near the end and never beats the bound") {
    const Objective obj = easy_objective(3);
    const GepSolution sol = solve_dense(obj.problem);
    double bound = 0.0;
    for (std::size_t i = 0; i < 3; ++i) bound += sol.eigenvalues[i];

    AscentConfig cfg;
    cfg.seed = 5;
    cfg.max_iters = 200000;
    const AscentResult res = ascend(obj, cfg);
    REQUIRE(res.converged);

    double best = -1e300;
    for (double h : res.history) best = std::max(best, h);
    CHECK(best <= bound + 1e-8);

    const std::size_t n = res.history.size();
    const std::size_t tail = n > 50 ? n - 50 : 0;
    for (std::size_t i = tail; i + 1 < n; ++i)
        REQUIRE(res.history[i + 1] >= res.history[i] - 1e-10);
}

TEST_CASE("an explicit start gives a deterministic trajectory") {
    const Objective obj = easy_objective(2);
    const Matrix w0 = init_random(6, 2, obj.problem.b(), 8);

    AscentConfig cfg;
    cfg.max_iters = 500;
    const AscentResult r1 = ascend(obj, cfg, w0);
    const AscentResult r2 = ascend(obj, cfg, w0);
    CHECK(r1.history == r2.history);
    CHECK(max_abs_diff(r1.w, r2.w) == 0.0);
}

TEST_CASE("iteration cap returns the best iterate without converging") {
    const Objective obj = easy_objective(2);
    AscentConfig cfg;
    cfg.seed = 2;
    cfg.max_iters = 10;
    const AscentResult res = ascend(obj, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 10);
    CHECK(res.history.size() == 11);

    double best = -1e300;
    for (double h : res.history) best = std::max(best, h);
    CHECK(h_value(obj, res.w) == best);
}

TEST_CASE("oversized steps raise Diverged") {
    const Objective obj = easy_objective(2);
    AscentConfig cfg;
    cfg.seed = 3;
    cfg.step_size = 10.0;
    cfg.max_iters = 10000;
    CHECK_THROWS_AS(ascend(obj, cfg), Diverged);
}

TEST_CASE("inverse sqrt schedule still improves h") {
    const Objective obj = easy_objective(2);
    AscentConfig cfg;
    cfg.seed = 4;
    cfg.schedule = StepSchedule::inverse_sqrt;
    cfg.max_iters = 2000;
    const AscentResult res = ascend(obj, cfg);
    CHECK(res.history.back() > res.history.front());
    CHECK(h_value(obj, res.w) >= res.history.front());
}

TEST_CASE("config validation") {
    const Objective obj = easy_objective(2);
    AscentConfig bad_step;
    bad_step.step_size = 0.0;
    CHECK_THROWS_AS(ascend(obj, bad_step), Error);

    AscentConfig bad_iters;
    bad_iters.max_iters = 0;
    CHECK_THROWS_AS(ascend(obj, bad_iters), Error);

    AscentConfig ok;
    CHECK_THROWS_AS(ascend(obj, ok, Matrix(6, 3)), ShapeMismatch);
}

TEST_CASE("independent seeds agree on the recovered subspace") {
    // Gap 1.5 between lambda_2 and lambda_3; every seed must land on the
    // same plane.
    const Objective obj = easy_objective(2);
    const TopK tk = top_k(solve_dense(obj.problem), 2);

    std::vector<Matrix> frames;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        AscentConfig cfg;
        cfg.seed = seed;
        cfg.max_iters = 200000;
        const AscentResult res = ascend(obj, cfg);
        REQUIRE(res.converged);
        frames.push_back(res.w);
    }
    for (std::size_t i = 0; i < frames.size(); ++i)
        for (std::size_t j = i + 1; j < frames.size(); ++j)
            REQUIRE(max_abs(principal_angles(frames[i], frames[j])) < 1e-4);
}
