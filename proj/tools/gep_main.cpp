// Command-line front end: generate instances, solve them by gradient ascent
// against the dense oracle, and run the inequality check suites.
//
// Exit codes: 0 success (solve converged / all checks hold), 1 input or
// check failure, 2 solver ran out of iterations.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gepkit/gepkit.hpp"

namespace {

using namespace gepkit;

// ---------------------------------------------------------------------------
// JSON emission

void write_check_report(JsonWriter& w, const CheckReport& r) {
    w.begin_object();
    w.key("name").value(r.name);
    w.key("holds").value(r.holds);
    w.key("lhs").value(r.lhs);
    w.key("rhs").value(r.rhs);
    w.key("residual").value(r.residual);
    w.key("tol").value(r.tol);
    w.key("eq_tol").value(r.eq_tol);
    w.key("equality_case").value(to_string(r.equality_case));
    if (!r.note.empty()) w.key("note").value(r.note);
    if (!r.witnesses.empty()) {
        w.key("witnesses").begin_array();
        for (const auto& [name, mat] : r.witnesses) {
            w.begin_object();
            w.key("name").value(name);
            w.key("rows").value(static_cast<std::uint64_t>(mat.rows()));
            w.key("cols").value(static_cast<std::uint64_t>(mat.cols()));
            w.key("data").begin_array();
            for (std::size_t i = 0; i < mat.rows(); ++i)
                for (std::size_t j = 0; j < mat.cols(); ++j) w.value(mat(i, j));
            w.end_array();
            w.end_object();
        }
        w.end_array();
    }
    if (!r.details.empty()) {
        w.key("details").begin_array();
        for (const CheckReport& d : r.details) write_check_report(w, d);
        w.end_array();
    }
    w.end_object();
}

void write_vector(JsonWriter& w, const Vector& v) {
    w.begin_array();
    for (double x : v) w.value(x);
    w.end_array();
}

// Streams to --out when given, stdout otherwise.
class ReportSink {
public:
    explicit ReportSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error(path + ": cannot open file for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string a_path;
    std::string b_path;
    std::size_t k = 1;
    std::uint64_t seed = 0;
    std::string step = "auto";
    std::size_t max_iters = 0;  // 0 = default
    double grad_tol = 0.0;      // 0 = default
    std::string out;
};

int run_solve(const SolveArgs& args) {
    const Matrix a = read_matrix(args.a_path);
    const Matrix b = read_matrix(args.b_path);
    GepProblem problem(a, b);
    const GepSolution sol = solve_dense(problem);
    const TopK tk = top_k(sol, args.k);
    const Objective obj{problem, args.k};

    AscentConfig cfg;
    cfg.seed = args.seed;
    if (args.step != "auto") {
        double s = 0.0;
        if (!detail::try_parse_double(args.step, s) || s <= 0.0)
            throw ParseError("--step must be 'auto' or a positive number");
        cfg.step_size = s;
    }
    if (args.max_iters > 0) cfg.max_iters = args.max_iters;
    if (args.grad_tol > 0.0) cfg.grad_tol = args.grad_tol;

    const auto t0 = std::chrono::steady_clock::now();
    const AscentResult res = ascend(obj, cfg);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t0)
            .count();

    double top_sum = 0.0;
    for (std::size_t i = 0; i < args.k; ++i) top_sum += sol.eigenvalues[i];
    const double terminal_h = h_value(obj, res.w);

    Vector angles;
    std::string angle_note;
    try {
        angles = principal_angles(res.w, tk.basis);
    } catch (const Error& e) {
        angle_note = e.what();
    }

    std::vector<CheckReport> checks;
    std::string check_note;
    try {
        const Matrix wb = b_orthonormalize(obj, res.w);
        checks.push_back(constrained_bound(problem, wb, args.k));
    } catch (const Error& e) {
        check_note = e.what();
    }

    const int exit_code = res.converged ? 0 : 2;

    ReportSink sink(args.out);
    JsonWriter w(sink.stream());
    w.begin_object();
    w.key("command").value("solve");
    w.key("a_file").value(args.a_path);
    w.key("b_file").value(args.b_path);
    w.key("d").value(static_cast<std::uint64_t>(problem.dim()));
    w.key("k").value(static_cast<std::uint64_t>(args.k));
    w.key("seed").value(args.seed);
    w.key("config").begin_object();
    w.key("step").value(cfg.step_size.value_or(auto_step(obj)));
    w.key("max_iters")
        .value(static_cast<std::uint64_t>(
            cfg.max_iters.value_or(50 * problem.dim() * args.k)));
    w.key("grad_tol").value(cfg.grad_tol.value_or(1e-8 * (1.0 + a.max_abs())));
    w.key("schedule").value("constant");
    w.end_object();
    w.key("oracle").begin_object();
    w.key("eigenvalues");
    write_vector(w, sol.eigenvalues);
    w.key("top_k_sum").value(top_sum);
    w.key("gap").value(tk.gap);
    w.key("unique").value(tk.unique);
    w.end_object();
    w.key("optimizer").begin_object();
    w.key("converged").value(res.converged);
    w.key("iterations").value(static_cast<std::uint64_t>(res.iterations));
    w.key("terminal_h").value(terminal_h);
    w.key("gap_to_oracle").value(top_sum - terminal_h);
    w.key("final_grad_norm").value(res.final_grad_norm);
    w.key("principal_angles");
    write_vector(w, angles);
    if (!angle_note.empty()) w.key("principal_angles_note").value(angle_note);
    w.key("wall_time_ms").value(wall_ms);
    w.end_object();
    w.key("checks").begin_array();
    for (const CheckReport& r : checks) write_check_report(w, r);
    w.end_array();
    if (!check_note.empty()) w.key("check_note").value(check_note);
    w.key("exit_code").value(static_cast<std::int64_t>(exit_code));
    w.end_object();
    w.finish();
    return exit_code;
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
    std::string suite = "all";
    std::string a_path;
    std::string b_path;
    std::size_t k = 1;
    std::uint64_t seed = 0;
    std::size_t random_trials = 0;
    std::string out;
};

// Random linear combination of the first m columns; never returns zero.
Vector span_sample(const Matrix& basis, std::size_t first, std::size_t count,
                   RngStream& rng) {
    Vector c = rng.vector(count);
    if (norm2(c) < 1e-9) c[0] = 1.0;
    Vector u(basis.rows(), 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        const Vector col = basis.col(first + j);
        for (std::size_t r = 0; r < u.size(); ++r) u[r] += c[j] * col[r];
    }
    return u;
}

void run_rayleigh_trial(const Matrix& a, std::size_t i, RngStream& rng,
                        std::vector<CheckReport>& out) {
    const SymEig eig = sym_eig(a);
    const std::size_t d = a.rows();
    auto [lo, lo_vec] = rayleigh_bounds(
        eig, span_sample(eig.eigenvectors, 0, i, rng), i,
        RayleighHypothesis::in_leading_span);
    out.push_back(std::move(lo));
    out.push_back(std::move(lo_vec));
    auto [hi, hi_vec] = rayleigh_bounds(
        eig, span_sample(eig.eigenvectors, i - 1, d - i + 1, rng), i,
        RayleighHypothesis::perp_leading_span);
    out.push_back(std::move(hi));
    out.push_back(std::move(hi_vec));
}

std::vector<CheckReport> run_suite(const std::string& suite,
                                   const CheckArgs& args) {
    std::vector<CheckReport> reports;
    const std::size_t trials = args.random_trials;

    const auto trial_rng = [&](std::size_t t) {
        return RngStream(args.seed + t);
    };

    if (suite == "rayleigh") {
        if (trials == 0) {
            RngStream rng(args.seed);
            const Matrix a = read_matrix(args.a_path);
            run_rayleigh_trial(a, args.k, rng, reports);
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t d = rng.uniform_index(2, 8);
                const Matrix a = random_symmetric(d, rng);
                const std::size_t i = rng.uniform_index(1, d);
                run_rayleigh_trial(a, i, rng, reports);
            }
        }
    } else if (suite == "haemers") {
        if (trials == 0) {
            RngStream rng(args.seed);
            const Matrix a = read_matrix(args.a_path);
            const Matrix q = make_orthogonal(a.rows(), rng);
            Matrix s(a.rows(), args.k);
            for (std::size_t j = 0; j < args.k; ++j) s.set_col(j, q.col(j));
            auto batch = haemers_interlace(a, s);
            reports.insert(reports.end(), batch.begin(), batch.end());
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t d = rng.uniform_index(3, 9);
                const Matrix a = random_symmetric(d, rng);
                const std::size_t k = rng.uniform_index(1, d);
                const Matrix q = make_orthogonal(d, rng);
                Matrix s(d, k);
                for (std::size_t j = 0; j < k; ++j) s.set_col(j, q.col(j));
                auto batch = haemers_interlace(a, s);
                reports.insert(reports.end(), batch.begin(), batch.end());
            }
        }
    } else if (suite == "constrained") {
        if (trials == 0) {
            const Matrix a = read_matrix(args.a_path);
            const Matrix b = read_matrix(args.b_path);
            GepProblem p(a, b);
            RngStream rng(args.seed);
            const Objective obj{p, args.k};
            const Matrix w =
                b_orthonormalize(obj, rng.matrix(p.dim(), args.k));
            reports.push_back(constrained_bound(p, w, args.k));
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t d = rng.uniform_index(2, 8);
                const Matrix a = random_symmetric(d, rng);
                const Matrix b = random_spd(d, rng);
                GepProblem p(a, b);
                const std::size_t k = rng.uniform_index(1, d);
                const Objective obj{p, k};
                const Matrix w = b_orthonormalize(obj, rng.matrix(d, k));
                reports.push_back(constrained_bound(p, w, k));
            }
        }
    } else if (suite == "vonneumann") {
        if (trials == 0) {
            reports.push_back(
                von_neumann(read_matrix(args.a_path), read_matrix(args.b_path)));
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t rows = rng.uniform_index(2, 6);
                const std::size_t cols = rng.uniform_index(2, 6);
                reports.push_back(
                    von_neumann(rng.matrix(rows, cols), rng.matrix(rows, cols)));
            }
        }
    } else if (suite == "psd-vn") {
        if (trials == 0) {
            reports.push_back(psd_von_neumann(read_matrix(args.a_path),
                                              read_matrix(args.b_path)));
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t d = rng.uniform_index(2, 7);
                const Matrix a = random_psd(d, rng);
                const Matrix m = random_symmetric(d, rng);
                reports.push_back(psd_von_neumann(a, m));
            }
        }
    } else if (suite == "svd-eig") {
        if (trials == 0) {
            reports.push_back(psd_svd_is_eig(read_matrix(args.a_path)));
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                reports.push_back(
                    psd_svd_is_eig(random_psd(rng.uniform_index(2, 7), rng)));
            }
        }
    } else if (suite == "perspective") {
        if (trials == 0) {
            reports.push_back(perspective_report(read_matrix(args.a_path),
                                                 read_matrix(args.b_path)));
        } else {
            for (std::size_t t = 0; t < trials; ++t) {
                RngStream rng = trial_rng(t);
                const std::size_t p = rng.uniform_index(2, 6);
                Vector lam(p);
                for (double& x : lam) x = rng.uniform(0.1, 3.0);
                std::sort(lam.begin(), lam.end(), std::greater<double>());
                Matrix m = random_psd(p, rng, 0.7);
                if (t % 2 == 1) {
                    // Half the trials push ||M||_op past the sign-change
                    // radius to exercise the nonpositivity certificate.
                    const double op = sym_eig(m).eigenvalues.front();
                    const double radius =
                        perspective_radius(Matrix::diagonal(lam));
                    if (op > 0.0) m *= 1.01 * radius / op;
                }
                reports.push_back(perspective_report(Matrix::diagonal(lam), m));
            }
        }
    } else {
        throw Error("unknown suite '" + suite + "'");
    }
    return reports;
}

const std::vector<std::string> kAllSuites = {
    "rayleigh", "haemers", "constrained", "vonneumann",
    "psd-vn",   "svd-eig", "perspective"};

int run_check(const CheckArgs& args) {
    if (args.random_trials == 0 && args.a_path.empty())
        throw Error("check: need --a FILE or --random N");
    if (args.suite == "all" && args.random_trials == 0)
        throw Error("check: --suite all requires --random N");

    std::vector<std::pair<std::string, std::vector<CheckReport>>> batches;
    if (args.suite == "all") {
        for (const std::string& s : kAllSuites)
            batches.emplace_back(s, run_suite(s, args));
    } else {
        batches.emplace_back(args.suite, run_suite(args.suite, args));
    }

    std::size_t total = 0, failed = 0, equalities = 0;
    for (const auto& [name, batch] : batches)
        for (const CheckReport& r : batch) {
            ++total;
            if (!r.all_hold()) ++failed;
            if (r.equality_case == EqualityCase::equality) ++equalities;
        }
    const bool all_hold = failed == 0;

    // Large sweeps would produce unwieldy reports; keep the full list only
    // for small runs and always list every failure.
    const bool truncate = total > 200;

    ReportSink sink(args.out);
    JsonWriter w(sink.stream());
    w.begin_object();
    w.key("command").value("check");
    w.key("suite").value(args.suite);
    w.key("seed").value(args.seed);
    w.key("trials").value(static_cast<std::uint64_t>(args.random_trials));
    if (!args.a_path.empty()) w.key("a_file").value(args.a_path);
    if (!args.b_path.empty()) w.key("b_file").value(args.b_path);
    w.key("checks_total").value(static_cast<std::uint64_t>(total));
    w.key("checks_failed").value(static_cast<std::uint64_t>(failed));
    w.key("equality_cases").value(static_cast<std::uint64_t>(equalities));
    w.key("reports_truncated").value(truncate);
    w.key("suites").begin_array();
    for (const auto& [name, batch] : batches) {
        w.begin_object();
        w.key("suite").value(name);
        w.key("checks").value(static_cast<std::uint64_t>(batch.size()));
        std::size_t batch_failed = 0;
        for (const CheckReport& r : batch)
            if (!r.all_hold()) ++batch_failed;
        w.key("failed").value(static_cast<std::uint64_t>(batch_failed));
        w.key("reports").begin_array();
        for (const CheckReport& r : batch)
            if (!truncate || !r.all_hold()) write_check_report(w, r);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("all_hold").value(all_hold);
    w.key("exit_code").value(static_cast<std::int64_t>(all_hold ? 0 : 1));
    w.end_object();
    w.finish();
    return all_hold ? 0 : 1;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::size_t d = 0;
    std::size_t k = 1;
    std::string spectrum;
    double b_cond = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen(const GenArgs& args) {
    const SpectrumSpec spec = SpectrumSpec::parse(args.spectrum);
    const Instance inst = make_instance(args.d, spec, args.b_cond, args.seed);

    const std::string a_path = args.out + "_a.txt";
    const std::string b_path = args.out + "_b.txt";
    const std::string stamp = "d=" + std::to_string(args.d) + " spectrum=" +
                              args.spectrum + " b_cond=" + fmt17(args.b_cond) +
                              " seed=" + std::to_string(args.seed);
    write_matrix(a_path, inst.a, "A " + stamp);
    write_matrix(b_path, inst.b, "B " + stamp);

    // The written eigenvalue list is A's own spectrum; the pencil (A, B)
    // has a different one, so report the oracle's answer alongside.
    GepProblem problem(inst.a, inst.b);
    const GepSolution sol = solve_dense(problem);
    const TopK tk = top_k(sol, args.k);
    double top_sum = 0.0;
    for (std::size_t i = 0; i < args.k; ++i) top_sum += sol.eigenvalues[i];

    JsonWriter w(std::cout);
    w.begin_object();
    w.key("command").value("gen");
    w.key("d").value(static_cast<std::uint64_t>(args.d));
    w.key("k").value(static_cast<std::uint64_t>(args.k));
    w.key("seed").value(args.seed);
    w.key("spectrum").value(args.spectrum);
    w.key("b_cond").value(args.b_cond);
    w.key("a_file").value(a_path);
    w.key("b_file").value(b_path);
    w.key("oracle").begin_object();
    w.key("eigenvalues");
    write_vector(w, sol.eigenvalues);
    w.key("top_k_sum").value(top_sum);
    w.key("gap").value(tk.gap);
    w.key("unique").value(tk.unique);
    w.end_object();
    w.key("exit_code").value(static_cast<std::int64_t>(0));
    w.end_object();
    w.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized eigenvalue toolkit: solve by gradient ascent, "
                 "verify spectral inequalities, generate instances"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand(
        "solve", "Solve a GEP instance by unconstrained gradient ascent");
    solve->add_option("--a", solve_args.a_path, "Matrix A file")->required();
    solve->add_option("--b", solve_args.b_path, "Matrix B file")->required();
    solve->add_option("--k", solve_args.k, "Subspace dimension")->required();
    solve->add_option("--seed", solve_args.seed, "Random seed");
    solve->add_option("--step", solve_args.step,
                      "Step size, or 'auto' (default)");
    solve->add_option("--max-iters", solve_args.max_iters,
                      "Iteration cap (default 50*d*k)");
    solve->add_option("--grad-tol", solve_args.grad_tol,
                      "Gradient max-norm tolerance");
    solve->add_option("--out", solve_args.out, "Report file (default stdout)");

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand(
        "check", "Run inequality check suites on files or random instances");
    check
        ->add_option("--suite", check_args.suite,
                     "rayleigh|haemers|constrained|vonneumann|psd-vn|svd-eig|"
                     "perspective|all")
        ->required();
    check->add_option("--a", check_args.a_path, "First matrix file");
    check->add_option("--b", check_args.b_path, "Second matrix file");
    check->add_option("--k", check_args.k,
                      "Subspace dimension / index for file mode");
    check->add_option("--seed", check_args.seed, "Random seed");
    check->add_option("--random", check_args.random_trials,
                      "Number of random trials");
    check->add_option("--out", check_args.out, "Report file (default stdout)");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate a seeded instance");
    gen->add_option("--d", gen_args.d, "Dimension")->required();
    gen->add_option("--k", gen_args.k, "Subspace dimension for the report");
    gen->add_option("--spectrum", gen_args.spectrum,
                    "Eigenvalues of A: '3,2,1' or 'gap:0.5'")
        ->required();
    gen->add_option("--b-cond", gen_args.b_cond, "Condition number of B");
    gen->add_option("--seed", gen_args.seed, "Random seed");
    gen->add_option("--out", gen_args.out, "Output file prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (check->parsed()) return run_check(check_args);
        return run_gen(gen_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
