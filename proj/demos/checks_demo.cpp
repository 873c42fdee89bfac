// Runs a handful of the spectral inequality checks on small matrices and
// prints each verdict, including the certificates attached on equality.
#include <cstdio>

#include "gepkit/gepkit.hpp"

using namespace gepkit;

namespace {

void print_report(const CheckReport& r, int depth = 0) {
    std::printf("%*s%-28s %-5s %-9s lhs=%-12.6g rhs=%-12.6g%s%s\n", 2 * depth,
                "", r.name.c_str(), r.holds ? "holds" : "FAILS",
                to_string(r.equality_case), r.lhs, r.rhs,
                r.note.empty() ? "" : "  ", r.note.c_str());
    for (const CheckReport& d : r.details) print_report(d, depth + 1);
}

}  // namespace

int main() {
    RngStream rng(5);

    // Interlacing of a compressed spectrum; the top frame is tight.
    const Matrix q = make_orthogonal(4, rng);
    const Matrix a =
        symmetrize(q * Matrix::diagonal({4.0, 3.0, 1.5, 0.5}) * q.transpose());
    Matrix s(4, 2);
    s.set_col(0, q.col(0));
    s.set_col(1, q.col(1));
    for (const CheckReport& r : haemers_interlace(a, s)) print_report(r);

    // Trace inner product bound, tight by construction.
    const Matrix u = make_orthogonal(3, rng);
    const Matrix v = make_orthogonal(3, rng);
    const Matrix x = u * Matrix::diagonal({3.0, 1.0, 0.5}) * v.transpose();
    const Matrix y = u * Matrix::diagonal({2.0, 1.0, 0.25}) * v.transpose();
    print_report(von_neumann(x, y));

    // Perspective functional at its unique maximizer and beyond its radius.
    const Matrix lambda = Matrix::diagonal({3.0, 1.0});
    print_report(perspective_report(lambda, Matrix::identity(2)));
    print_report(perspective_report(lambda, 3.0 * Matrix::identity(2)));

    // Spectrum formula for the penalty argument M = W W^T (2I - W W^T).
    print_report(m_spectrum_report(rng.matrix(5, 2)));
    return 0;
}
