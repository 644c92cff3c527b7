#include "ksim/quadrature.hpp"

#include "ksim/format.hpp"

#include <cmath>

namespace ksim {
namespace {

struct Panel {
    Scalar a, b;
    Complex fa, fm, fb;
    Complex simpson;
};

Complex simpson_of(Scalar a, Scalar b, Complex fa, Complex fm, Complex fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Complex recurse(const std::function<Complex(Scalar)>& f, const Panel& p, Scalar tol, int depth,
                int max_depth, Scalar& residual) {
    const Scalar m = 0.5 * (p.a + p.b);
    const Scalar lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const Complex flm = f(lm), frm = f(rm);
    const Panel left{p.a, m, p.fa, flm, p.fm, simpson_of(p.a, m, p.fa, flm, p.fm)};
    const Panel right{m, p.b, p.fm, frm, p.fb, simpson_of(m, p.b, p.fm, frm, p.fb)};
    const Complex s2 = left.simpson + right.simpson;
    const Complex err = (s2 - p.simpson) / 15.0;
    if (std::abs(err) <= tol) return s2 + err;
    if (depth >= max_depth) {
        residual += std::abs(err);
        return s2 + err;
    }
    return recurse(f, left, 0.5 * tol, depth + 1, max_depth, residual) +
           recurse(f, right, 0.5 * tol, depth + 1, max_depth, residual);
}

} // namespace

Complex adaptive_simpson(const std::function<Complex(Scalar)>& f, Scalar a, Scalar b,
                         Scalar rel_tol, Scalar abs_floor, int max_depth) {
    if (a == b) return Complex(0, 0);
    const Scalar m = 0.5 * (a + b);
    const Complex fa = f(a), fm = f(m), fb = f(b);
    const Panel whole{a, b, fa, fm, fb, simpson_of(a, b, fa, fm, fb)};
    // scale tolerance off a crude first-pass magnitude
    const Scalar scale = std::max(std::abs(whole.simpson), abs_floor);
    const Scalar tol = std::max(rel_tol * scale, abs_floor);
    Scalar residual = 0.0;
    const Complex v = recurse(f, whole, tol, 0, max_depth, residual);
    if (residual > std::max(rel_tol * std::abs(v), abs_floor))
        throw NumericalError("quadrature did not converge; residual estimate " +
                             format_g17(residual));
    return v;
}

Scalar adaptive_simpson_real(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                             Scalar rel_tol, Scalar abs_floor, int max_depth) {
    return adaptive_simpson([&f](Scalar y) { return Complex(f(y), 0.0); }, a, b, rel_tol,
                            abs_floor, max_depth)
        .real();
}

} // namespace ksim
