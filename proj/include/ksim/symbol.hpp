#pragma once

#include "ksim/cutoff.hpp"
#include "ksim/errors.hpp"
#include "ksim/levy_measure.hpp"
#include "ksim/types.hpp"

#include <functional>
#include <string>

namespace ksim {

/// Constant quadruple (a, ell, Q, N) with its cut-off: the data of a Lévy
/// exponent with killing.
struct LevyQuadruple {
    Scalar a = 0.0;
    Vec ell;
    Mat Q;
    LevyMeasure N;
    CutoffFunction chi{1.0};

    Eigen::Index dim() const { return ell.size(); }
    void validate(Scalar psd_tol = 1e-10) const;
};

/// State-dependent quadruple x -> (a(x), ell(x), Q(x), N(x,.)) sharing one
/// cut-off. Coefficient callables must be pure; they are shared read-only
/// across workers.
struct Characteristics {
    std::string id;
    Eigen::Index dim = 1;
    std::function<Scalar(const Vec&)> a;
    std::function<Vec(const Vec&)> ell;
    std::function<Mat(const Vec&)> Q;
    std::function<LevyMeasure(const Vec&)> N; // may be null: no jumps
    CutoffFunction chi{1.0};

    /// Freeze at x. Throws NumericalError naming the coefficient if one
    /// fails to evaluate.
    LevyQuadruple freeze(const Vec& x) const;

    /// Constant characteristics from a quadruple.
    static Characteristics constant(std::string id, LevyQuadruple q);
};

/// Integral of e^{i y.xi} - 1 - i y.xi chi(y) against N: exact sum for
/// atoms, adaptive quadrature (rel tol 1e-8) for densities.
Complex jump_integral(const LevyMeasure& N, const Vec& xi, const CutoffFunction& chi);

/// Integral of y chi(y) against N: the correction that turns ell into the
/// effective Euler drift. Exact sum for atoms, quadrature for densities.
Vec chi_compensation(const LevyMeasure& N, const CutoffFunction& chi);

/// phi(xi) = a - i ell.xi + xi'Q xi / 2 - jump_integral(N, xi, chi).
Complex levy_exponent(const LevyQuadruple& q, const Vec& xi);

/// p(x, xi): the quadruple frozen at x, fed to levy_exponent.
Complex symbol_eval(const Characteristics& c, const Vec& x, const Vec& xi);

/// True iff Q is symmetric with min eigenvalue >= -tol.
bool psd_check(const Mat& Q, Scalar tol);

} // namespace ksim
