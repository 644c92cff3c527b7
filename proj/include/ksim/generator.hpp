#pragma once

#include "ksim/symbol.hpp"
#include "ksim/test_function.hpp"
#include "ksim/types.hpp"

#include <vector>

namespace ksim {

/// A u(x) in the integro-differential form: -a u + ell.grad u
/// + tr(Q Hess u)/2 + integral of u(x+y) - u(x) - grad u.y chi(y) against
/// N(x,.). Derivatives come from the test function's analytic gradient and
/// Hessian; density jump terms use adaptive quadrature at 1e-8.
Scalar apply_generator(const Characteristics& c, const TestFunction& u, const Vec& x);

/// Frequency/space quadrature sizes for the pseudo-differential route.
/// One-dimensional (every duality check in the suite is d = 1).
struct FreqGrid {
    Scalar xi_max = 30.0; ///< integrate xi over [-xi_max, xi_max]
    int n_xi = 4096;      ///< trapezoid panels in xi
    int n_y = 8192;       ///< trapezoid panels in y for the transform

    /// Resolution matched to the function's scale: xi_max covers the hat's
    /// Gaussian tail at the support scale, n fixed at the defaults.
    static FreqGrid for_function(const TestFunction& u);
};

/// u hat on given frequencies: (2 pi)^{-d} integral of e^{-i y xi} u(y) dy,
/// trapezoid over the compact support with n_y panels (the asymmetric
/// convention: (2 pi)^{-d} forward, no factor on inversion).
std::vector<Complex> fourier_transform(const TestFunction& u, const std::vector<Scalar>& xi_nodes,
                                       int n_y = 8192);

/// u hat precomputed once per (u, grid); the symbol factor is per-x.
struct FourierContext {
    FreqGrid grid;
    std::vector<Scalar> xi_nodes;
    std::vector<Complex> u_hat;
};

FourierContext make_fourier_context(const TestFunction& u, const FreqGrid& grid);

struct FourierApply {
    Scalar value;
    Scalar imag_residue;
};

/// A u(x) = - integral of e^{i x xi} p(x, xi) u_hat(xi) d xi over the grid.
FourierApply apply_generator_fourier_ctx(const Characteristics& c, const Vec& x,
                                         const FourierContext& ctx);

/// One-shot variant; throws NumericalError when the imaginary residue
/// exceeds 1e-6 (real test functions must produce real values).
Scalar apply_generator_fourier(const Characteristics& c, const TestFunction& u, const Vec& x,
                               const FreqGrid& grid);

} // namespace ksim
