#pragma once

#include "ksim/errors.hpp"
#include "ksim/types.hpp"

#include <functional>

namespace ksim {

/// Adaptive Simpson quadrature for complex integrands on [a, b].
///
/// Subdivides until the local Richardson error estimate |S2 - S1|/15 meets
/// rel_tol (relative to the running magnitude, floored by abs_floor). Throws
/// NumericalError carrying the residual estimate if max_depth is exhausted.
Complex adaptive_simpson(const std::function<Complex(Scalar)>& f, Scalar a, Scalar b,
                         Scalar rel_tol = 1e-8, Scalar abs_floor = 1e-14, int max_depth = 48);

/// Real-valued convenience wrapper.
Scalar adaptive_simpson_real(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                             Scalar rel_tol = 1e-8, Scalar abs_floor = 1e-14, int max_depth = 48);

} // namespace ksim
