#pragma once

#include "ksim/model.hpp"
#include "ksim/sample_path.hpp"
#include "ksim/simulate.hpp"
#include "ksim/test_function.hpp"
#include "ksim/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ksim {

struct SymbolEstimate {
    Complex value;               ///< extrapolated (or the single-t mean)
    Scalar std_error = 0.0;      ///< SE of the per-path extrapolated statistic
    std::vector<Scalar> t_used;  ///< the ladder, strictly decreasing
    bool extrapolated = false;
    Complex value_raw;           ///< raw mean at the smallest t
    Scalar std_error_raw = 0.0;
    std::vector<Complex> ladder_means; ///< per-t means, ladder order
    std::int64_t n_paths = 0;
    /// True when the exit time of the radius-ball undercut the smallest t on
    /// more than half the paths: the stopping dominates the limit.
    bool stopping_dominated = false;
};

struct ResidualReport {
    Scalar statistic = 0.0;
    Scalar std_error = 0.0;
    std::int64_t n_paths = 0;
    Scalar z = 3.0;
    Scalar budget = 0.0; ///< additive discretization allowance (C h)
    bool pass = false;   ///< |statistic| <= z std_error + budget
};

/// Monte Carlo probabilistic symbol: per t in the ladder, the mean of
/// -(e_xi(X_{t and sigma} - x) - 1)/t over paths stopped at the first exit
/// from B(x, radius), then Richardson-extrapolated to t = 0. Common random
/// numbers: the ensemble is a pure function of (model, x, cfg), so every
/// (xi, t) readout shares the same paths.
SymbolEstimate estimate_symbol(const ProcessModel& model, const Vec& x, const Vec& xi,
                               Scalar radius, const std::vector<Scalar>& t_seq,
                               const SimConfig& cfg);

/// P(X_t = Delta)/t per ladder t, extrapolated. Same engine and ensembles
/// as estimate_symbol; at xi = 0 and with no in-ball kill the two readouts
/// agree path by path.
SymbolEstimate estimate_killing_rate(const ProcessModel& model, const Vec& x,
                                     const std::vector<Scalar>& t_seq, const SimConfig& cfg);

/// Fourth characteristic along one path: trapezoid of a(X_s) over recorded
/// Active rows up to t and zeta_delta, left-endpoint stub on the partial
/// interval ending at a cemetery row or at t itself.
Scalar accumulate_fourth(const SamplePath& path, const std::function<Scalar(const Vec&)>& a,
                         Scalar t = kInf);

/// Zero-mean test of 1_{Delta at t} - A_{t and zeta_delta}: the compensator
/// property of the fourth characteristic at a fixed time. A comes from the
/// model's declared compensator when present, otherwise accumulate_fourth
/// with a_override (default: the model's own a). Degenerate ensembles
/// (SE = 0) pass iff the statistic is exactly within 1e-12.
ResidualReport compensator_residual(const ProcessModel& model, const Vec& x, Scalar t,
                                    const SimConfig& cfg,
                                    const std::function<Scalar(const Vec&)>& a_override = {});

/// Zero-mean test of u(X_t) - u(x) - integral of A u(X_s) ds with the
/// integro-differential generator; band widened by budget_C * cfg.step.
ResidualReport martingale_problem_residual(const ProcessModel& model, const TestFunction& u,
                                           const Vec& x, Scalar t, const SimConfig& cfg,
                                           Scalar budget_C = 2.0);

/// Intercept of the least-squares affine fit value(t) ~ alpha + beta t.
Complex richardson_extrapolate(const std::vector<Complex>& values,
                               const std::vector<Scalar>& ts);

/// The fit weights w with intercept = sum w_j value_j; exposed so per-path
/// extrapolated statistics (and hence honest SEs) use the same fit.
std::vector<Scalar> richardson_weights(const std::vector<Scalar>& ts);

/// F(t)/sqrt(t) for the deterministic sqrt process killed by the
/// piecewise-constant law F(t) = 2^{-j} on [4^{-j}, 4^{-(j-1)}), F = 1 for
/// t >= 1: the sequence whose subsequential limits 1 and 1/2 show the
/// symbol limit need not exist.
std::vector<Scalar> counterexample_probe(const std::vector<Scalar>& t_seq);

/// The killing CDF F above (exact dyadic arithmetic).
Scalar counterexample_kill_cdf(Scalar t);

} // namespace ksim
