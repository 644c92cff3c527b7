#pragma once

#include "ksim/levy_measure.hpp"
#include "ksim/model.hpp"
#include "ksim/rng.hpp"
#include "ksim/sample_path.hpp"
#include "ksim/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ksim {

struct SimConfig {
    Scalar step = 1e-3;          ///< grid step h
    Scalar horizon = 1.0;        ///< simulate on [0, horizon]
    Scalar explosion_norm = 1e8; ///< |X| >= this  =>  state infinity
    std::uint64_t seed = 0;
    std::int64_t n_paths = 1;
    int workers = 1; ///< 0 = hardware concurrency

    /// Throws ConfigError on nonsense (step/horizon <= 0, n_paths < 1, ...).
    void validate() const;
};

/// One step of the exact Bernoulli kill clock: kill during a step of length
/// h iff u < 1 - exp(-a h). Chaining these with the offset below makes the
/// killing time exactly Exponential(a) for constant a.
bool kill_increment(Scalar a_val, Scalar h, Scalar u);

/// Conditional kill instant within the step, given kill_increment fired on
/// the same uniform: tau = -log(1-u)/a, which lands in (0, h].
Scalar kill_offset(Scalar a_val, Scalar u);

/// At most one jump per step: fires with probability 1 - exp(-lambda h)
/// where lambda is the total mass of N_at_x, then draws the jump from the
/// normalized measure. Empty optional = no jump. Consumes one uniform for
/// the occurrence test and, only if it fires, the draws for the selection.
std::optional<Vec> jump_increment(const LevyMeasure& N_at_x, Scalar h, PathRng& rng);

/// Simulate a single path (exact integrator if the model has one, Euler
/// otherwise). path_index keys the per-path RNG stream.
SamplePath simulate_path(const ProcessModel& model, const Vec& x0, const SimConfig& cfg,
                         std::uint64_t path_index);

/// Stream cfg.n_paths paths through fn, one call per path index, possibly
/// concurrently (static partition over cfg.workers threads). fn receives
/// (path_index, path); distinct indices may run on distinct threads, so fn
/// must only touch per-index state. Per-path failures are collected and
/// re-thrown after the sweep, lowest index first.
void for_each_path(const ProcessModel& model, const Vec& x0, const SimConfig& cfg,
                   const std::function<void(std::size_t, const SamplePath&)>& fn);

struct PathEnsemble {
    Vec x0;
    SimConfig cfg;
    std::vector<SamplePath> paths;
};

/// Materialize the whole ensemble (CLI simulate, small-n tests). Identical
/// content for any worker count.
PathEnsemble simulate_ensemble(const ProcessModel& model, const Vec& x0, const SimConfig& cfg);

/// Number of full grid steps covering [0, horizon]: horizon/step rounded to
/// the nearest integer when within 1e-9 of it, otherwise ceil (final step
/// shortened).
std::int64_t grid_steps(Scalar step, Scalar horizon);

int resolve_workers(int requested);

} // namespace ksim
