#pragma once

#include "ksim/sample_path.hpp"
#include "ksim/symbol.hpp"
#include "ksim/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace ksim {

struct SimConfig;

/// A simulatable process: characteristics plus the optional extras a catalog
/// entry can provide (exact integrator, non-autonomous compensator, domain).
///
/// Plain Characteristics convert implicitly: Euler stepping, compensator
/// = integral of a along the path.
struct ProcessModel {
    Characteristics chars;

    /// Exact path constructor replacing Euler (superdrift, deterministic
    /// kill, ...). Receives (x0, cfg, path_index) and must honor the grid
    /// and determinism contracts.
    std::function<SamplePath(const Vec&, const SimConfig&, std::uint64_t)> exact_integrator;

    /// Pathwise A_{t ∧ zeta_delta} when the fourth characteristic is not
    /// the integral of a (deterministic kill's predictable unit jump, the
    /// merged independent kill clock). Null -> accumulate_fourth with
    /// chars.a.
    std::function<Scalar(const SamplePath&, Scalar)> declared_compensator;

    /// Declared x-domain (sampling + validation), [lo, hi] per coordinate;
    /// unbounded when empty.
    std::optional<std::pair<Scalar, Scalar>> domain;

    /// True when N(x,.) does not depend on x; lets the stepper hoist the
    /// measure and its compensation integral out of the step loop.
    bool jumps_state_independent = true;

    ProcessModel() = default;
    ProcessModel(Characteristics c) : chars(std::move(c)) {} // NOLINT: implicit by design

    bool in_domain(const Vec& x) const {
        if (!domain) return true;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < domain->first || x[i] > domain->second) return false;
        return true;
    }
};

} // namespace ksim
