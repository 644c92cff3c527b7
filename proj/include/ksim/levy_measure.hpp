#pragma once

#include "ksim/errors.hpp"
#include "ksim/types.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace ksim {

class PathRng;

struct JumpAtom {
    Scalar mass;
    Vec jump;
};

/// Finite-activity jump measure: either a list of atoms, or (d = 1 only) a
/// nonnegative density with declared compact support and total-mass bound.
///
/// N({0}) = 0 is enforced: no atom at 0; the density's value at 0 carries no
/// mass, so quadrature and sampling are unaffected by the single point.
class LevyMeasure {
public:
    struct Density {
        std::function<Scalar(Scalar)> density;
        Scalar support_lo;
        Scalar support_hi;
        Scalar total_mass_bound;
    };

    /// Zero measure (no jumps).
    LevyMeasure() : total_mass_(0.0) {}

    static LevyMeasure atomic(std::vector<JumpAtom> atoms);
    static LevyMeasure from_density(Density spec);

    bool is_atomic() const { return !std::holds_alternative<Density>(body_); }
    const std::vector<JumpAtom>& atoms() const { return std::get<std::vector<JumpAtom>>(body_); }
    const Density& density() const { return std::get<Density>(body_); }

    /// Total activity lambda_J = N(R^d); exact for atoms, quadrature for
    /// densities (computed once at construction).
    Scalar total_mass() const { return total_mass_; }

    Eigen::Index dim() const { return dim_; }

    /// One jump from the normalized measure. Atoms: inverse CDF over masses;
    /// density: linear-interpolated inverse CDF built at construction.
    Vec sample(PathRng& rng) const;

private:
    std::variant<std::vector<JumpAtom>, Density> body_;
    Scalar total_mass_;
    Eigen::Index dim_ = 1;
    std::vector<Scalar> cdf_grid_; // density only: y-nodes
    std::vector<Scalar> cdf_;      // density only: normalized CDF at nodes
};

} // namespace ksim
