#pragma once

#include "ksim/errors.hpp"
#include "ksim/types.hpp"

namespace ksim {

/// Cut-off function chi(y) = 1 for ||y|| <= radius, 0 otherwise.
///
/// The indicator of a closed ball satisfies all three requirements placed on
/// a cut-off function (Borel, compact support, == 1 near 0). The drift
/// coefficient ell is defined relative to a fixed chi, so everything that
/// consumes a drift also carries its chi.
class CutoffFunction {
public:
    explicit CutoffFunction(Scalar radius = 1.0) : radius_(radius) {
        if (!(radius > 0.0)) throw ConfigError("cut-off radius must be > 0");
    }

    Scalar radius() const { return radius_; }

    Scalar operator()(const Vec& y) const { return y.norm() <= radius_ ? 1.0 : 0.0; }
    Scalar at_norm(Scalar r) const { return r <= radius_ ? 1.0 : 0.0; }

private:
    Scalar radius_;
};

} // namespace ksim
