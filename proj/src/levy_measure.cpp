#include "ksim/levy_measure.hpp"

#include "ksim/format.hpp"
#include "ksim/quadrature.hpp"
#include "ksim/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ksim {

LevyMeasure LevyMeasure::atomic(std::vector<JumpAtom> atoms) {
    LevyMeasure m;
    Scalar total = 0.0;
    Eigen::Index d = atoms.empty() ? 1 : atoms.front().jump.size();
    for (const JumpAtom& a : atoms) {
        if (!(a.mass > 0)) throw ConfigError("jump atom mass must be > 0");
        if (a.jump.size() != d) throw ConfigError("jump atoms must share one dimension");
        if (a.jump.norm() == 0.0) throw ConfigError("jump measure must not charge {0}");
        total += a.mass;
    }
    m.body_ = std::move(atoms);
    m.total_mass_ = total;
    m.dim_ = d;
    return m;
}

LevyMeasure LevyMeasure::from_density(Density spec) {
    if (!(spec.support_lo < spec.support_hi))
        throw ConfigError("density support must satisfy lo < hi");
    if (!(spec.total_mass_bound > 0) || !std::isfinite(spec.total_mass_bound))
        throw ConfigError("density total-mass bound must be finite and > 0");

    LevyMeasure m;
    m.dim_ = 1;

    // Tabulate the CDF once; it doubles as the mass computation and the
    // sampler. 0 is dropped from the node set (N({0}) = 0).
    const int n_cells = 4096;
    const Scalar lo = spec.support_lo, hi = spec.support_hi;
    m.cdf_grid_.resize(n_cells + 1);
    m.cdf_.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i)
        m.cdf_grid_[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_cells;

    Scalar acc = 0.0;
    m.cdf_[0] = 0.0;
    Scalar prev_f = std::max(spec.density(lo), 0.0);
    for (int i = 1; i <= n_cells; ++i) {
        const Scalar y = m.cdf_grid_[static_cast<std::size_t>(i)];
        const Scalar f = std::max(spec.density(y), 0.0);
        acc += 0.5 * (prev_f + f) * (hi - lo) / n_cells;
        m.cdf_[static_cast<std::size_t>(i)] = acc;
        prev_f = f;
    }
    // refine the total mass with adaptive quadrature; the table is only the sampler
    const Scalar mass = adaptive_simpson_real(spec.density, lo, hi, 1e-10, 1e-14);
    if (!(mass >= 0) || !std::isfinite(mass))
        throw NumericalError("density mass integral is not finite");
    if (mass > spec.total_mass_bound * (1.0 + 1e-9))
        throw ConfigError("density mass " + format_g17(mass) + " exceeds declared bound " +
                          format_g17(spec.total_mass_bound));
    m.total_mass_ = mass;
    for (Scalar& c : m.cdf_) c *= (acc > 0 ? mass / acc : 0.0); // align table with refined mass
    m.body_ = std::move(spec);
    return m;
}

Vec LevyMeasure::sample(PathRng& rng) const {
    if (total_mass_ <= 0) throw StructuralError("sample from a zero jump measure");
    const Scalar u = rng.uniform01() * total_mass_;
    if (is_atomic()) {
        const auto& as = atoms();
        Scalar acc = 0.0;
        for (const JumpAtom& a : as) {
            acc += a.mass;
            if (u <= acc) return a.jump;
        }
        return as.back().jump; // rounding tail
    }
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const auto hi_idx = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1, static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
    const Scalar c0 = cdf_[hi_idx - 1], c1 = cdf_[hi_idx];
    const Scalar y0 = cdf_grid_[hi_idx - 1], y1 = cdf_grid_[hi_idx];
    const Scalar w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    Vec y(1);
    y[0] = y0 + w * (y1 - y0);
    return y;
}

} // namespace ksim
