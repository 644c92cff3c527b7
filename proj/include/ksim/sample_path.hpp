#pragma once

#include "ksim/killed_point.hpp"
#include "ksim/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ksim {

/// Discrete path event, recorded at its exact (not grid-rounded) time.
struct PathEvent {
    enum class Kind : unsigned char { Jump, Kill, Explode };
    Kind kind;
    Scalar time;
};

/// One realized trajectory on R^d ∪ {INF, DEL}.
///
/// The timeline merges the uniform grid with exact event times (kill times
/// fall strictly inside steps), so interrogations like first_exit_time see
/// events at their true positions instead of grid roundings.
struct SamplePath {
    std::vector<Scalar> times;       // strictly increasing, grid + events
    std::vector<KilledPoint> states; // same length as times
    Scalar zeta_delta = kInf;        // kill time, +inf if never killed
    Scalar zeta_infinity = kInf;     // explosion time, +inf if no explosion
    Scalar grid_step = 0.0;
    std::vector<PathEvent> events;
    /// Nonempty iff the path was truncated by a coefficient evaluation
    /// failure; ensemble drivers aggregate these into one error.
    std::string diagnostic;

    Eigen::Index dim() const { return states.empty() ? 0 : states.front().dim(); }

    /// State at time t: the recorded state at the largest recorded time <= t.
    /// Absorption rows are recorded at their exact clock times, so every
    /// query inside the simulated horizon sees cemeteries correctly.
    const KilledPoint& state_at(Scalar t) const;
};

/// Result of classify_exit.
struct ExitClassification {
    Scalar zeta_delta;
    Scalar zeta_infinity;
    std::vector<Scalar> sigma_n; // sigma'_n for n = 1..max_levels (+inf if not reached)
};

/// Throws StructuralError if the path violates absorption monotonicity, the
/// flow condition against its recorded clocks, or time ordering.
void validate_path(const SamplePath& path);

/// Classifies the leaving time of R^d into instant kill vs explosion using
/// the separating-sequence construction: sigma'_n is the first time the
/// distance from x (of the state or its predecessor) reaches n, cemetery
/// states counting as infinitely far. The leaving time is an explosion iff
/// every ladder level (n = 1..min(max_levels, explosion_norm)) is crossed
/// strictly before it; a kill pins some sigma'_n to the leaving time
/// itself.
ExitClassification classify_exit(const SamplePath& path, const Vec& x, Scalar explosion_norm,
                                 int max_levels = 32);

/// First exit time from the closed ball K = B(center, radius): the first
/// recorded time whose state lies outside K, cemetery states counting as
/// outside; +inf if the path never leaves K.
Scalar first_exit_time(const SamplePath& path, const Vec& center, Scalar radius);

/// CSV serialization: header `t,tag,x_1..x_d`, one row per recorded time,
/// cemetery rows with empty coordinate cells, floats at 17 significant
/// digits (round-trip exact).
void write_csv(const SamplePath& path, std::ostream& os);
SamplePath read_csv(std::istream& is);

} // namespace ksim
