#include "ksim/sample_path.hpp"

#include "ksim/errors.hpp"
#include "ksim/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ksim {

const KilledPoint& SamplePath::state_at(Scalar t) const {
    if (times.empty()) throw StructuralError("state_at on empty path");
    if (t < times.front()) throw StructuralError("state_at before path start");
    // last index with times[i] <= t
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto idx = static_cast<std::size_t>(it - times.begin()) - 1;
    return states[idx];
}

void validate_path(const SamplePath& path) {
    if (path.times.size() != path.states.size())
        throw StructuralError("path: times/states length mismatch");
    if (path.times.empty()) throw StructuralError("path: empty");

    const Eigen::Index d = path.states.front().dim();
    bool seen_inf = false, seen_del = false;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        if (i > 0 && !(path.times[i] > path.times[i - 1]))
            throw StructuralError("path: times not strictly increasing at index " + std::to_string(i));
        const KilledPoint& s = path.states[i];
        if (s.dim() != d) throw StructuralError("path: dimension changes mid-path");
        const Scalar t = path.times[i];
        switch (s.tag()) {
            case StateTag::Active:
                if (seen_del || seen_inf)
                    throw StructuralError("path: Active state after a cemetery state (absorption violated)");
                if (!s.coords().allFinite())
                    throw StructuralError("path: non-finite Active coordinates");
                if (!(t < path.zeta_delta && t < path.zeta_infinity))
                    throw StructuralError("path: Active state at or after a recorded leaving time");
                break;
            case StateTag::Inf:
                if (seen_del) throw StructuralError("path: INF after DEL (no transition back from Delta)");
                seen_inf = true;
                if (!(t >= path.zeta_infinity && t < path.zeta_delta))
                    throw StructuralError("path: INF state outside [zeta_infinity, zeta_delta)");
                break;
            case StateTag::Del:
                seen_del = true;
                if (!(t >= path.zeta_delta))
                    throw StructuralError("path: DEL state before zeta_delta");
                break;
        }
    }
    if (std::isfinite(path.zeta_infinity) && std::isfinite(path.zeta_delta) &&
        !(path.zeta_infinity < path.zeta_delta))
        throw StructuralError("path: finite clocks must satisfy zeta_infinity < zeta_delta");
}

ExitClassification classify_exit(const SamplePath& path, const Vec& x, Scalar explosion_norm,
                                 int max_levels) {
    if (!(explosion_norm > 0)) throw StructuralError("classify_exit: explosion_norm must be > 0");
    validate_path(path);

    // Leaving time of R^d: first recorded cemetery state, if any.
    Scalar zeta_partial = kInf;
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        if (!path.states[i].is_active()) {
            zeta_partial = path.times[i];
            break;
        }
    }

    // sigma'_n = first time the distance from x of the state or its
    // pre-state reaches n; cemetery states are infinitely far, so every
    // sigma'_n is capped at zeta_partial. The ladder is truncated to
    // n <= min(max_levels, explosion_norm): higher levels carry no
    // information a simulation at this norm could have produced.
    ExitClassification out;
    const int n_levels = static_cast<int>(std::min<Scalar>(max_levels, explosion_norm));
    if (n_levels < 1)
        throw StructuralError("classify_exit: explosion_norm too small for a level ladder");
    out.sigma_n.assign(static_cast<std::size_t>(n_levels), kInf);
    for (int n = 1; n <= n_levels; ++n) {
        Scalar crossing = kInf;
        for (std::size_t i = 0; i < path.states.size(); ++i) {
            const Scalar dist_here = path.states[i].dist(x);
            const Scalar dist_prev = i > 0 ? path.states[i - 1].dist(x) : path.states[i].dist(x);
            if (dist_here >= static_cast<Scalar>(n) || dist_prev >= static_cast<Scalar>(n)) {
                crossing = path.times[i];
                break;
            }
        }
        out.sigma_n[static_cast<std::size_t>(n - 1)] = crossing;
    }

    if (!std::isfinite(zeta_partial)) {
        out.zeta_delta = kInf;
        out.zeta_infinity = kInf;
        return out;
    }

    // Explosion iff every level is crossed strictly before the leaving time
    // (the separating sequence announces the exit). A kill is detected by
    // some sigma'_n only reaching its level at zeta_partial itself, where
    // the cemetery state's infinite distance first crosses it.
    bool all_before = true;
    for (Scalar s : out.sigma_n)
        if (!(s < zeta_partial)) all_before = false;
    if (all_before) {
        out.zeta_infinity = zeta_partial;
        out.zeta_delta = kInf;
        // A merged kill can still move INF -> DEL later.
        for (std::size_t i = 0; i < path.states.size(); ++i) {
            if (path.states[i].is_del()) {
                out.zeta_delta = path.times[i];
                break;
            }
        }
    } else {
        out.zeta_delta = zeta_partial;
        out.zeta_infinity = kInf;
    }
    return out;
}

Scalar first_exit_time(const SamplePath& path, const Vec& center, Scalar radius) {
    if (!(radius > 0)) throw StructuralError("first_exit_time: radius must be > 0");
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        if (path.states[i].dist(center) > radius) return path.times[i];
    }
    return kInf;
}

void write_csv(const SamplePath& path, std::ostream& os) {
    const Eigen::Index d = path.dim();
    os << "t,tag";
    for (Eigen::Index j = 1; j <= d; ++j) os << ",x_" << j;
    os << "\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const KilledPoint& s = path.states[i];
        os << format_g17(path.times[i]) << ',' << to_string(s.tag());
        for (Eigen::Index j = 0; j < d; ++j) {
            os << ',';
            if (s.is_active()) os << format_g17(s.coords()[j]);
        }
        os << "\n";
    }
}

SamplePath read_csv(std::istream& is) {
    SamplePath path;
    std::string line;
    if (!std::getline(is, line)) throw StructuralError("path csv: missing header");
    // count coordinate columns from the header
    Eigen::Index d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) - 1;
    if (d < 0 || line.rfind("t,tag", 0) != 0) throw StructuralError("path csv: bad header: " + line);

    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const Scalar t = std::stod(cell);
        std::getline(ss, cell, ',');
        KilledPoint p;
        if (cell == "A") {
            Vec x(d);
            for (Eigen::Index j = 0; j < d; ++j) {
                std::getline(ss, cell, ',');
                x[j] = std::stod(cell);
            }
            p = KilledPoint::active(std::move(x));
        } else if (cell == "INF") {
            p = KilledPoint::infinity(d);
            if (!std::isfinite(path.zeta_infinity)) path.zeta_infinity = t;
        } else if (cell == "DEL") {
            p = KilledPoint::cemetery(d);
            if (!std::isfinite(path.zeta_delta)) path.zeta_delta = t;
        } else {
            throw StructuralError("path csv: unknown tag: " + cell);
        }
        path.times.push_back(t);
        path.states.push_back(std::move(p));
    }
    return path;
}

} // namespace ksim
