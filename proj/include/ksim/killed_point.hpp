#pragma once

#include "ksim/errors.hpp"
#include "ksim/types.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ksim {

/// State tag for the two-point compactification-with-killing: a point is
/// either a live vector in R^d, the explosion cemetery INF, or the instant
/// kill cemetery DEL.
enum class StateTag : unsigned char { Active, Inf, Del };

inline const char* to_string(StateTag t) {
    switch (t) {
        case StateTag::Active: return "A";
        case StateTag::Inf: return "INF";
        case StateTag::Del: return "DEL";
    }
    return "?";
}

/// A point of the extended state space R^d ∪ {INF, DEL}.
///
/// Coordinates exist only in the Active state; both cemeteries carry the
/// dimension of the space they were reached from so paths stay well typed.
class KilledPoint {
public:
    KilledPoint() : tag_(StateTag::Active), coords_(Vec::Zero(1)) {}

    static KilledPoint active(Vec x) { return KilledPoint(StateTag::Active, std::move(x)); }
    static KilledPoint active1(Scalar x) { return active(Vec::Constant(1, x)); }
    static KilledPoint infinity(Eigen::Index dim = 1) { return KilledPoint(StateTag::Inf, Vec::Zero(dim)); }
    static KilledPoint cemetery(Eigen::Index dim = 1) { return KilledPoint(StateTag::Del, Vec::Zero(dim)); }

    StateTag tag() const { return tag_; }
    bool is_active() const { return tag_ == StateTag::Active; }
    bool is_inf() const { return tag_ == StateTag::Inf; }
    bool is_del() const { return tag_ == StateTag::Del; }
    Eigen::Index dim() const { return coords_.size(); }

    const Vec& coords() const {
        if (!is_active()) throw StructuralError("coords() on a cemetery state");
        return coords_;
    }

    /// Euclidean norm, with ||INF|| = ||DEL|| = +inf.
    Scalar norm() const { return is_active() ? coords_.norm() : kInf; }

    /// ||p - x|| with the same cemetery convention.
    Scalar dist(const Vec& x) const { return is_active() ? (coords_ - x).norm() : kInf; }

    bool operator==(const KilledPoint& o) const {
        if (tag_ != o.tag_) return false;
        if (!is_active()) return true;
        return coords_.size() == o.coords_.size() && coords_ == o.coords_;
    }

private:
    KilledPoint(StateTag t, Vec x) : tag_(t), coords_(std::move(x)) {}

    StateTag tag_;
    Vec coords_;
};

/// Shift by a live vector: cemeteries absorb, Active translates.
inline KilledPoint ks_add(const KilledPoint& p, const Vec& v) {
    if (!p.is_active()) return p;
    if (p.dim() != v.size()) throw StructuralError("ks_add: dimension mismatch");
    return KilledPoint::active(p.coords() + v);
}

/// Merge of two extended states (the "X + K" composition of a process with
/// an independent killing component). DEL dominates everything, INF
/// dominates Active, and two Active points add as vectors.
inline KilledPoint ks_merge(const KilledPoint& p, const KilledPoint& q) {
    if (p.is_del() || q.is_del()) return KilledPoint::cemetery(p.dim());
    if (p.is_inf() || q.is_inf()) return KilledPoint::infinity(p.dim());
    return ks_add(p, q.coords());
}

/// e_xi(p) = exp(i <p, xi>) on Active states, 0 on both cemeteries.
inline Complex e_xi(const KilledPoint& p, const Vec& xi) {
    if (!p.is_active()) return Complex(0.0, 0.0);
    if (p.dim() != xi.size()) throw StructuralError("e_xi: dimension mismatch");
    const Scalar theta = p.coords().dot(xi);
    return Complex(std::cos(theta), std::sin(theta));
}

} // namespace ksim
