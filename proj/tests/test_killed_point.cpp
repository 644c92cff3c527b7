#include "ksim/killed_point.hpp"
#include "ksim/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ksim;

namespace {

Vec rvec(PathRng& rng, Eigen::Index d) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = 4.0 * (rng.uniform01() - 0.5);
    return v;
}

KilledPoint random_state(PathRng& rng, Eigen::Index d) {
    const Scalar u = rng.uniform01();
    if (u < 0.2) return KilledPoint::cemetery(d);
    if (u < 0.4) return KilledPoint::infinity(d);
    return KilledPoint::active(rvec(rng, d));
}

} // namespace

TEST_CASE("factories and tags") {
    const KilledPoint a = KilledPoint::active1(2.5);
    CHECK(a.is_active());
    CHECK(a.dim() == 1);
    CHECK(a.coords()[0] == 2.5);

    const KilledPoint del = KilledPoint::cemetery(3);
    CHECK(del.is_del());
    CHECK(!del.is_active());
    CHECK(del.dim() == 3);

    const KilledPoint inf = KilledPoint::infinity(2);
    CHECK(inf.is_inf());
    CHECK(inf.dim() == 2);
}

TEST_CASE("coords on a cemetery throws") {
    CHECK_THROWS_AS((void)KilledPoint::cemetery(1).coords(), StructuralError);
    CHECK_THROWS_AS((void)KilledPoint::infinity(2).coords(), StructuralError);
}

TEST_CASE("norm and dist treat cemeteries as infinitely far") {
    const Vec x = Vec::Constant(1, 1.0);
    CHECK(KilledPoint::active1(3.0).norm() == 3.0);
    CHECK(KilledPoint::active1(3.0).dist(x) == 2.0);
    CHECK(KilledPoint::cemetery(1).norm() == kInf);
    CHECK(KilledPoint::infinity(1).norm() == kInf);
    CHECK(KilledPoint::cemetery(1).dist(x) == kInf);
    CHECK(KilledPoint::infinity(1).dist(x) == kInf);
}

TEST_CASE("ks_add absorbs on cemeteries and translates actives") {
    const Vec v = Vec::Constant(1, 0.75);
    CHECK(ks_add(KilledPoint::active1(1.0), v).coords()[0] == 1.75);
    CHECK(ks_add(KilledPoint::cemetery(1), v).is_del());
    CHECK(ks_add(KilledPoint::infinity(1), v).is_inf());
    CHECK_THROWS_AS(ks_add(KilledPoint::active(Vec::Zero(2)), v), StructuralError);
}

TEST_CASE("ks_merge: DEL dominates INF dominates Active") {
    const KilledPoint a = KilledPoint::active1(1.0);
    const KilledPoint b = KilledPoint::active1(2.0);
    const KilledPoint del = KilledPoint::cemetery(1);
    const KilledPoint inf = KilledPoint::infinity(1);

    CHECK(ks_merge(a, b).coords()[0] == 3.0);
    CHECK(ks_merge(del, inf).is_del());
    CHECK(ks_merge(inf, del).is_del());
    CHECK(ks_merge(inf, a).is_inf());
    CHECK(ks_merge(a, inf).is_inf());
    CHECK(ks_merge(del, a).is_del());
    CHECK(ks_merge(a, del).is_del());
}

TEST_CASE("e_xi is the killed complex exponential") {
    Vec xi = Vec::Constant(1, 2.0);
    const Complex z = e_xi(KilledPoint::active1(0.7), xi);
    CHECK(std::abs(z - std::exp(Complex(0, 1.4))) < 1e-15);
    CHECK(e_xi(KilledPoint::cemetery(1), xi) == Complex(0, 0));
    CHECK(e_xi(KilledPoint::infinity(1), xi) == Complex(0, 0));
    CHECK(std::abs(e_xi(KilledPoint::active1(0.7), Vec::Zero(1)) - Complex(1, 0)) == 0);
}

TEST_CASE("property: killed-state algebra, 10^4 random cases") {
    PathRng rng(20260819, 1);
    int cases = 0;
    for (int it = 0; it < 10000; ++it, ++cases) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform01() * 3.0);
        const KilledPoint p = random_state(rng, d);
        const KilledPoint q = random_state(rng, d);
        const KilledPoint r = random_state(rng, d);
        const Vec v = rvec(rng, d);
        const Vec w = rvec(rng, d);
        const Vec xi = rvec(rng, d);

        // cemetery absorption under shift
        REQUIRE(ks_add(p, v).tag() == p.tag());
        // shift composition (and commutativity through it)
        REQUIRE(ks_add(ks_add(p, v), w) == ks_add(p, v + w));
        REQUIRE(ks_add(ks_add(p, v), w) == ks_add(ks_add(p, w), v));

        // merge: commutative on tags, associative everywhere
        REQUIRE(ks_merge(p, q).tag() == ks_merge(q, p).tag());
        REQUIRE(ks_merge(ks_merge(p, q), r) == ks_merge(p, ks_merge(q, r)));
        // DEL dominates, INF dominates Active
        if (p.is_del() || q.is_del()) REQUIRE(ks_merge(p, q).is_del());
        else if (p.is_inf() || q.is_inf()) REQUIRE(ks_merge(p, q).is_inf());
        else REQUIRE(ks_merge(p, q).is_active());
        // the active neutral element
        REQUIRE(ks_merge(p, KilledPoint::active(Vec::Zero(d))) == p);

        // norm convention and e_xi kill convention agree on liveness
        REQUIRE((p.norm() < kInf) == p.is_active());
        if (!p.is_active()) REQUIRE(e_xi(p, xi) == Complex(0, 0));
        if (p.is_active()) REQUIRE(std::abs(std::abs(e_xi(p, xi)) - 1.0) < 1e-12);
        // |e_xi| <= 1 uniformly: the estimator readout stays bounded
        REQUIRE(std::abs(e_xi(p, xi)) <= 1.0 + 1e-12);
    }
    CHECK(cases == 10000);
}
