#include "ksim/rng.hpp"
#include "ksim/sample_path.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace ksim;

namespace {

SamplePath active_row_path(const std::vector<Scalar>& ts, const std::vector<Scalar>& xs) {
    SamplePath p;
    p.grid_step = ts.size() > 1 ? ts[1] - ts[0] : 0.1;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        p.times.push_back(ts[i]);
        p.states.push_back(KilledPoint::active1(xs[i]));
    }
    return p;
}

void append_del(SamplePath& p, Scalar t) {
    p.times.push_back(t);
    p.states.push_back(KilledPoint::cemetery(p.dim()));
    p.zeta_delta = t;
    p.events.push_back({PathEvent::Kind::Kill, t});
}

void append_inf(SamplePath& p, Scalar t) {
    p.times.push_back(t);
    p.states.push_back(KilledPoint::infinity(p.dim()));
    p.zeta_infinity = t;
    p.events.push_back({PathEvent::Kind::Explode, t});
}

} // namespace

TEST_CASE("state_at floors to the last recorded time") {
    const SamplePath p = active_row_path({0.0, 0.1, 0.2}, {1.0, 2.0, 3.0});
    CHECK(p.state_at(0.0).coords()[0] == 1.0);
    CHECK(p.state_at(0.05).coords()[0] == 1.0);
    CHECK(p.state_at(0.1).coords()[0] == 2.0);
    CHECK(p.state_at(0.19999).coords()[0] == 2.0);
    CHECK(p.state_at(5.0).coords()[0] == 3.0);
    CHECK_THROWS_AS(p.state_at(-0.01), StructuralError);
}

TEST_CASE("validate_path accepts the four lawful shapes") {
    SamplePath alive = active_row_path({0.0, 0.1, 0.2}, {0.0, 0.5, 0.3});
    CHECK_NOTHROW(validate_path(alive));

    SamplePath killed = active_row_path({0.0, 0.1}, {0.0, 0.5});
    append_del(killed, 0.137);
    CHECK_NOTHROW(validate_path(killed));

    SamplePath exploded = active_row_path({0.0, 0.1}, {0.0, 3.0});
    append_inf(exploded, 0.2);
    CHECK_NOTHROW(validate_path(exploded));

    SamplePath both = active_row_path({0.0, 0.1}, {0.0, 3.0});
    append_inf(both, 0.2);
    both.times.push_back(0.45); // merged kill clock fires after the explosion
    both.states.push_back(KilledPoint::cemetery(1));
    both.zeta_delta = 0.45;
    CHECK_NOTHROW(validate_path(both));
}

TEST_CASE("validate_path rejects broken bookkeeping") {
    SamplePath unordered = active_row_path({0.0, 0.2, 0.1}, {0.0, 1.0, 2.0});
    CHECK_THROWS_AS(validate_path(unordered), StructuralError);

    SamplePath revived = active_row_path({0.0, 0.1}, {0.0, 1.0});
    append_del(revived, 0.15);
    revived.times.push_back(0.2);
    revived.states.push_back(KilledPoint::active1(0.0));
    CHECK_THROWS_AS(validate_path(revived), StructuralError);

    SamplePath back_from_del = active_row_path({0.0}, {0.0});
    append_del(back_from_del, 0.1);
    back_from_del.times.push_back(0.2);
    back_from_del.states.push_back(KilledPoint::infinity(1));
    CHECK_THROWS_AS(validate_path(back_from_del), StructuralError);

    SamplePath wrong_clock = active_row_path({0.0, 0.1}, {0.0, 1.0});
    append_del(wrong_clock, 0.15);
    wrong_clock.zeta_delta = 0.25; // DEL row now sits before the recorded clock
    CHECK_THROWS_AS(validate_path(wrong_clock), StructuralError);

    SamplePath late_active = active_row_path({0.0, 0.1, 0.2}, {0.0, 1.0, 2.0});
    late_active.zeta_delta = 0.15; // active row at 0.2 outlives the clock
    CHECK_THROWS_AS(validate_path(late_active), StructuralError);

    SamplePath inverted = active_row_path({0.0}, {0.0});
    append_del(inverted, 0.1);
    inverted.zeta_infinity = 0.3; // finite clocks must order INF before DEL
    CHECK_THROWS_AS(validate_path(inverted), StructuralError);

    SamplePath non_finite = active_row_path({0.0, 0.1}, {0.0, 0.0});
    non_finite.states[1] = KilledPoint::active1(std::nan(""));
    CHECK_THROWS_AS(validate_path(non_finite), StructuralError);
}

TEST_CASE("classify_exit separates kills from explosions") {
    const Vec x0 = Vec::Zero(1);

    SUBCASE("survival") {
        const SamplePath p = active_row_path({0.0, 0.1, 0.2}, {0.0, 0.4, 0.2});
        const ExitClassification c = classify_exit(p, x0, 1e8);
        CHECK(c.zeta_delta == kInf);
        CHECK(c.zeta_infinity == kInf);
        CHECK(c.sigma_n.size() == 32);
        CHECK(c.sigma_n[0] == kInf);
    }

    SUBCASE("kill from inside: the cemetery pins sigma'_n to the leaving time") {
        SamplePath p = active_row_path({0.0, 0.1, 0.2}, {0.0, 0.4, 0.6});
        append_del(p, 0.25);
        const ExitClassification c = classify_exit(p, x0, 8.0);
        CHECK(c.zeta_delta == 0.25);
        CHECK(c.zeta_infinity == kInf);
        CHECK(c.sigma_n.size() == 8);
        for (const Scalar s : c.sigma_n) CHECK(s == 0.25);
    }

    SUBCASE("explosion: every level crossed strictly before the leaving time") {
        SamplePath p = active_row_path({0.0, 0.1, 0.2, 0.3, 0.4}, {0.0, 1.2, 2.4, 3.5, 5.2});
        append_inf(p, 0.5);
        const ExitClassification c = classify_exit(p, x0, 5.0);
        CHECK(c.zeta_infinity == 0.5);
        CHECK(c.zeta_delta == kInf);
        CHECK(c.sigma_n == std::vector<Scalar>{0.1, 0.2, 0.3, 0.4, 0.4});
    }

    SUBCASE("climb that stalls below the top level classifies as a kill") {
        // the ladder runs to n = 5; a peak of 4.9 leaves sigma'_5 pinned at
        // the leaving time, so the exit is not announced
        SamplePath p = active_row_path({0.0, 0.1, 0.2, 0.3, 0.4}, {0.0, 1.2, 2.4, 3.5, 4.9});
        append_inf(p, 0.5);
        const ExitClassification c = classify_exit(p, x0, 5.0);
        CHECK(c.zeta_delta == 0.5);
        CHECK(c.zeta_infinity == kInf);
        CHECK(c.sigma_n.back() == 0.5);
    }

    SUBCASE("kill mid-climb stays a kill") {
        SamplePath p = active_row_path({0.0, 0.1, 0.2}, {0.0, 1.2, 2.4});
        append_del(p, 0.25);
        const ExitClassification c = classify_exit(p, x0, 5.0);
        CHECK(c.zeta_delta == 0.25);
        CHECK(c.zeta_infinity == kInf);
    }

    SUBCASE("explosion followed by a merged kill reports both clocks") {
        SamplePath p = active_row_path({0.0, 0.1, 0.2, 0.3, 0.4}, {0.0, 1.2, 2.4, 3.5, 5.2});
        append_inf(p, 0.5);
        p.times.push_back(0.8);
        p.states.push_back(KilledPoint::cemetery(1));
        p.zeta_delta = 0.8;
        const ExitClassification c = classify_exit(p, x0, 5.0);
        CHECK(c.zeta_infinity == 0.5);
        CHECK(c.zeta_delta == 0.8);
    }

    SUBCASE("ladder caps at 32 levels under a huge explosion norm") {
        std::vector<Scalar> ts, xs;
        for (int i = 0; i <= 33; ++i) {
            ts.push_back(0.01 * i);
            xs.push_back(1.5 * i);
        }
        SamplePath p = active_row_path(ts, xs);
        append_inf(p, 0.35);
        const ExitClassification c = classify_exit(p, x0, 1e8);
        CHECK(c.sigma_n.size() == 32);
        CHECK(c.zeta_infinity == 0.35);
    }
}

TEST_CASE("first_exit_time leaves the closed ball") {
    const Vec c = Vec::Zero(1);
    SamplePath p = active_row_path({0.0, 0.1, 0.2, 0.3}, {0.0, 1.0, 1.5, 0.2});
    CHECK(first_exit_time(p, c, 1.0) == 0.2);  // dist == 1.0 is still inside
    CHECK(first_exit_time(p, c, 0.99) == 0.1);
    CHECK(first_exit_time(p, c, 2.0) == kInf);

    SamplePath killed = active_row_path({0.0, 0.1}, {0.0, 0.2});
    append_del(killed, 0.13);
    CHECK(first_exit_time(killed, c, 5.0) == 0.13); // cemetery is outside every ball
}

TEST_CASE("csv round trip is exact") {
    SamplePath p = active_row_path({0.0, 0.1}, {1.0 / 3.0, -0.123456789012345678});
    append_del(p, 0.1 + 1e-13);
    std::stringstream ss;
    write_csv(p, ss);
    const SamplePath q = read_csv(ss);
    REQUIRE(q.times.size() == p.times.size());
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        CHECK(q.times[i] == p.times[i]);
        CHECK(q.states[i] == p.states[i]);
    }
    CHECK(q.zeta_delta == p.zeta_delta);
}

TEST_CASE("property: the validator accepts lawful paths and rejects corruptions, 10^4 cases") {
    PathRng rng(20260819, 99);
    for (int it = 0; it < 10000; ++it) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform01() * 2.0);
        const int n_rows = 2 + static_cast<int>(rng.uniform01() * 8.0);
        SamplePath p;
        p.grid_step = 0.1;
        Vec x = Vec::Zero(d);
        for (int i = 0; i < n_rows; ++i) {
            p.times.push_back(0.1 * i);
            for (Eigen::Index k = 0; k < d; ++k) x[k] += rng.uniform01() - 0.5;
            p.states.push_back(KilledPoint::active(x));
        }
        const Scalar shape = rng.uniform01();
        if (shape < 0.3) {
            append_del(p, 0.1 * n_rows - 0.05 * rng.uniform01());
        } else if (shape < 0.5) {
            append_inf(p, 0.1 * n_rows);
        } else if (shape < 0.6) {
            append_inf(p, 0.1 * n_rows);
            p.times.push_back(0.1 * n_rows + 0.07);
            p.states.push_back(KilledPoint::cemetery(d));
            p.zeta_delta = 0.1 * n_rows + 0.07;
        }
        REQUIRE_NOTHROW(validate_path(p));

        SamplePath bad = p;
        const int mode = static_cast<int>(rng.uniform01() * 4.0);
        if (mode == 0 && bad.times.size() >= 2) {
            std::swap(bad.times[0], bad.times[1]); // breaks strict ordering
        } else if (mode == 1) {
            bad.times.push_back(bad.times.back() + 0.05);
            bad.states.push_back(KilledPoint::active(Vec::Zero(d)));
            if (!std::isfinite(bad.zeta_delta) && !std::isfinite(bad.zeta_infinity))
                bad.zeta_delta = bad.times.back(); // active row at its own leaving time
        } else if (mode == 2) {
            // rewrite the clocks so some recorded row contradicts them: a
            // mid-path row now sits at or beyond its own leaving time
            bad.zeta_infinity = kInf;
            bad.zeta_delta = bad.times[bad.times.size() / 2];
        } else {
            bad.states[0] = KilledPoint::cemetery(d); // DEL at t=0 with zeta_delta = inf
        }
        REQUIRE_THROWS_AS(validate_path(bad), StructuralError);
    }
}
