#include "ksim/catalog.hpp"
#include "ksim/estimate.hpp"
#include "ksim/model.hpp"
#include "ksim/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ksim;

namespace {

Vec v1(Scalar x) { return Vec::Constant(1, x); }

} // namespace

TEST_CASE("richardson fit recovers affine data exactly") {
    const std::vector<Scalar> ts{0.2, 0.1, 0.05};
    const std::vector<Scalar> w = richardson_weights(ts);
    REQUIRE(w.size() == 3);
    Scalar sum = 0;
    for (const Scalar wi : w) sum += wi;
    CHECK(std::abs(sum - 1.0) < 1e-12); // reproduces constants

    const Complex alpha(0.7, -1.3), beta(2.0, 0.4);
    std::vector<Complex> vals;
    for (const Scalar t : ts) vals.push_back(alpha + beta * t);
    CHECK(std::abs(richardson_extrapolate(vals, ts) - alpha) < 1e-12);

    // two points: exact line through them
    const std::vector<Scalar> t2{0.1, 0.05};
    std::vector<Complex> v2{alpha + beta * 0.1, alpha + beta * 0.05};
    CHECK(std::abs(richardson_extrapolate(v2, t2) - alpha) < 1e-12);

    CHECK_THROWS_AS(richardson_extrapolate({Complex(1, 0)}, ts), ConfigError);
}

TEST_CASE("ladder validation") {
    const CatalogEntry e = catalog_lookup("pure_killing");
    SimConfig cfg;
    cfg.horizon = 0.5;
    cfg.n_paths = 10;
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 1.0, {}, cfg), ConfigError);
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 1.0, {0.1, 0.1}, cfg),
                    ConfigError);
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 1.0, {0.05, 0.1}, cfg),
                    ConfigError);
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 1.0, {0.1, -0.05}, cfg),
                    ConfigError);
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 1.0, {0.7, 0.1}, cfg),
                    ConfigError); // beyond the horizon
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, v1(1), 0.0, {0.1}, cfg), ConfigError);
    CHECK_THROWS_AS(estimate_symbol(e.model, e.default_x0, Vec::Zero(2), 1.0, {0.1}, cfg),
                    ConfigError); // xi dimension
}

TEST_CASE("killing-rate estimator on the motionless killer") {
    const CatalogEntry e = catalog_lookup("pure_killing", {{"a", 0.8}});
    SimConfig cfg;
    cfg.step = 1e-3;
    cfg.horizon = 0.25;
    cfg.n_paths = 20000;
    cfg.seed = 19;
    const std::vector<Scalar> ladder{0.2, 0.1, 0.05};
    const SymbolEstimate est = estimate_killing_rate(e.model, e.default_x0, ladder, cfg);
    CHECK(est.extrapolated);
    CHECK(est.n_paths == cfg.n_paths);
    REQUIRE(est.ladder_means.size() == 3);
    // per-t means estimate (1 - e^{-a t})/t, a visibly t-dependent quantity
    CHECK(std::abs(est.ladder_means[0].real() - (-std::expm1(-0.8 * 0.2) / 0.2)) < 0.02);
    // the extrapolation strips the O(t) bias down to O(t^2) ~ 5e-4
    CHECK(std::abs(est.value.real() - 0.8) < 3.0 * est.std_error + 2e-3);
    CHECK(est.std_error > 0.0);
    CHECK(est.value.imag() == 0.0);
    // the raw smallest-t readout is biased low by about a^2 t/2 = 0.016
    CHECK(std::abs(est.value_raw.real() - (-std::expm1(-0.8 * 0.05) / 0.05)) <
          3.0 * est.std_error_raw);
}

TEST_CASE("symbol estimator at xi = 0 equals the killing-rate estimator path by path") {
    const CatalogEntry e = catalog_lookup("pure_killing", {{"a", 1.4}});
    SimConfig cfg;
    cfg.step = 1e-3;
    cfg.horizon = 0.25;
    cfg.n_paths = 4000;
    cfg.seed = 2;
    const std::vector<Scalar> ladder{0.2, 0.1, 0.05};
    // motionless process: no stopping, e_xi(0) = 1, so the symbol readout
    // reduces to the kill indicator readout at every t
    const SymbolEstimate sym =
        estimate_symbol(e.model, e.default_x0, v1(0.0), 10.0, ladder, cfg);
    const SymbolEstimate kr = estimate_killing_rate(e.model, e.default_x0, ladder, cfg);
    for (std::size_t j = 0; j < ladder.size(); ++j)
        CHECK(std::abs(sym.ladder_means[j] - kr.ladder_means[j]) < 1e-15);
    CHECK(std::abs(sym.value - kr.value) < 1e-15);
    CHECK(sym.std_error == kr.std_error);
}

TEST_CASE("stopping domination is flagged") {
    // strong drift exits B(x, 0.05) almost immediately at every ladder t
    LevyQuadruple q;
    q.ell = v1(5.0);
    q.Q = Mat::Zero(1, 1);
    ProcessModel m;
    m.chars = Characteristics::constant("fast-drift", q);
    SimConfig cfg;
    cfg.step = 1e-3;
    cfg.horizon = 0.25;
    cfg.n_paths = 100;
    const SymbolEstimate est = estimate_symbol(m, v1(0), v1(1.0), 0.05, {0.2, 0.1, 0.05}, cfg);
    CHECK(est.stopping_dominated);

    // a short ladder keeps the quadratic term of -(e^{5it} - 1)/t (its
    // coefficient is 125/6) below the intercept's t^2 leakage of 1.25e-4
    const SymbolEstimate fine =
        estimate_symbol(m, v1(0), v1(1.0), 10.0, {0.02, 0.01, 0.005}, cfg);
    CHECK(!fine.stopping_dominated);
    // deterministic drift: -(e^{i xi ell t} - 1)/t extrapolates to -i ell xi
    CHECK(std::abs(fine.value - Complex(0, -5.0)) < 0.01);
    CHECK(fine.std_error < 1e-12);
}

TEST_CASE("accumulate_fourth integrates the rate along the path") {
    SamplePath p;
    p.grid_step = 0.1;
    p.times = {0.0, 0.1, 0.2};
    p.states = {KilledPoint::active1(1.0), KilledPoint::active1(2.0), KilledPoint::active1(4.0)};

    const auto ax = [](const Vec& x) { return x[0]; };
    // trapezoid of x over the rows: 0.1*(1+2)/2 + 0.1*(2+4)/2 = 0.45
    CHECK(accumulate_fourth(p, ax) == doctest::Approx(0.45).epsilon(1e-14));
    // stop mid-interval: left stub from the last row below t
    CHECK(accumulate_fourth(p, ax, 0.15) ==
          doctest::Approx(0.15 + 2.0 * 0.05).epsilon(1e-12));
    // stop exactly on a row
    CHECK(accumulate_fourth(p, ax, 0.1) == doctest::Approx(0.15).epsilon(1e-14));

    SamplePath killed = p;
    killed.times.push_back(0.26);
    killed.states.push_back(KilledPoint::cemetery(1));
    killed.zeta_delta = 0.26;
    // full trapezoid to 0.2, then the left stub 4.0 * 0.06 up to the kill
    CHECK(accumulate_fourth(killed, ax) == doctest::Approx(0.45 + 0.24).epsilon(1e-12));
    // t beyond the kill time stops at the kill time
    CHECK(accumulate_fourth(killed, ax, 5.0) == doctest::Approx(0.69).epsilon(1e-12));
}

TEST_CASE("compensator residual: centered for the true rate, off for a doubled rate") {
    const CatalogEntry e = catalog_lookup("pure_killing", {{"a", 0.8}});
    SimConfig cfg;
    cfg.step = 1e-2;
    cfg.horizon = 1.0;
    cfg.n_paths = 4000;
    cfg.seed = 23;

    const ResidualReport good = compensator_residual(e.model, e.default_x0, 0.5, cfg);
    CHECK(good.pass);
    CHECK(good.n_paths == cfg.n_paths);
    CHECK(std::abs(good.statistic) <= 3.0 * good.std_error + good.budget);

    const auto doubled = [&](const Vec& x) { return 2.0 * e.model.chars.a(x); };
    const ResidualReport bad = compensator_residual(e.model, e.default_x0, 0.5, cfg, doubled);
    CHECK(!bad.pass);
    // the doubled compensator overshoots by about E A_t = (1 - e^{-at})/1
    CHECK(bad.statistic < -0.2);

    CHECK_THROWS_AS(compensator_residual(e.model, e.default_x0, 0.0, cfg), ConfigError);
    CHECK_THROWS_AS(compensator_residual(e.model, e.default_x0, 2.0, cfg), ConfigError);
}

TEST_CASE("martingale residual on the motionless killer") {
    const CatalogEntry e = catalog_lookup("pure_killing", {{"a", 1.0}});
    SimConfig cfg;
    cfg.step = 1e-2;
    cfg.horizon = 1.0;
    cfg.n_paths = 2000;
    cfg.seed = 29;
    const TestFunction u = tapered_gaussian(1, v1(0.0), 1.0);
    const ResidualReport rep = martingale_problem_residual(e.model, u, e.default_x0, 0.5, cfg);
    CHECK(rep.pass);
    CHECK(rep.budget == doctest::Approx(2.0 * cfg.step));
    CHECK(rep.std_error > 0.0);
}

TEST_CASE("counterexample law: staircase CDF and oscillating probe") {
    CHECK(counterexample_kill_cdf(1.0) == 1.0);
    CHECK(counterexample_kill_cdf(17.0) == 1.0);
    CHECK(counterexample_kill_cdf(0.25) == 0.5);
    CHECK(counterexample_kill_cdf(0.0625) == 0.25);
    CHECK(counterexample_kill_cdf(0.3) == 0.5);      // plateau between 4^-1 and 1
    CHECK(counterexample_kill_cdf(0.9999) == 0.5);
    CHECK(counterexample_kill_cdf(std::nextafter(0.25, 0.0)) == 0.25);
    CHECK(counterexample_kill_cdf(1e-300) > 0.0);
}

TEST_CASE("counterexample probe hits 1 on the subsequence and 1/2 just below") {
    for (int j = 1; j <= 20; ++j) {
        const Scalar tj = std::ldexp(1.0, -2 * j);
        CHECK(counterexample_probe({tj})[0] == doctest::Approx(1.0).epsilon(1e-14));
        const Scalar below = std::nextafter(tj, 0.0);
        CHECK(counterexample_probe({below})[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(counterexample_kill_cdf(-1.0), ConfigError);
    CHECK_THROWS_AS(counterexample_probe({0.1, 0.0}), ConfigError);
}
