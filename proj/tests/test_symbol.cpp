#include "ksim/rng.hpp"
#include "ksim/symbol.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ksim;

namespace {

Vec v1(Scalar x) { return Vec::Constant(1, x); }

LevyQuadruple quad1(Scalar a, Scalar ell, Scalar q) {
    LevyQuadruple quad;
    quad.a = a;
    quad.ell = v1(ell);
    quad.Q = Mat::Constant(1, 1, q);
    return quad;
}

/// independent Simpson oracle for the density jump integral
Complex simpson_jump_oracle(const std::function<Scalar(Scalar)>& f, Scalar lo, Scalar hi,
                            Scalar xi, const CutoffFunction& chi, int panels) {
    const Scalar h = (hi - lo) / (2 * panels);
    Complex sum(0, 0);
    auto g = [&](Scalar y) -> Complex {
        const Complex e(std::cos(y * xi) - 1.0, std::sin(y * xi) - y * xi * chi.at_norm(std::abs(y)));
        return f(y) * e;
    };
    for (int k = 0; k < panels; ++k) {
        const Scalar y0 = lo + 2 * k * h;
        sum += g(y0) + 4.0 * g(y0 + h) + g(y0 + 2 * h);
    }
    return sum * (h / 3.0);
}

} // namespace

TEST_CASE("quadruple validation") {
    CHECK_NOTHROW(quad1(1.0, 0.5, 1.0).validate());
    CHECK_THROWS_AS(quad1(-0.1, 0.0, 1.0).validate(), ConfigError);
    CHECK_THROWS_AS(quad1(0.0, 0.0, -1.0).validate(), ConfigError); // Q not psd

    LevyQuadruple bad = quad1(0.0, 0.0, 1.0);
    bad.Q = Mat::Zero(2, 2);
    CHECK_THROWS_AS(bad.validate(), ConfigError); // Q dim != ell dim

    LevyQuadruple atom_dim = quad1(0.0, 0.0, 1.0);
    atom_dim.N = LevyMeasure::atomic({{1.0, Vec::Ones(2)}});
    CHECK_THROWS_AS(atom_dim.validate(), ConfigError);
}

TEST_CASE("psd_check") {
    Mat good(2, 2);
    good << 2, 1, 1, 2;
    CHECK(psd_check(good, 1e-10));
    Mat indef(2, 2);
    indef << 1, 3, 3, 1;
    CHECK(!psd_check(indef, 1e-10));
    Mat asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK(!psd_check(asym, 1e-10));
    Mat tiny_neg = Mat::Identity(2, 2) * (-1e-14);
    CHECK(psd_check(tiny_neg, 1e-10)); // within tolerance
}

TEST_CASE("levy_exponent closed forms") {
    const Vec xi = v1(1.5);

    // killing alone: p = a
    CHECK(levy_exponent(quad1(0.7, 0, 0), xi) == Complex(0.7, 0.0));
    // drift alone: p = -i ell xi
    CHECK(levy_exponent(quad1(0, 2.0, 0), xi) == Complex(0.0, -3.0));
    // diffusion alone: p = q xi^2 / 2
    CHECK(levy_exponent(quad1(0, 0, 2.0), xi) == Complex(2.25, 0.0));

    // one atom inside the cut-off (|y| <= 1): fully compensated
    LevyQuadruple qa = quad1(0, 0, 0);
    qa.N = LevyMeasure::atomic({{0.5, v1(0.5)}});
    const Scalar th = 0.5 * 1.5;
    const Complex expect =
        -0.5 * Complex(std::cos(th) - 1.0, std::sin(th) - th);
    CHECK(std::abs(levy_exponent(qa, xi) - expect) < 1e-15);

    // one atom outside the cut-off: no compensation term
    LevyQuadruple qb = quad1(0, 0, 0);
    qb.N = LevyMeasure::atomic({{2.0, v1(3.0)}});
    const Scalar th2 = 3.0 * 1.5;
    const Complex expect2 = -2.0 * Complex(std::cos(th2) - 1.0, std::sin(th2));
    CHECK(std::abs(levy_exponent(qb, xi) - expect2) < 1e-14);
}

TEST_CASE("worked jump-CIR symbol value") {
    // frozen at x = 2 with lambda = 1, b0 = 1, b1 = 0, sigma^2 = 2, one unit
    // jump of mass 1: p(2, 1) = 4 - e^i - i, independent of the cut-off
    // because the atom compensation cancels against the drift correction.
    const Scalar chi1 = CutoffFunction(1.0).at_norm(1.0);
    LevyQuadruple q;
    q.a = 1.0;
    q.ell = v1(1.0 + 1.0 * 1.0 * chi1);
    q.Q = Mat::Constant(1, 1, 2.0 * 2.0);
    q.N = LevyMeasure::atomic({{1.0, v1(1.0)}});
    const Complex p = levy_exponent(q, v1(1.0));
    const Complex expect = Complex(4.0, -1.0) - std::exp(Complex(0.0, 1.0));
    CHECK(std::abs(p - expect) < 1e-14);
}

TEST_CASE("density measure against a Simpson oracle") {
    auto f = [](Scalar y) { return std::exp(-y * y); };
    LevyMeasure::Density spec;
    spec.density = f;
    spec.support_lo = -2.0;
    spec.support_hi = 2.0;
    spec.total_mass_bound = 2.0;
    const LevyMeasure N = LevyMeasure::from_density(spec);

    // total mass: erf-based value over [-2, 2]
    const Scalar mass_oracle = std::sqrt(M_PI) * std::erf(2.0);
    CHECK(std::abs(N.total_mass() - mass_oracle) < 1e-8);

    const CutoffFunction chi(1.0);
    for (const Scalar xi : {0.3, 1.0, 2.7, -1.8}) {
        const Complex lib = jump_integral(N, v1(xi), chi);
        const Complex oracle = simpson_jump_oracle(f, -2.0, 2.0, xi, chi, 20000);
        CHECK(std::abs(lib - oracle) < 1e-6);
    }

    // chi_compensation = int y chi(y) f(y) dy = 0 by symmetry here
    CHECK(std::abs(chi_compensation(N, chi)[0]) < 1e-8);

    // and for a lopsided density against the antiderivative of y e^{-y}
    LevyMeasure::Density lop;
    lop.density = [](Scalar y) { return std::exp(-y); };
    lop.support_lo = 0.25;
    lop.support_hi = 3.0;
    lop.total_mass_bound = 1.0;
    const LevyMeasure M = LevyMeasure::from_density(lop);
    // int_{0.25}^{1} y e^{-y} dy, cut off at radius 1
    const auto prim = [](Scalar y) { return -(1.0 + y) * std::exp(-y); };
    CHECK(std::abs(chi_compensation(M, chi)[0] - (prim(1.0) - prim(0.25))) < 1e-7);
}

TEST_CASE("no atom at zero") {
    CHECK_THROWS_AS(LevyMeasure::atomic({{1.0, Vec::Zero(1)}}), ConfigError);
    CHECK_THROWS_AS(LevyMeasure::atomic({{-1.0, v1(1.0)}}), ConfigError);
}

TEST_CASE("symbol_eval freezes the characteristics at x") {
    Characteristics c;
    c.id = "site-dependent";
    c.dim = 1;
    c.a = [](const Vec& x) { return x[0] * x[0]; };
    c.ell = [](const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
    c.Q = [](const Vec&) { return Mat::Constant(1, 1, 1.0); };

    const Vec x = v1(3.0);
    const Vec xi = v1(2.0);
    const Complex direct = symbol_eval(c, x, xi);
    const Complex manual = levy_exponent(c.freeze(x), xi);
    CHECK(direct == manual);
    CHECK(direct == Complex(9.0 + 2.0, -12.0));

    // p(x, 0) = a(x) exactly
    CHECK(symbol_eval(c, x, Vec::Zero(1)) == Complex(9.0, 0.0));
}

TEST_CASE("freeze failures become numerical errors naming the coefficient") {
    Characteristics c;
    c.dim = 1;
    c.a = [](const Vec&) -> Scalar { throw std::runtime_error("boom"); };
    try {
        symbol_eval(c, v1(0), v1(1));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("coefficient a") != std::string::npos);
    }
}

TEST_CASE("property: Hermitian symmetry, nonnegative real part, p(0) = a; 10^4 cases") {
    PathRng rng(20260819, 21);
    for (int it = 0; it < 10000; ++it) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform01() * 2.0);
        LevyQuadruple q;
        q.a = 2.0 * rng.uniform01();
        q.ell = Vec(d);
        for (Eigen::Index i = 0; i < d; ++i) q.ell[i] = 4.0 * (rng.uniform01() - 0.5);
        Mat L = Mat::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = 2.0 * (rng.uniform01() - 0.5);
        q.Q = L * L.transpose();
        const int n_atoms = static_cast<int>(rng.uniform01() * 4.0);
        if (n_atoms > 0) {
            std::vector<JumpAtom> atoms;
            for (int k = 0; k < n_atoms; ++k) {
                Vec y(d);
                for (Eigen::Index i = 0; i < d; ++i) y[i] = 3.0 * (rng.uniform01() - 0.5);
                if (y.norm() == 0.0) y[0] = 0.5;
                atoms.push_back({0.01 + 2.0 * rng.uniform01(), y});
            }
            q.N = LevyMeasure::atomic(atoms);
        }
        q.validate();

        Vec xi(d);
        for (Eigen::Index i = 0; i < d; ++i) xi[i] = 12.0 * (rng.uniform01() - 0.5);

        const Complex p = levy_exponent(q, xi);
        const Complex p_neg = levy_exponent(q, (-xi).eval());
        REQUIRE(std::abs(p_neg - std::conj(p)) <= 1e-12 * (1.0 + std::abs(p)));
        REQUIRE(p.real() >= -1e-12);
        REQUIRE(levy_exponent(q, Vec::Zero(d)) == Complex(q.a, 0.0));
    }
}
