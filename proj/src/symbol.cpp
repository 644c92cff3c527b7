#include "ksim/symbol.hpp"

#include "ksim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ksim {

void LevyQuadruple::validate(Scalar psd_tol) const {
    if (!(a >= 0)) throw ConfigError("killing rate a must be >= 0");
    if (Q.size() > 0) {
        if (Q.rows() != dim() || Q.cols() != dim())
            throw ConfigError("Q dimension mismatch with drift");
        if (!psd_check(Q, psd_tol)) throw ConfigError("Q must be symmetric positive semidefinite");
    }
    if (N.total_mass() > 0 && N.dim() != dim())
        throw ConfigError("jump measure dimension mismatch with drift");
}

LevyQuadruple Characteristics::freeze(const Vec& x) const {
    LevyQuadruple q;
    q.chi = chi;
    try {
        q.a = a ? a(x) : 0.0;
    } catch (const std::exception& e) {
        throw NumericalError(std::string("coefficient a failed at x: ") + e.what());
    }
    try {
        q.ell = ell ? ell(x) : Vec::Zero(dim).eval();
    } catch (const std::exception& e) {
        throw NumericalError(std::string("coefficient ell failed at x: ") + e.what());
    }
    try {
        q.Q = Q ? Q(x) : Mat::Zero(dim, dim).eval();
    } catch (const std::exception& e) {
        throw NumericalError(std::string("coefficient Q failed at x: ") + e.what());
    }
    try {
        q.N = N ? N(x) : LevyMeasure();
    } catch (const std::exception& e) {
        throw NumericalError(std::string("coefficient N failed at x: ") + e.what());
    }
    return q;
}

Characteristics Characteristics::constant(std::string id, LevyQuadruple q) {
    Characteristics c;
    c.id = std::move(id);
    c.dim = q.dim();
    c.chi = q.chi;
    const Scalar a = q.a;
    const Vec ell = q.ell;
    const Mat Q = q.Q;
    const LevyMeasure N = q.N;
    c.a = [a](const Vec&) { return a; };
    c.ell = [ell](const Vec&) { return ell; };
    c.Q = [Q](const Vec&) { return Q; };
    c.N = [N](const Vec&) { return N; };
    return c;
}

namespace {

inline Complex e_minus_one_minus_compensator(Scalar theta, Scalar chi_val) {
    // e^{i theta} - 1 - i theta chi
    return Complex(std::cos(theta) - 1.0, std::sin(theta) - theta * chi_val);
}

} // namespace

Complex jump_integral(const LevyMeasure& N, const Vec& xi, const CutoffFunction& chi) {
    if (N.total_mass() == 0.0) return Complex(0, 0);

    if (N.is_atomic()) {
        Complex acc(0, 0);
        for (const JumpAtom& a : N.atoms()) {
            const Scalar theta = a.jump.dot(xi);
            acc += a.mass * e_minus_one_minus_compensator(theta, chi(a.jump));
        }
        return acc;
    }

    // Density kind is one-dimensional. Split the domain at the cut-off
    // boundary (the integrand changes form there) and at 0.
    const auto& den = N.density();
    if (xi.size() != 1) throw ConfigError("density jump measures are one-dimensional");
    const Scalar s = xi[0];
    const Scalar r = chi.radius();
    std::vector<Scalar> cuts = {den.support_lo, den.support_hi};
    for (Scalar c : {-r, 0.0, r})
        if (c > den.support_lo && c < den.support_hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());

    Complex acc(0, 0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        acc += adaptive_simpson(
            [&](Scalar y) {
                return den.density(y) * e_minus_one_minus_compensator(y * s, chi.at_norm(std::abs(y)));
            },
            cuts[i], cuts[i + 1], 1e-8);
    }
    return acc;
}

Vec chi_compensation(const LevyMeasure& N, const CutoffFunction& chi) {
    if (N.total_mass() == 0.0) return Vec::Zero(N.dim());

    if (N.is_atomic()) {
        Vec acc = Vec::Zero(N.dim());
        for (const JumpAtom& a : N.atoms()) acc += a.mass * chi(a.jump) * a.jump;
        return acc;
    }

    const auto& den = N.density();
    const Scalar r = chi.radius();
    const Scalar lo = std::max(den.support_lo, -r);
    const Scalar hi = std::min(den.support_hi, r);
    Vec acc = Vec::Zero(1);
    if (lo >= hi) return acc;
    for (const auto& [l, h] : {std::pair{lo, std::min(hi, 0.0)}, std::pair{std::max(lo, 0.0), hi}}) {
        if (l >= h) continue;
        acc[0] += adaptive_simpson_real([&](Scalar y) { return y * den.density(y); }, l, h, 1e-10);
    }
    return acc;
}

Complex levy_exponent(const LevyQuadruple& q, const Vec& xi) {
    const Scalar drift = q.ell.size() ? q.ell.dot(xi) : 0.0;
    const Scalar quad = q.Q.size() ? 0.5 * xi.dot(q.Q * xi) : 0.0;
    return Complex(q.a + quad, -drift) - jump_integral(q.N, xi, q.chi);
}

Complex symbol_eval(const Characteristics& c, const Vec& x, const Vec& xi) {
    return levy_exponent(c.freeze(x), xi);
}

bool psd_check(const Mat& Q, Scalar tol) {
    if (Q.rows() != Q.cols()) throw ConfigError("psd_check: matrix must be square");
    if (Q.size() == 0) return true;
    const Scalar scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("psd_check: eigenvalue solve failed");
    return es.eigenvalues().minCoeff() >= -tol;
}

} // namespace ksim
