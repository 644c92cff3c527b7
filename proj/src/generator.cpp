#include "ksim/generator.hpp"

#include "ksim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ksim {

Scalar apply_generator(const Characteristics& c, const TestFunction& u, const Vec& x) {
    if (x.size() != c.dim || u.dim != c.dim)
        throw ConfigError("apply_generator: dimension mismatch");
    const LevyQuadruple q = c.freeze(x);

    const Scalar u_x = u.evaluator(x);
    const Vec grad = u.gradient(x);
    Scalar acc = -q.a * u_x;
    if (q.ell.size()) acc += q.ell.dot(grad);
    if (q.Q.size()) acc += 0.5 * (q.Q * u.hessian(x)).trace();

    if (q.N.total_mass() > 0) {
        if (q.N.is_atomic()) {
            for (const JumpAtom& atom : q.N.atoms())
                acc += atom.mass *
                       (u.evaluator(x + atom.jump) - u_x - grad.dot(atom.jump) * q.chi(atom.jump));
        } else {
            const auto& den = q.N.density();
            const Scalar r = q.chi.radius();
            std::vector<Scalar> cuts = {den.support_lo, den.support_hi};
            for (Scalar cut : {-r, 0.0, r})
                if (cut > den.support_lo && cut < den.support_hi) cuts.push_back(cut);
            std::sort(cuts.begin(), cuts.end());
            const Scalar x0 = x[0], g0 = grad[0];
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                acc += adaptive_simpson_real(
                    [&](Scalar y) {
                        return den.density(y) *
                               (u.evaluator(Vec::Constant(1, x0 + y)) - u_x -
                                g0 * y * q.chi.at_norm(std::abs(y)));
                    },
                    cuts[i], cuts[i + 1], 1e-8);
            }
        }
    }
    return acc;
}

FreqGrid FreqGrid::for_function(const TestFunction& u) {
    FreqGrid g;
    // Support radius 8s for the tapered Gaussian: hat decays like
    // exp(-s^2 xi^2 / 2), so xi_max = 60 / support covers exp(-28) before
    // the symbol's xi^2 growth; never drop below 12.
    const Scalar s_proxy = u.support_radius / 8.0;
    g.xi_max = std::max(12.0, 7.5 / std::max(s_proxy, 1e-6));
    return g;
}

std::vector<Complex> fourier_transform(const TestFunction& u, const std::vector<Scalar>& xi_nodes,
                                       int n_y) {
    if (u.dim != 1) throw ConfigError("fourier_transform: implemented for d = 1");
    const int n = n_y;
    const Scalar lo = u.center[0] - u.support_radius;
    const Scalar hi = u.center[0] + u.support_radius;
    const Scalar dy = (hi - lo) / n;

    std::vector<Scalar> vals(static_cast<std::size_t>(n) + 1);
    std::vector<Scalar> ys(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const Scalar y = lo + k * dy;
        ys[static_cast<std::size_t>(k)] = y;
        vals[static_cast<std::size_t>(k)] = u.evaluator(Vec::Constant(1, y));
    }

    const Scalar norm = 1.0 / (2.0 * M_PI);
    std::vector<Complex> out(xi_nodes.size());
    for (std::size_t j = 0; j < xi_nodes.size(); ++j) {
        const Scalar xi = xi_nodes[j];
        Complex acc(0, 0);
        for (int k = 0; k <= n; ++k) {
            const Scalar w = (k == 0 || k == n) ? 0.5 : 1.0;
            const Scalar theta = -ys[static_cast<std::size_t>(k)] * xi;
            acc += w * vals[static_cast<std::size_t>(k)] * Complex(std::cos(theta), std::sin(theta));
        }
        out[j] = acc * (dy * norm);
    }
    return out;
}

FourierContext make_fourier_context(const TestFunction& u, const FreqGrid& grid) {
    if (grid.n_xi < 16 || grid.n_y < 16 || !(grid.xi_max > 0))
        throw ConfigError("make_fourier_context: degenerate grid");
    FourierContext ctx;
    ctx.grid = grid;
    ctx.xi_nodes.resize(static_cast<std::size_t>(grid.n_xi) + 1);
    const Scalar dxi = 2.0 * grid.xi_max / grid.n_xi;
    for (int j = 0; j <= grid.n_xi; ++j)
        ctx.xi_nodes[static_cast<std::size_t>(j)] = -grid.xi_max + j * dxi;
    ctx.u_hat = fourier_transform(u, ctx.xi_nodes, grid.n_y);

    // Doubling self-check on a thinned probe set: the y-trapezoid must be
    // resolution-converged or the duality gate would be meaningless.
    std::vector<Scalar> probes;
    for (std::size_t j = 0; j < ctx.xi_nodes.size(); j += ctx.xi_nodes.size() / 16 + 1)
        probes.push_back(ctx.xi_nodes[j]);
    const std::vector<Complex> coarse = fourier_transform(u, probes, grid.n_y);
    const std::vector<Complex> fine = fourier_transform(u, probes, 2 * grid.n_y);
    for (std::size_t j = 0; j < probes.size(); ++j)
        if (std::abs(coarse[j] - fine[j]) > 1e-9)
            throw NumericalError("fourier_transform: doubling test failed; y-grid under-resolved");
    return ctx;
}

FourierApply apply_generator_fourier_ctx(const Characteristics& c, const Vec& x,
                                         const FourierContext& ctx) {
    if (c.dim != 1 || x.size() != 1)
        throw ConfigError("apply_generator_fourier: implemented for d = 1");
    const LevyQuadruple q = c.freeze(x);
    const Scalar dxi = ctx.xi_nodes[1] - ctx.xi_nodes[0];
    Complex acc(0, 0);
    Vec xi_vec(1);
    for (std::size_t j = 0; j < ctx.xi_nodes.size(); ++j) {
        const Scalar xi = ctx.xi_nodes[j];
        xi_vec[0] = xi;
        const Scalar w = (j == 0 || j + 1 == ctx.xi_nodes.size()) ? 0.5 : 1.0;
        const Complex p = levy_exponent(q, xi_vec);
        const Scalar theta = x[0] * xi;
        acc += w * Complex(std::cos(theta), std::sin(theta)) * p * ctx.u_hat[j];
    }
    acc *= -dxi;
    return {acc.real(), acc.imag()};
}

Scalar apply_generator_fourier(const Characteristics& c, const TestFunction& u, const Vec& x,
                               const FreqGrid& grid) {
    const FourierContext ctx = make_fourier_context(u, grid);
    const FourierApply r = apply_generator_fourier_ctx(c, x, ctx);
    if (std::abs(r.imag_residue) > 1e-6)
        throw NumericalError("apply_generator_fourier: imaginary residue " +
                             std::to_string(r.imag_residue) + " exceeds 1e-6 (grid too coarse?)");
    return r.value;
}

} // namespace ksim
