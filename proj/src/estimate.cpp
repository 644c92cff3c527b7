#include "ksim/estimate.hpp"

#include "ksim/errors.hpp"
#include "ksim/generator.hpp"
#include "ksim/killed_point.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace ksim {

namespace {

void validate_ladder(const std::vector<Scalar>& t_seq, const SimConfig& cfg) {
    if (t_seq.empty()) throw ConfigError("t_seq empty");
    for (std::size_t j = 0; j < t_seq.size(); ++j) {
        if (!(t_seq[j] > 0)) throw ConfigError("t_seq entries must be positive");
        if (j > 0 && !(t_seq[j] < t_seq[j - 1]))
            throw ConfigError("t_seq must be strictly decreasing");
    }
    if (t_seq.front() > cfg.horizon * (1 + 1e-12))
        throw ConfigError("t_seq exceeds the simulation horizon");
}

struct LadderAccumulator {
    std::vector<Complex> readouts; // n_paths x n_t, row-major per path
    std::vector<char> stopped_early;
};

/// Shared ladder engine: one streamed ensemble, one complex readout per
/// (path, t). The readout receives the path and its precomputed exit time
/// sigma of B(x, radius) (radius <= 0 disables stopping, sigma = +inf).
SymbolEstimate run_ladder(const ProcessModel& model, const Vec& x, Scalar radius,
                          const std::vector<Scalar>& t_seq, const SimConfig& cfg,
                          const std::function<Complex(const SamplePath&, Scalar, Scalar)>& readout) {
    validate_ladder(t_seq, cfg);
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    const std::size_t m = t_seq.size();

    LadderAccumulator acc;
    acc.readouts.resize(n * m);
    acc.stopped_early.assign(n, 0);
    const Scalar t_min = t_seq.back();

    for_each_path(model, x, cfg, [&](std::size_t i, const SamplePath& path) {
        const Scalar sigma = radius > 0 ? first_exit_time(path, x, radius) : kInf;
        if (sigma < t_min) acc.stopped_early[i] = 1;
        for (std::size_t j = 0; j < m; ++j)
            acc.readouts[i * m + j] = readout(path, t_seq[j], sigma);
    });

    SymbolEstimate est;
    est.t_used = t_seq;
    est.n_paths = cfg.n_paths;
    est.ladder_means.assign(m, Complex(0, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) est.ladder_means[j] += acc.readouts[i * m + j];
    for (std::size_t j = 0; j < m; ++j) est.ladder_means[j] /= static_cast<Scalar>(n);

    std::size_t n_early = 0;
    for (char f : acc.stopped_early) n_early += static_cast<std::size_t>(f);
    est.stopping_dominated = 2 * n_early > n;

    // Per-path extrapolated statistic Y_i = sum_j w_j q_ij; its mean is the
    // least-squares intercept exactly, and its spread gives the honest SE.
    std::vector<Scalar> w;
    if (m >= 2) {
        w = richardson_weights(t_seq);
        est.extrapolated = true;
    } else {
        w = {1.0};
    }

    auto se_of = [&](const std::vector<Scalar>& weights, Complex& mean_out) -> Scalar {
        Complex mean(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            Complex y(0, 0);
            for (std::size_t j = 0; j < weights.size(); ++j)
                y += weights[j] * acc.readouts[i * m + j];
            mean += y;
        }
        mean /= static_cast<Scalar>(n);
        mean_out = mean;
        if (n < 2) return 0.0;
        Scalar ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex y(0, 0);
            for (std::size_t j = 0; j < weights.size(); ++j)
                y += weights[j] * acc.readouts[i * m + j];
            ss += std::norm(y - mean);
        }
        return std::sqrt(ss / (static_cast<Scalar>(n) * static_cast<Scalar>(n - 1)));
    };

    est.std_error = se_of(w, est.value);

    std::vector<Scalar> w_raw(m, 0.0);
    w_raw.back() = 1.0;
    est.std_error_raw = se_of(w_raw, est.value_raw);
    return est;
}

Complex e_xi_diff(const KilledPoint& s, const Vec& x, const Vec& xi) {
    if (!s.is_active()) return Complex(0, 0);
    const Scalar theta = (s.coords() - x).dot(xi);
    return Complex(std::cos(theta), std::sin(theta));
}

} // namespace

SymbolEstimate estimate_symbol(const ProcessModel& model, const Vec& x, const Vec& xi,
                               Scalar radius, const std::vector<Scalar>& t_seq,
                               const SimConfig& cfg) {
    if (!(radius > 0)) throw ConfigError("estimate_symbol: radius must be > 0");
    if (xi.size() != x.size()) throw ConfigError("estimate_symbol: xi dimension mismatch");
    return run_ladder(model, x, radius, t_seq, cfg,
                      [&x, &xi](const SamplePath& path, Scalar t, Scalar sigma) -> Complex {
                          const Scalar s = std::min(t, sigma);
                          const Complex e = e_xi_diff(path.state_at(s), x, xi);
                          return -(e - Complex(1, 0)) / t;
                      });
}

SymbolEstimate estimate_killing_rate(const ProcessModel& model, const Vec& x,
                                     const std::vector<Scalar>& t_seq, const SimConfig& cfg) {
    return run_ladder(model, x, /*radius=*/0.0, t_seq, cfg,
                      [](const SamplePath& path, Scalar t, Scalar) -> Complex {
                          return Complex(path.state_at(t).is_del() ? 1.0 / t : 0.0, 0.0);
                      });
}

Scalar accumulate_fourth(const SamplePath& path, const std::function<Scalar(const Vec&)>& a,
                         Scalar t) {
    if (!a) return 0.0;
    const Scalar stop = std::min(t, path.zeta_delta);
    Scalar acc = 0.0;
    Scalar prev_t = 0.0, prev_a = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const Scalar ti = path.times[i];
        const KilledPoint& s = path.states[i];
        if (ti > stop) break;
        if (!s.is_active()) {
            // left-endpoint stub onto the cemetery (or INF) row
            if (have_prev) acc += prev_a * (ti - prev_t);
            return acc;
        }
        const Scalar ai = a(s.coords());
        if (have_prev) acc += 0.5 * (prev_a + ai) * (ti - prev_t);
        prev_t = ti;
        prev_a = ai;
        have_prev = true;
    }
    // partial interval up to stop (piecewise-constant reading of the state)
    if (have_prev && stop > prev_t && std::isfinite(stop)) acc += prev_a * (stop - prev_t);
    return acc;
}

ResidualReport compensator_residual(const ProcessModel& model, const Vec& x, Scalar t,
                                    const SimConfig& cfg,
                                    const std::function<Scalar(const Vec&)>& a_override) {
    if (!(t > 0) || t > cfg.horizon * (1 + 1e-12))
        throw ConfigError("compensator_residual: t must lie in (0, horizon]");
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    std::vector<Scalar> vals(n);
    const auto& a_fn = a_override ? a_override : model.chars.a;

    for_each_path(model, x, cfg, [&](std::size_t i, const SamplePath& path) {
        const Scalar indicator = path.state_at(t).is_del() ? 1.0 : 0.0;
        const Scalar A = model.declared_compensator ? model.declared_compensator(path, t)
                                                    : accumulate_fourth(path, a_fn, t);
        vals[i] = indicator - A;
    });

    ResidualReport rep;
    rep.n_paths = cfg.n_paths;
    Scalar mean = 0;
    for (Scalar v : vals) mean += v;
    mean /= static_cast<Scalar>(n);
    Scalar ss = 0;
    for (Scalar v : vals) ss += (v - mean) * (v - mean);
    rep.statistic = mean;
    rep.std_error = n > 1 ? std::sqrt(ss / (static_cast<Scalar>(n) * static_cast<Scalar>(n - 1)))
                          : 0.0;
    rep.pass = rep.std_error > 0 ? std::abs(rep.statistic) <= rep.z * rep.std_error + rep.budget
                                 : std::abs(rep.statistic) <= rep.budget + 1e-12;
    return rep;
}

ResidualReport martingale_problem_residual(const ProcessModel& model, const TestFunction& u,
                                           const Vec& x, Scalar t, const SimConfig& cfg,
                                           Scalar budget_C) {
    if (!(t > 0) || t > cfg.horizon * (1 + 1e-12))
        throw ConfigError("martingale_problem_residual: t must lie in (0, horizon]");
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    std::vector<Scalar> vals(n);
    const Scalar u0 = u.evaluator(x);

    for_each_path(model, x, cfg, [&](std::size_t i, const SamplePath& path) {
        const KilledPoint& st = path.state_at(t);
        const Scalar u_t = st.is_active() ? u.evaluator(st.coords()) : 0.0;

        // trapezoid of A u along recorded Active rows, stub at cemeteries
        Scalar integ = 0.0;
        Scalar prev_t = 0.0, prev_g = 0.0;
        bool have_prev = false;
        for (std::size_t k = 0; k < path.times.size(); ++k) {
            const Scalar tk = path.times[k];
            const KilledPoint& s = path.states[k];
            if (tk > t) break;
            if (!s.is_active()) {
                if (have_prev) integ += prev_g * (tk - prev_t);
                have_prev = false;
                prev_t = tk;
                prev_g = 0.0; // A u vanishes on the cemeteries
                continue;
            }
            const Scalar g = apply_generator(model.chars, u, s.coords());
            if (have_prev) integ += 0.5 * (prev_g + g) * (tk - prev_t);
            prev_t = tk;
            prev_g = g;
            have_prev = true;
        }
        if (t > prev_t) integ += prev_g * (t - prev_t);

        vals[i] = u_t - u0 - integ;
    });

    ResidualReport rep;
    rep.n_paths = cfg.n_paths;
    rep.budget = budget_C * cfg.step;
    Scalar mean = 0;
    for (Scalar v : vals) mean += v;
    mean /= static_cast<Scalar>(n);
    Scalar ss = 0;
    for (Scalar v : vals) ss += (v - mean) * (v - mean);
    rep.statistic = mean;
    rep.std_error = n > 1 ? std::sqrt(ss / (static_cast<Scalar>(n) * static_cast<Scalar>(n - 1)))
                          : 0.0;
    rep.pass = rep.std_error > 0 ? std::abs(rep.statistic) <= rep.z * rep.std_error + rep.budget
                                 : std::abs(rep.statistic) <= rep.budget + 1e-12;
    return rep;
}

std::vector<Scalar> richardson_weights(const std::vector<Scalar>& ts) {
    if (ts.size() < 2) throw ConfigError("richardson extrapolation needs at least 2 points");
    const auto m = static_cast<Eigen::Index>(ts.size());
    Mat X(m, 2);
    for (Eigen::Index j = 0; j < m; ++j) {
        X(j, 0) = 1.0;
        X(j, 1) = ts[static_cast<std::size_t>(j)];
    }
    const Mat G = (X.transpose() * X).inverse();
    const Vec w = (G * X.transpose()).row(0).transpose();
    return std::vector<Scalar>(w.data(), w.data() + w.size());
}

Complex richardson_extrapolate(const std::vector<Complex>& values,
                               const std::vector<Scalar>& ts) {
    if (values.size() != ts.size())
        throw ConfigError("richardson extrapolation: values/ts size mismatch");
    const std::vector<Scalar> w = richardson_weights(ts);
    Complex acc(0, 0);
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * values[j];
    return acc;
}

Scalar counterexample_kill_cdf(Scalar t) {
    if (!(t > 0)) throw ConfigError("counterexample CDF: t must be > 0");
    if (t >= 1.0) return 1.0;
    // find minimal k >= 1 with t >= 4^{-k}; F = 2^{-k} there (exact dyadics)
    int k = 1;
    while (t < std::ldexp(1.0, -2 * k)) {
        ++k;
        if (k > 600) return 0.0; // subnormal territory: F below 2^{-600}
    }
    return std::ldexp(1.0, -k);
}

std::vector<Scalar> counterexample_probe(const std::vector<Scalar>& t_seq) {
    std::vector<Scalar> out;
    out.reserve(t_seq.size());
    for (Scalar t : t_seq) out.push_back(counterexample_kill_cdf(t) / std::sqrt(t));
    return out;
}

} // namespace ksim
