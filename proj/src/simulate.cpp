#include "ksim/simulate.hpp"

#include "ksim/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ksim {

void SimConfig::validate() const {
    if (!(step > 0) || !std::isfinite(step)) throw ConfigError("step must be positive and finite");
    if (!(horizon > 0) || !std::isfinite(horizon))
        throw ConfigError("horizon must be positive and finite");
    if (step > horizon) throw ConfigError("step must not exceed horizon");
    if (!(explosion_norm > 0) || !std::isfinite(explosion_norm))
        throw ConfigError("explosion_norm must be positive and finite");
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    if (horizon / step > 2e9) throw ConfigError("grid too fine: horizon/step exceeds 2e9 steps");
}

bool kill_increment(Scalar a_val, Scalar h, Scalar u) {
    if (a_val < 0) throw NumericalError("killing rate evaluated negative");
    // P(kill in step) = 1 - e^{-a h}, computed without cancellation.
    return u < -std::expm1(-a_val * h);
}

Scalar kill_offset(Scalar a_val, Scalar u) {
    return -std::log1p(-u) / a_val;
}

std::optional<Vec> jump_increment(const LevyMeasure& N_at_x, Scalar h, PathRng& rng) {
    const Scalar lambda = N_at_x.total_mass();
    if (lambda <= 0) return std::nullopt;
    if (rng.uniform01() >= -std::expm1(-lambda * h)) return std::nullopt;
    return N_at_x.sample(rng);
}

std::int64_t grid_steps(Scalar step, Scalar horizon) {
    const Scalar q = horizon / step;
    const auto nearest = static_cast<std::int64_t>(std::llround(q));
    if (nearest >= 1 && std::abs(q - static_cast<Scalar>(nearest)) <= 1e-9 * std::max(1.0, q))
        return nearest;
    return static_cast<std::int64_t>(std::ceil(q));
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace {

// Cholesky factor with a single jitter retry; d = 1 short-circuits so CIR's
// truncated sqrt(max(x,0)) hits no LLT edge cases at the boundary.
Mat diffusion_factor(const Mat& Q) {
    if (Q.rows() == 1) {
        const Scalar q = Q(0, 0);
        if (q < -1e-12) throw NumericalError("diffusion coefficient Q evaluated negative");
        return Mat::Constant(1, 1, std::sqrt(std::max(q, 0.0)));
    }
    Eigen::LLT<Mat> llt(Q);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Mat jittered = Q + 1e-12 * Mat::Identity(Q.rows(), Q.cols());
    Eigen::LLT<Mat> retry(jittered);
    if (retry.info() != Eigen::Success)
        throw NumericalError("diffusion coefficient Q is not positive semidefinite");
    return retry.matrixL();
}

struct StepContext {
    bool hoisted = false;
    LevyMeasure N;
    Vec comp; // integral of y chi(y) N(dy)
};

SamplePath euler_path(const ProcessModel& model, const Vec& x0, const SimConfig& cfg,
                      std::uint64_t path_index) {
    const Characteristics& c = model.chars;
    const Eigen::Index d = x0.size();
    PathRng rng(cfg.seed, path_index);

    const std::int64_t n = grid_steps(cfg.step, cfg.horizon);
    SamplePath path;
    path.grid_step = cfg.step;
    path.times.reserve(static_cast<std::size_t>(n) + 1);
    path.states.reserve(static_cast<std::size_t>(n) + 1);
    path.times.push_back(0.0);
    path.states.push_back(KilledPoint::active(x0));

    StepContext ctx;
    if (model.jumps_state_independent) {
        ctx.hoisted = true;
        ctx.N = c.N ? c.N(x0) : LevyMeasure();
        ctx.comp = ctx.N.total_mass() > 0 ? chi_compensation(ctx.N, c.chi) : Vec::Zero(d).eval();
        if (ctx.N.total_mass() * cfg.step > 0.1 + 1e-12)
            throw ConfigError("jump intensity times step exceeds 0.1; refine the grid");
    }

    Vec x = x0;
    for (std::int64_t k = 0; k < n; ++k) {
        const Scalar t0 = static_cast<Scalar>(k) * cfg.step;
        const Scalar t1 = (k + 1 == n) ? cfg.horizon : static_cast<Scalar>(k + 1) * cfg.step;
        const Scalar h = t1 - t0;

        Vec x_new;
        try {
            // Draw order per step is frozen: kill uniform, Gaussians, jump
            // uniform, jump selection. Everything downstream relies on it.
            if (c.a) {
                const Scalar a_val = c.a(x);
                const Scalar u = rng.uniform01();
                if (kill_increment(a_val, h, u)) {
                    Scalar zeta = t0 + std::min(kill_offset(a_val, u), h);
                    if (zeta <= t0) zeta = std::nextafter(t0, kInf);
                    path.zeta_delta = zeta;
                    path.events.push_back({PathEvent::Kind::Kill, zeta});
                    path.times.push_back(zeta);
                    path.states.push_back(KilledPoint::cemetery(d));
                    return path;
                }
            }

            x_new = x;
            if (c.ell) x_new += h * c.ell(x);
            if (c.Q) {
                Vec z(d);
                for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.gaussian();
                x_new += diffusion_factor(c.Q(x)) * (std::sqrt(h) * z);
            }

            const LevyMeasure* N_here = nullptr;
            if (ctx.hoisted) {
                N_here = &ctx.N;
            } else if (c.N) {
                ctx.N = c.N(x);
                if (ctx.N.total_mass() * h > 0.1 + 1e-12)
                    throw ConfigError("jump intensity times step exceeds 0.1; refine the grid");
                ctx.comp = chi_compensation(ctx.N, c.chi);
                N_here = &ctx.N;
            }
            if (N_here && N_here->total_mass() > 0) {
                x_new -= h * ctx.comp; // ell carries the chi-compensator; undo it
                if (auto y = jump_increment(*N_here, h, rng)) {
                    x_new += *y;
                    path.events.push_back({PathEvent::Kind::Jump, t1});
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const StructuralError&) {
            throw;
        } catch (const std::exception& e) {
            // Coefficient failure: truncate at the last good row, keep the
            // diagnostic for the ensemble driver to aggregate.
            path.diagnostic = e.what();
            return path;
        }

        if (x_new.hasNaN())
            throw NumericalError("state became NaN at t = " + std::to_string(t1));
        if (x_new.norm() >= cfg.explosion_norm) {
            path.zeta_infinity = t1;
            path.events.push_back({PathEvent::Kind::Explode, t1});
            path.times.push_back(t1);
            path.states.push_back(KilledPoint::infinity(d));
            return path;
        }

        path.times.push_back(t1);
        path.states.push_back(KilledPoint::active(x_new));
        x = x_new;
    }
    return path;
}

} // namespace

SamplePath simulate_path(const ProcessModel& model, const Vec& x0, const SimConfig& cfg,
                         std::uint64_t path_index) {
    cfg.validate();
    if (x0.size() != model.chars.dim)
        throw ConfigError("x0 dimension does not match the model");
    if (!model.in_domain(x0)) throw ConfigError("x0 outside the model's declared domain");
    if (x0.norm() >= cfg.explosion_norm)
        throw ConfigError("x0 already beyond explosion_norm");
    if (model.exact_integrator) return model.exact_integrator(x0, cfg, path_index);
    return euler_path(model, x0, cfg, path_index);
}

void for_each_path(const ProcessModel& model, const Vec& x0, const SimConfig& cfg,
                   const std::function<void(std::size_t, const SamplePath&)>& fn) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    const int workers = std::min<int>(resolve_workers(cfg.workers), static_cast<int>(n));

    struct Failure {
        std::size_t index;
        std::exception_ptr error;
    };
    std::vector<Failure> failures;
    std::mutex failures_mutex;

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                const SamplePath p = simulate_path(model, x0, cfg, i);
                if (!p.diagnostic.empty())
                    throw NumericalError("truncated: " + p.diagnostic);
                fn(i, p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                failures.push_back({i, std::current_exception()});
            }
        }
    };

    if (workers <= 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    if (failures.empty()) return;
    std::sort(failures.begin(), failures.end(),
              [](const Failure& a, const Failure& b) { return a.index < b.index; });
    try {
        std::rethrow_exception(failures.front().error);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "path " << failures.front().index << " failed: " << e.what();
        if (failures.size() > 1) msg << " (" << failures.size() - 1 << " more paths failed)";
        throw NumericalError(msg.str());
    }
}

PathEnsemble simulate_ensemble(const ProcessModel& model, const Vec& x0, const SimConfig& cfg) {
    PathEnsemble out;
    out.x0 = x0;
    out.cfg = cfg;
    out.paths.resize(static_cast<std::size_t>(cfg.n_paths));
    for_each_path(model, x0, cfg,
                  [&](std::size_t i, const SamplePath& p) { out.paths[i] = p; });
    return out;
}

} // namespace ksim
