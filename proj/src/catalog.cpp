#include "ksim/catalog.hpp"

#include "ksim/errors.hpp"
#include "ksim/rng.hpp"
#include "ksim/simulate.hpp"
#include "ksim/symbol.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace ksim {

namespace {

std::string known_keys(const std::vector<ParamSpec>& schema) {
    std::ostringstream os;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (i) os << ", ";
        os << schema[i].name;
    }
    return schema.empty() ? std::string("none") : os.str();
}

/// Schema-backed parameter resolution: defaults overlaid with user values,
/// unknown keys rejected by name.
class Params {
public:
    Params(std::string entry, const std::vector<ParamSpec>& schema,
           const std::map<std::string, Scalar>& given)
        : entry_(std::move(entry)) {
        for (const ParamSpec& p : schema) values_[p.name] = p.default_value;
        for (const auto& [key, val] : given) {
            auto it = values_.find(key);
            if (it == values_.end())
                throw ConfigError(entry_ + ": unknown parameter '" + key +
                                  "' (known: " + known_keys(schema) + ")");
            if (!std::isfinite(val))
                throw ConfigError(entry_ + ": parameter '" + key + "' must be finite");
            it->second = val;
        }
    }

    Scalar operator[](const std::string& name) const { return values_.at(name); }
    const std::map<std::string, Scalar>& values() const { return values_; }

    /// Range check, failure message names the violated constraint.
    void require(bool ok, const std::string& constraint) const {
        if (!ok) throw ConfigError(entry_ + ": requires " + constraint);
    }

private:
    std::string entry_;
    std::map<std::string, Scalar> values_;
};

std::string detail(std::initializer_list<std::pair<const char*, Scalar>> vals) {
    std::ostringstream os;
    os << " (";
    bool first = true;
    for (const auto& [k, v] : vals) {
        if (!first) os << ", ";
        os << k << "=" << v;
        first = false;
    }
    os << ")";
    return os.str();
}

Vec vec1(Scalar v) { return Vec::Constant(1, v); }

// Shared skeleton for the exact integrators: grid rows at k*step with the
// final row pinned to the horizon, exactly like the Euler stepper, so mixed
// ensembles line up row for row.
struct GridClock {
    std::int64_t n;
    Scalar step, horizon;

    explicit GridClock(const SimConfig& cfg)
        : n(grid_steps(cfg.step, cfg.horizon)), step(cfg.step), horizon(cfg.horizon) {}

    Scalar at(std::int64_t k) const {
        return k == n ? horizon : static_cast<Scalar>(k) * step;
    }
};

void push_active(SamplePath& p, Scalar t, Scalar x) {
    p.times.push_back(t);
    p.states.push_back(KilledPoint::active(vec1(x)));
}

void push_del(SamplePath& p, Scalar t) {
    p.times.push_back(t);
    p.states.push_back(KilledPoint::cemetery(1));
    p.events.push_back({PathEvent::Kind::Kill, t});
    p.zeta_delta = t;
}

void push_inf(SamplePath& p, Scalar t) {
    p.times.push_back(t);
    p.states.push_back(KilledPoint::infinity(1));
    p.events.push_back({PathEvent::Kind::Explode, t});
    p.zeta_infinity = t;
}

/// Exponential(rate) via one uniform; +inf when the rate vanishes.
Scalar exp_clock(Scalar rate, PathRng& rng) {
    if (!(rate > 0)) return kInf;
    return -std::log1p(-rng.uniform01()) / rate;
}

// ---------------------------------------------------------------- entries

CatalogEntry make_pure_killing(const Params& p) {
    const Scalar a = p["a"];
    p.require(a >= 0, "a >= 0" + detail({{"a", a}}));

    CatalogEntry e;
    e.summary = "motionless state with a constant local killing rate; the symbol is the rate";
    e.default_x0 = vec1(0.0);

    Characteristics c;
    c.id = "pure_killing";
    c.dim = 1;
    c.a = [a](const Vec&) { return a; };
    c.ell = [](const Vec&) { return vec1(0.0); };
    c.Q = [](const Vec&) { return Mat::Zero(1, 1).eval(); };
    e.model = ProcessModel(std::move(c));

    // Draw protocol: one uniform for the whole path (inverse-CDF kill time).
    e.model.exact_integrator = [a](const Vec& x0, const SimConfig& cfg,
                                   std::uint64_t idx) -> SamplePath {
        PathRng rng(cfg.seed, idx);
        SamplePath path;
        path.grid_step = cfg.step;
        push_active(path, 0.0, x0[0]);
        const Scalar tau = exp_clock(a, rng);
        if (tau <= cfg.horizon)
            push_del(path, tau);
        else
            push_active(path, cfg.horizon, x0[0]);
        return path;
    };

    e.closed_form_symbol = [a](const Vec&, const Vec&) { return Complex(a, 0.0); };
    return e;
}

CatalogEntry make_levy_killed(const Params& p) {
    const Scalar a = p["a"], ell = p["ell"], q = p["q"], mass = p["mass"], jump = p["jump"];
    p.require(a >= 0, "a >= 0" + detail({{"a", a}}));
    p.require(q >= 0, "q >= 0" + detail({{"q", q}}));
    p.require(mass >= 0, "mass >= 0" + detail({{"mass", mass}}));
    p.require(mass == 0 || jump != 0, "jump != 0 when mass > 0");

    CatalogEntry e;
    e.summary = "Levy process plus an independent exponential kill clock (constant quadruple)";
    e.default_x0 = vec1(0.0);

    LevyQuadruple quad;
    quad.a = a;
    quad.ell = vec1(ell);
    quad.Q = Mat::Constant(1, 1, q);
    if (mass > 0) quad.N = LevyMeasure::atomic({{mass, vec1(jump)}});
    e.model = ProcessModel(Characteristics::constant("levy_killed", quad));

    const Scalar chi_jump = CutoffFunction(1.0).at_norm(std::abs(jump));
    e.closed_form_symbol = [a, ell, q, mass, jump, chi_jump](const Vec&, const Vec& xi) {
        const Scalar z = xi[0];
        Complex val(a + 0.5 * q * z * z, -ell * z);
        if (mass > 0) {
            const Complex ej(std::cos(jump * z), std::sin(jump * z));
            val -= mass * (ej - Complex(1, 0) - Complex(0, jump * z * chi_jump));
        }
        return val;
    };
    return e;
}

CatalogEntry make_deterministic_kill(const Params&) {
    CatalogEntry e;
    e.summary = "constant state spontaneously killed at t = 1; the compensator is the "
                "predictable unit jump, not an integral of a rate";
    e.default_x0 = vec1(0.0);
    e.symbol_applicable = false;
    e.symbol_note = "killing at the fixed time 1 is predictable but has no local rate: "
                    "P(killed by t)/t is 0 for t < 1, so no symbol in the autonomous sense";

    Characteristics c;
    c.id = "deterministic_kill_at_1";
    c.dim = 1;
    e.model = ProcessModel(std::move(c));

    e.model.exact_integrator = [](const Vec& x0, const SimConfig& cfg,
                                  std::uint64_t) -> SamplePath {
        SamplePath path;
        path.grid_step = cfg.step;
        push_active(path, 0.0, x0[0]);
        if (cfg.horizon >= 1.0)
            push_del(path, 1.0);
        else
            push_active(path, cfg.horizon, x0[0]);
        return path;
    };

    e.model.declared_compensator = [](const SamplePath& path, Scalar t) {
        return path.zeta_delta <= t ? 1.0 : 0.0;
    };
    return e;
}

// X_t = x/(1 - x t): the unique solution of x' = x^2, exploding at 1/x.
struct Superdrift {
    Scalar at(Scalar x0, Scalar t) const { return x0 / (1.0 - x0 * t); }
    Scalar explosion_time(Scalar x0) const { return x0 > 0 ? 1.0 / x0 : kInf; }
};

SamplePath superdrift_path(const Vec& x0v, const SimConfig& cfg, Scalar kill_tau) {
    const Superdrift f;
    const Scalar x0 = x0v[0];
    const Scalar zeta_inf = f.explosion_time(x0);
    const GridClock clock(cfg);

    SamplePath path;
    path.grid_step = cfg.step;
    push_active(path, 0.0, x0);
    for (std::int64_t k = 1; k <= clock.n; ++k) {
        const Scalar t = clock.at(k);
        if (kill_tau <= t && kill_tau <= zeta_inf) {
            push_del(path, kill_tau);
            return path;
        }
        if (zeta_inf <= t) {
            push_inf(path, zeta_inf);
            if (kill_tau <= cfg.horizon) push_del(path, kill_tau);
            return path;
        }
        push_active(path, t, f.at(x0, t));
    }
    return path;
}

CatalogEntry make_superdrift(const Params&) {
    CatalogEntry e;
    e.summary = "deterministic x' = x^2: explodes at exactly 1/x0, never killed";
    e.default_x0 = vec1(1.0);

    Characteristics c;
    c.id = "superdrift";
    c.dim = 1;
    c.a = [](const Vec&) { return 0.0; };
    c.ell = [](const Vec& x) { return vec1(x[0] * x[0]); };
    c.Q = [](const Vec&) { return Mat::Zero(1, 1).eval(); };
    e.model = ProcessModel(std::move(c));
    e.model.domain = std::make_pair(0.0, kInf);

    e.model.exact_integrator = [](const Vec& x0, const SimConfig& cfg, std::uint64_t) {
        return superdrift_path(x0, cfg, kInf);
    };

    e.closed_form_symbol = [](const Vec& x, const Vec& xi) {
        return Complex(0.0, -x[0] * x[0] * xi[0]);
    };
    return e;
}

CatalogEntry make_explosion_plus_exp_kill(const Params& p) {
    const Scalar rate = p["rate"];
    p.require(rate > 0, "rate > 0" + detail({{"rate", rate}}));

    CatalogEntry e;
    e.summary = "superdrift merged with an independent exponential kill clock; the "
                "clock keeps running after the explosion (INF -> DEL transition)";
    e.default_x0 = vec1(1.0);

    Characteristics c;
    c.id = "explosion_plus_exp_kill";
    c.dim = 1;
    c.a = [rate](const Vec&) { return rate; };
    c.ell = [](const Vec& x) { return vec1(x[0] * x[0]); };
    c.Q = [](const Vec&) { return Mat::Zero(1, 1).eval(); };
    e.model = ProcessModel(std::move(c));
    e.model.domain = std::make_pair(0.0, kInf);

    // Draw protocol: one uniform (the kill clock), drawn before stepping.
    e.model.exact_integrator = [rate](const Vec& x0, const SimConfig& cfg, std::uint64_t idx) {
        PathRng rng(cfg.seed, idx);
        return superdrift_path(x0, cfg, exp_clock(rate, rng));
    };

    // The clock is independent of the motion, so A_t = rate * (t ^ zeta_Delta)
    // even while the path sits in INF.
    e.model.declared_compensator = [rate](const SamplePath& path, Scalar t) {
        return rate * std::min(t, path.zeta_delta);
    };

    e.closed_form_symbol = [rate](const Vec& x, const Vec& xi) {
        return Complex(rate, -x[0] * x[0] * xi[0]);
    };
    return e;
}

CatalogEntry make_path_dependent_kill(const Params& p) {
    const Scalar mu = p["mu"], sigma = p["sigma"];
    p.require(sigma >= 0, "sigma >= 0" + detail({{"sigma", sigma}}));

    CatalogEntry e;
    e.summary = "Brownian motion killed at the first grid time it sits below 0, if that "
                "happens before t = 1 (non-Markovian, path-dependent killing)";
    e.default_x0 = vec1(1.0);
    e.symbol_applicable = false;
    e.symbol_note = "the kill decision depends on the path history (dip below 0 before "
                    "t = 1), so the process is not autonomous and has no symbol";

    Characteristics c;
    c.id = "path_dependent_kill";
    c.dim = 1;
    c.ell = [mu](const Vec&) { return vec1(mu); };
    c.Q = [sigma](const Vec&) { return Mat::Constant(1, 1, sigma * sigma).eval(); };
    e.model = ProcessModel(std::move(c));
    e.model.domain = std::make_pair(0.0, kInf);

    // Draw protocol: one Gaussian per grid step, none after the kill.
    e.model.exact_integrator = [mu, sigma](const Vec& x0, const SimConfig& cfg,
                                           std::uint64_t idx) -> SamplePath {
        PathRng rng(cfg.seed, idx);
        const GridClock clock(cfg);
        SamplePath path;
        path.grid_step = cfg.step;
        push_active(path, 0.0, x0[0]);
        Scalar x = x0[0], t_prev = 0.0;
        for (std::int64_t k = 1; k <= clock.n; ++k) {
            const Scalar t = clock.at(k);
            const Scalar h = t - t_prev;
            x += mu * h + sigma * std::sqrt(h) * rng.gaussian();
            if (x < 0 && t < 1.0) {
                push_del(path, t);
                return path;
            }
            push_active(path, t, x);
            t_prev = t;
        }
        return path;
    };

    // Predictable killing (announced by the approach to 0): the compensator
    // of the cemetery indicator is the indicator itself.
    e.model.declared_compensator = [](const SamplePath& path, Scalar t) {
        return path.zeta_delta <= t ? 1.0 : 0.0;
    };
    return e;
}

CatalogEntry make_cir_jump_kill(const Params& p) {
    const Scalar lambda = p["lambda"], b0 = p["b0"], b1 = p["b1"], sigma = p["sigma"];
    const Scalar m1 = p["m_mass"], y1 = p["m_jump"];
    const Scalar m2 = p["m_mass2"], y2 = p["m_jump2"];
    p.require(lambda >= 0, "lambda >= 0" + detail({{"lambda", lambda}}));
    p.require(sigma > 0, "sigma > 0" + detail({{"sigma", sigma}}));
    p.require(b0 >= 0.5 * sigma * sigma,
              "b0 >= sigma^2/2" + detail({{"b0", b0}, {"sigma^2/2", 0.5 * sigma * sigma}}));
    p.require(m1 >= 0, "m_mass >= 0" + detail({{"m_mass", m1}}));
    p.require(m2 >= 0, "m_mass2 >= 0" + detail({{"m_mass2", m2}}));
    p.require(m1 == 0 || y1 > 0, "m_jump > 0 (positive jumps)" + detail({{"m_jump", y1}}));
    p.require(m2 == 0 || y2 > 0, "m_jump2 > 0 (positive jumps)" + detail({{"m_jump2", y2}}));

    CatalogEntry e;
    e.summary = "square-root (CIR) diffusion with positive atomic jumps and a "
                "constant-rate exponential kill clock";
    e.default_x0 = vec1(1.0);

    std::vector<JumpAtom> atoms;
    if (m1 > 0) atoms.push_back({m1, vec1(y1)});
    if (m2 > 0) atoms.push_back({m2, vec1(y2)});
    const LevyMeasure measure =
        atoms.empty() ? LevyMeasure() : LevyMeasure::atomic(std::move(atoms));

    const CutoffFunction chi(1.0);
    Scalar drift_comp = 0.0; // integral of y chi(y) m(dy), turning the SDE
    if (m1 > 0) drift_comp += m1 * y1 * chi.at_norm(y1); // drift into ell
    if (m2 > 0) drift_comp += m2 * y2 * chi.at_norm(y2);

    Characteristics c;
    c.id = "cir_jump_kill";
    c.dim = 1;
    c.a = [lambda](const Vec&) { return lambda; };
    c.ell = [b0, b1, drift_comp](const Vec& x) { return vec1(b0 + b1 * x[0] + drift_comp); };
    // full truncation: the diffusion coefficient is flattened at 0 so paths
    // that overshoot below 0 still step
    c.Q = [sigma](const Vec& x) {
        return Mat::Constant(1, 1, sigma * sigma * std::max(x[0], 0.0)).eval();
    };
    if (measure.total_mass() > 0) c.N = [measure](const Vec&) { return measure; };
    e.model = ProcessModel(std::move(c));
    e.model.domain = std::make_pair(0.0, kInf);

    e.closed_form_symbol = [lambda, b0, b1, sigma, m1, y1, m2, y2](const Vec& x, const Vec& xi) {
        const Scalar z = xi[0];
        Complex val(lambda + 0.5 * sigma * sigma * x[0] * z * z, -(b0 + b1 * x[0]) * z);
        if (m1 > 0) val -= m1 * (Complex(std::cos(y1 * z), std::sin(y1 * z)) - Complex(1, 0));
        if (m2 > 0) val -= m2 * (Complex(std::cos(y2 * z), std::sin(y2 * z)) - Complex(1, 0));
        return val;
    };
    return e;
}

CatalogEntry make_dangerous_areas(const Params& p) {
    const Scalar a_scale = p["a_scale"];
    const Scalar c0 = p["phi_c0"], c1 = p["phi_c1"];
    const Scalar dl = p["drv_ell"], dq = p["drv_q"], dm = p["drv_mass"], dw = p["drv_jump"];
    p.require(a_scale >= 0, "a_scale >= 0" + detail({{"a_scale", a_scale}}));
    p.require(dq >= 0, "drv_q >= 0" + detail({{"drv_q", dq}}));
    p.require(dm >= 0, "drv_mass >= 0" + detail({{"drv_mass", dm}}));
    p.require(dm == 0 || dw != 0, "drv_jump != 0 when drv_mass > 0");
    p.require(dm == 0 || (c0 > 0 && c0 + c1 > 0),
              "phi_c0 > 0 and phi_c0 + phi_c1 > 0 when the driver jumps (the image "
              "atom phi(x)*drv_jump must stay away from 0)" +
                  detail({{"phi_c0", c0}, {"phi_c1", c1}}));

    CatalogEntry e;
    e.summary = "Levy-driven SDE dX = phi(X-) dZ with a bounded continuous killing "
                "rate a(x) = a_scale/(1+x^2); symbol a(x) + psi(phi(x) xi)";
    e.default_x0 = vec1(0.0);

    auto phi = [c0, c1](Scalar x) { return c0 + c1 / (1.0 + x * x); };
    const CutoffFunction chi(1.0);
    const Scalar chi_dw = chi.at_norm(std::abs(dw));

    Characteristics c;
    c.id = "dangerous_areas";
    c.dim = 1;
    c.a = [a_scale](const Vec& x) { return a_scale / (1.0 + x[0] * x[0]); };
    // Rewriting psi(phi(x) xi) in canonical form moves the jump compensation
    // between cut-off radii: ell = phi ell_d + m phi w [chi(phi w) - chi(w)].
    c.ell = [phi, dl, dm, dw, chi, chi_dw](const Vec& x) {
        const Scalar f = phi(x[0]);
        Scalar v = f * dl;
        if (dm > 0) v += dm * f * dw * (chi.at_norm(std::abs(f * dw)) - chi_dw);
        return vec1(v);
    };
    c.Q = [phi, dq](const Vec& x) {
        const Scalar f = phi(x[0]);
        return Mat::Constant(1, 1, f * f * dq).eval();
    };
    if (dm > 0) {
        c.N = [phi, dm, dw](const Vec& x) {
            return LevyMeasure::atomic({{dm, vec1(phi(x[0]) * dw)}});
        };
    }
    e.model = ProcessModel(std::move(c));
    e.model.jumps_state_independent = dm == 0 || c1 == 0;

    e.closed_form_symbol = [a_scale, phi, dl, dq, dm, dw, chi_dw](const Vec& x, const Vec& xi) {
        const Scalar eta = phi(x[0]) * xi[0];
        Complex psi(0.5 * dq * eta * eta, -dl * eta);
        if (dm > 0) {
            const Complex ej(std::cos(dw * eta), std::sin(dw * eta));
            psi -= dm * (ej - Complex(1, 0) - Complex(0, dw * eta * chi_dw));
        }
        return Complex(a_scale / (1.0 + x[0] * x[0]), 0.0) + psi;
    };
    return e;
}

CatalogEntry make_counterexample_sqrt(const Params&) {
    CatalogEntry e;
    e.summary = "deterministic sqrt(t) motion with the dyadic staircase kill law "
                "P(zeta <= 4^-j) = 2^-j; P(killed by t)/sqrt(t) oscillates between "
                "1 and 1/2, so the small-time symbol limit does not exist";
    e.default_x0 = vec1(0.0);
    e.symbol_applicable = false;
    e.symbol_note = "the defining limit -(E e_xi(X_t - x) - 1)/t has subsequential "
                    "limits that differ (probe values 1 at t = 4^-j vs 1/2 just "
                    "below); no symbol exists at x = 0";

    Characteristics c;
    c.id = "counterexample_sqrt";
    c.dim = 1;
    e.model = ProcessModel(std::move(c));
    e.model.domain = std::make_pair(0.0, 0.0);

    // Draw protocol: one uniform; the kill time is 4^-j where j is the
    // staircase level picked by the inverse CDF (exact dyadic arithmetic).
    e.model.exact_integrator = [](const Vec&, const SimConfig& cfg,
                                  std::uint64_t idx) -> SamplePath {
        PathRng rng(cfg.seed, idx);
        const Scalar u = rng.uniform01();
        int j = 0;
        while (u < std::ldexp(1.0, -(j + 1))) ++j;
        const Scalar zeta = std::ldexp(1.0, -2 * j);

        const GridClock clock(cfg);
        SamplePath path;
        path.grid_step = cfg.step;
        push_active(path, 0.0, 0.0);
        for (std::int64_t k = 1; k <= clock.n; ++k) {
            const Scalar t = clock.at(k);
            if (zeta <= t) {
                push_del(path, zeta);
                return path;
            }
            push_active(path, t, std::sqrt(t));
        }
        if (zeta <= cfg.horizon) push_del(path, zeta);
        return path;
    };
    return e;
}

struct EntryDef {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> schema;
    CatalogEntry (*build)(const Params&);
};

const std::vector<EntryDef>& registry() {
    static const std::vector<EntryDef> defs = {
        {"pure_killing",
         "motionless state with a constant local killing rate",
         {{"a", 1.0, "a >= 0"}},
         &make_pure_killing},
        {"levy_killed",
         "Levy process plus an independent exponential kill clock",
         {{"a", 1.0, "a >= 0"},
          {"ell", 0.5, ""},
          {"q", 1.0, "q >= 0"},
          {"mass", 0.5, "mass >= 0"},
          {"jump", 1.0, "jump != 0 when mass > 0"}},
         &make_levy_killed},
        {"deterministic_kill_at_1",
         "constant state spontaneously killed at t = 1 (predictable unit-jump compensator)",
         {},
         &make_deterministic_kill},
        {"explosion_plus_exp_kill",
         "superdrift merged with an independent exponential kill clock (INF -> DEL)",
         {{"rate", 1.0, "rate > 0"}},
         &make_explosion_plus_exp_kill},
        {"path_dependent_kill",
         "Brownian motion killed at its first dip below 0 before t = 1 (non-Markovian)",
         {{"mu", 0.0, ""}, {"sigma", 1.0, "sigma >= 0"}},
         &make_path_dependent_kill},
        {"superdrift",
         "deterministic x' = x^2, explosion at 1/x0, zero killing rate",
         {},
         &make_superdrift},
        {"cir_jump_kill",
         "jump-CIR square-root diffusion with exponential killing",
         {{"lambda", 1.0, "lambda >= 0"},
          {"b0", 2.0, "b0 >= sigma^2/2"},
          {"b1", -0.5, ""},
          {"sigma", 1.0, "sigma > 0"},
          {"m_mass", 1.0, "m_mass >= 0"},
          {"m_jump", 1.0, "m_jump > 0"},
          {"m_mass2", 0.0, "m_mass2 >= 0"},
          {"m_jump2", 2.0, "m_jump2 > 0"}},
         &make_cir_jump_kill},
        {"dangerous_areas",
         "Levy-driven SDE dX = phi(X-) dZ with killing rate a_scale/(1+x^2)",
         {{"a_scale", 1.0, "a_scale >= 0"},
          {"phi_c0", 1.0, "phi stays positive when the driver jumps"},
          {"phi_c1", 0.0, "phi stays positive when the driver jumps"},
          {"drv_ell", 0.0, ""},
          {"drv_q", 1.0, "drv_q >= 0"},
          {"drv_mass", 0.0, "drv_mass >= 0"},
          {"drv_jump", 1.0, "drv_jump != 0 when drv_mass > 0"}},
         &make_dangerous_areas},
        {"counterexample_sqrt",
         "deterministic sqrt(t) with the dyadic staircase kill law (no symbol limit)",
         {},
         &make_counterexample_sqrt},
    };
    return defs;
}

} // namespace

Complex CatalogEntry::closed_form(const Vec& x, const Vec& xi) const {
    if (!symbol_applicable)
        throw ConfigError("symbol not applicable for catalog entry '" + name +
                          "': " + symbol_note);
    if (x.size() != model.chars.dim || xi.size() != model.chars.dim)
        throw ConfigError("closed_form: x/xi dimension mismatch for entry '" + name + "'");
    if (!model.in_domain(x)) {
        std::ostringstream os;
        os << "closed_form: x = " << x[0] << " outside the domain of entry '" << name << "'";
        throw ConfigError(os.str());
    }
    return closed_form_symbol(x, xi);
}

CatalogEntry catalog_lookup(const std::string& name, const std::map<std::string, Scalar>& params) {
    for (const EntryDef& def : registry()) {
        if (def.name != name) continue;
        Params p(def.name, def.schema, params);
        CatalogEntry e = def.build(p);
        e.name = def.name;
        e.schema = def.schema;
        e.resolved_params = p.values();
        return e;
    }
    std::ostringstream os;
    os << "unknown catalog entry '" << name << "'; known entries:";
    for (const EntryDef& def : registry()) os << " " << def.name;
    throw ConfigError(os.str());
}

const std::vector<CatalogInfo>& catalog_list() {
    static const std::vector<CatalogInfo> infos = [] {
        std::vector<CatalogInfo> out;
        for (const EntryDef& def : registry()) out.push_back({def.name, def.summary, def.schema});
        return out;
    }();
    return infos;
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const EntryDef& def : registry()) out.push_back(def.name);
    return out;
}

} // namespace ksim
