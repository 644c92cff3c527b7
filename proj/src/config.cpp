#include "ksim/config.hpp"

#include "ksim/errors.hpp"
#include "ksim/expr.hpp"
#include "ksim/levy_measure.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

namespace ksim {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
}

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (key == k) known = true;
        if (!known) {
            std::ostringstream os;
            os << "unknown key '" << key << "' (allowed:";
            for (const char* k : allowed) os << " " << k;
            os << ")";
            fail(path, os.str());
        }
    }
}

Scalar get_num(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    return j.get<Scalar>();
}

std::int64_t get_int(const Json& j, const std::string& path) {
    const Scalar v = get_num(j, path);
    if (v != std::floor(v) || std::abs(v) > 9e15) fail(path, "must be an integer");
    return static_cast<std::int64_t>(v);
}

std::string get_str(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "must be a string");
    return j.get<std::string>();
}

Vec get_vec(const Json& j, const std::string& path, Eigen::Index dim) {
    if (!j.is_array()) fail(path, "must be an array of numbers");
    if (static_cast<Eigen::Index>(j.size()) != dim) {
        std::ostringstream os;
        os << "expected " << dim << " entries, got " << j.size();
        fail(path, os.str());
    }
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v[i] = get_num(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
    return v;
}

std::vector<Vec> get_vec_list(const Json& j, const std::string& path, Eigen::Index dim) {
    if (!j.is_array()) fail(path, "must be an array of d-vectors");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_vec(j[i], path + "/" + std::to_string(i), dim));
    return out;
}

std::vector<Scalar> get_num_list(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "must be an array of numbers");
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_num(j[i], path + "/" + std::to_string(i)));
    return out;
}

/// Wrap a compiled expression tape as a scalar coefficient; the scratch
/// stack is thread-local so shared closures never contend.
std::function<Scalar(const Vec&)> scalar_fn(CompiledExpr e) {
    return [e = std::move(e)](const Vec& x) {
        thread_local std::vector<Scalar> stack;
        return e.eval(x, stack);
    };
}

CompiledExpr compile_at(const Json& j, const std::string& path, int dim) {
    const std::string text = get_str(j, path);
    try {
        return compile_expr(text, dim);
    } catch (const ConfigError& err) {
        fail(path, std::string("bad expression: ") + err.what());
    }
}

/// a(x) >= 0 spot check on an axis grid through x0 (a check, not a proof).
void spot_check_nonnegative(const CompiledExpr& a, const Vec& x0, const std::string& path) {
    std::vector<Vec> grid;
    grid.push_back(x0);
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        for (int k = -20; k <= 20; ++k) {
            Vec x = x0;
            x[i] += 0.5 * k;
            grid.push_back(x);
        }
    }
    const NonnegativityReport rep = check_nonnegative(a, grid);
    if (!rep.violations.empty()) {
        std::ostringstream os;
        os << "killing rate evaluates negative at x = " << rep.violations.front().first[0]
           << " (value " << rep.violations.front().second << "); a(x) must be >= 0";
        fail(path, os.str());
    }
    if (!rep.errors.empty())
        fail(path, "killing rate failed to evaluate at x = " +
                       std::to_string(rep.errors.front().first[0]) + ": " +
                       rep.errors.front().second);
}

ProcessModel parse_custom(const Json& j, const std::string& path, Json& canon) {
    require_object(j, path);
    check_keys(j, path, {"dim", "a", "ell", "Q", "jumps", "chi_radius"});

    const int dim =
        j.contains("dim") ? static_cast<int>(get_int(j["dim"], path + "/dim")) : 1;
    if (dim < 1 || dim > 16) fail(path + "/dim", "must be in 1..16");
    canon["dim"] = dim;

    Characteristics c;
    c.id = "custom";
    c.dim = dim;

    const Scalar chi_radius =
        j.contains("chi_radius") ? get_num(j["chi_radius"], path + "/chi_radius") : 1.0;
    if (!(chi_radius > 0)) fail(path + "/chi_radius", "must be > 0");
    c.chi = CutoffFunction(chi_radius);
    canon["chi_radius"] = chi_radius;

    if (j.contains("a")) {
        c.a = scalar_fn(compile_at(j["a"], path + "/a", dim));
        canon["a"] = j["a"];
    }

    if (j.contains("ell")) {
        const Json& je = j["ell"];
        if (!je.is_array() || static_cast<int>(je.size()) != dim)
            fail(path + "/ell", "must be an array of dim expression strings");
        std::vector<CompiledExpr> comps;
        for (int i = 0; i < dim; ++i)
            comps.push_back(compile_at(je[static_cast<std::size_t>(i)],
                                       path + "/ell/" + std::to_string(i), dim));
        c.ell = [comps, dim](const Vec& x) {
            thread_local std::vector<Scalar> stack;
            Vec v(dim);
            for (int i = 0; i < dim; ++i) v[i] = comps[static_cast<std::size_t>(i)].eval(x, stack);
            return v;
        };
        canon["ell"] = je;
    }

    if (j.contains("Q")) {
        const Json& jq = j["Q"];
        if (!jq.is_array() || static_cast<int>(jq.size()) != dim)
            fail(path + "/Q", "must be a dim x dim array of expression strings");
        std::vector<std::vector<CompiledExpr>> comps(static_cast<std::size_t>(dim));
        for (int r = 0; r < dim; ++r) {
            const Json& row = jq[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
                fail(path + "/Q/" + std::to_string(r), "must be an array of dim entries");
            for (int col = 0; col < dim; ++col)
                comps[static_cast<std::size_t>(r)].push_back(
                    compile_at(row[static_cast<std::size_t>(col)],
                               path + "/Q/" + std::to_string(r) + "/" + std::to_string(col), dim));
        }
        c.Q = [comps, dim](const Vec& x) {
            thread_local std::vector<Scalar> stack;
            Mat m(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int col = 0; col < dim; ++col)
                    m(r, col) =
                        comps[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].eval(
                            x, stack);
            return m;
        };
        canon["Q"] = jq;
    }

    if (j.contains("jumps")) {
        const Json& jj = j["jumps"];
        require_object(jj, path + "/jumps");
        check_keys(jj, path + "/jumps", {"atoms", "density"});
        if (jj.contains("atoms") == jj.contains("density"))
            fail(path + "/jumps", "exactly one of 'atoms' or 'density' is required");

        LevyMeasure measure;
        if (jj.contains("atoms")) {
            const Json& ja = jj["atoms"];
            if (!ja.is_array() || ja.empty()) fail(path + "/jumps/atoms", "must be a nonempty array");
            std::vector<JumpAtom> atoms;
            for (std::size_t i = 0; i < ja.size(); ++i) {
                const std::string apath = path + "/jumps/atoms/" + std::to_string(i);
                require_object(ja[i], apath);
                check_keys(ja[i], apath, {"mass", "jump"});
                if (!ja[i].contains("mass") || !ja[i].contains("jump"))
                    fail(apath, "needs 'mass' and 'jump'");
                const Scalar mass = get_num(ja[i]["mass"], apath + "/mass");
                if (!(mass > 0)) fail(apath + "/mass", "must be > 0");
                atoms.push_back({mass, get_vec(ja[i]["jump"], apath + "/jump", dim)});
            }
            try {
                measure = LevyMeasure::atomic(std::move(atoms));
            } catch (const ConfigError& err) {
                fail(path + "/jumps/atoms", err.what());
            }
        } else {
            const std::string dpath = path + "/jumps/density";
            const Json& jd = jj["density"];
            require_object(jd, dpath);
            check_keys(jd, dpath, {"expr", "lo", "hi", "mass_bound"});
            for (const char* k : {"expr", "lo", "hi", "mass_bound"})
                if (!jd.contains(k)) fail(dpath, std::string("missing key '") + k + "'");
            if (dim != 1) fail(dpath, "density jumps are 1-d only");
            CompiledExpr dens = compile_at(jd["expr"], dpath + "/expr", 1);
            const Scalar lo = get_num(jd["lo"], dpath + "/lo");
            const Scalar hi = get_num(jd["hi"], dpath + "/hi");
            const Scalar bound = get_num(jd["mass_bound"], dpath + "/mass_bound");
            auto fn = [dens = std::move(dens)](Scalar y) {
                thread_local std::vector<Scalar> stack;
                return dens.eval(Vec::Constant(1, y), stack);
            };
            try {
                measure = LevyMeasure::from_density({fn, lo, hi, bound});
            } catch (const ConfigError& err) {
                fail(dpath, err.what());
            }
        }
        c.N = [measure](const Vec&) { return measure; };
        canon["jumps"] = jj;
    }

    ProcessModel model(std::move(c));
    model.jumps_state_independent = true; // custom jump specs are constant in x
    return model;
}

SimConfig parse_sim(const Json& j, const std::string& path) {
    SimConfig sim;
    if (j.is_null()) return sim;
    require_object(j, path);
    check_keys(j, path, {"step", "horizon", "explosion_norm", "seed", "n_paths", "workers"});
    if (j.contains("step")) sim.step = get_num(j["step"], path + "/step");
    if (j.contains("horizon")) sim.horizon = get_num(j["horizon"], path + "/horizon");
    if (j.contains("explosion_norm"))
        sim.explosion_norm = get_num(j["explosion_norm"], path + "/explosion_norm");
    if (j.contains("seed")) {
        const std::int64_t s = get_int(j["seed"], path + "/seed");
        if (s < 0) fail(path + "/seed", "must be >= 0");
        sim.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("n_paths")) sim.n_paths = get_int(j["n_paths"], path + "/n_paths");
    if (j.contains("workers")) {
        const std::int64_t w = get_int(j["workers"], path + "/workers");
        if (w < 0 || w > 4096) fail(path + "/workers", "must be in 0..4096");
        sim.workers = static_cast<int>(w);
    }
    try {
        sim.validate();
    } catch (const ConfigError& err) {
        fail(path, err.what());
    }
    return sim;
}

Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json vec_list_to_json(const std::vector<Vec>& vs) {
    Json a = Json::array();
    for (const Vec& v : vs) a.push_back(vec_to_json(v));
    return a;
}

} // namespace

ExperimentConfig parse_config(const Json& root) {
    require_object(root, "/");
    check_keys(root, "/",
               {"process", "x0", "sim", "estimator", "symbol_grid", "check", "sweep", "outputs"});
    if (!root.contains("process")) fail("/process", "missing (need 'catalog' or 'custom')");

    ExperimentConfig cfg;
    Json canon_process;

    const Json& jp = root["process"];
    require_object(jp, "/process");
    check_keys(jp, "/process", {"catalog", "params", "custom"});
    const bool has_catalog = jp.contains("catalog");
    const bool has_custom = jp.contains("custom");
    if (has_catalog == has_custom)
        fail("/process", "exactly one of 'catalog' or 'custom' is required");

    if (has_catalog) {
        const std::string name = get_str(jp["catalog"], "/process/catalog");
        std::map<std::string, Scalar> params;
        if (jp.contains("params")) {
            require_object(jp["params"], "/process/params");
            for (const auto& [key, val] : jp["params"].items())
                params[key] = get_num(val, "/process/params/" + key);
        }
        try {
            cfg.entry = catalog_lookup(name, params);
        } catch (const ConfigError& err) {
            fail("/process", err.what());
        }
        cfg.model = cfg.entry->model;
        cfg.process_label = name;
        canon_process["catalog"] = name;
        canon_process["params"] = cfg.entry->resolved_params;
    } else {
        if (jp.contains("params")) fail("/process/params", "only valid with 'catalog'");
        Json canon_custom = Json::object();
        cfg.model = parse_custom(jp["custom"], "/process/custom", canon_custom);
        cfg.process_label = "custom";
        canon_process["custom"] = std::move(canon_custom);
    }

    const Eigen::Index dim = cfg.model.chars.dim;

    if (root.contains("x0"))
        cfg.x0 = get_vec(root["x0"], "/x0", dim);
    else if (cfg.entry)
        cfg.x0 = cfg.entry->default_x0;
    else
        cfg.x0 = Vec::Zero(dim);
    if (!cfg.model.in_domain(cfg.x0)) fail("/x0", "outside the process domain");

    cfg.sim = parse_sim(root.contains("sim") ? root["sim"] : Json(), "/sim");

    if (root.contains("estimator")) {
        const Json& je = root["estimator"];
        require_object(je, "/estimator");
        check_keys(je, "/estimator", {"radius", "t_ladder", "xi_list"});
        if (je.contains("radius")) cfg.estimator.radius = get_num(je["radius"], "/estimator/radius");
        if (!(cfg.estimator.radius > 0)) fail("/estimator/radius", "must be > 0");
        if (je.contains("t_ladder"))
            cfg.estimator.t_ladder = get_num_list(je["t_ladder"], "/estimator/t_ladder");
        if (je.contains("xi_list"))
            cfg.estimator.xi_list = get_vec_list(je["xi_list"], "/estimator/xi_list", dim);
    }
    if (cfg.estimator.xi_list.empty()) cfg.estimator.xi_list.push_back(Vec::Ones(dim));
    if (cfg.estimator.t_ladder.empty()) fail("/estimator/t_ladder", "must be nonempty");
    for (std::size_t i = 0; i + 1 < cfg.estimator.t_ladder.size(); ++i)
        if (!(cfg.estimator.t_ladder[i + 1] < cfg.estimator.t_ladder[i]))
            fail("/estimator/t_ladder", "must be strictly decreasing");
    for (Scalar t : cfg.estimator.t_ladder)
        if (!(t > 0)) fail("/estimator/t_ladder", "entries must be > 0");
    if (cfg.estimator.t_ladder.front() > cfg.sim.horizon * (1 + 1e-12))
        fail("/estimator/t_ladder", "largest t exceeds sim horizon");

    if (root.contains("symbol_grid")) {
        const Json& jg = root["symbol_grid"];
        require_object(jg, "/symbol_grid");
        check_keys(jg, "/symbol_grid", {"x_list", "xi_list"});
        if (jg.contains("x_list"))
            cfg.symbol_grid.x_list = get_vec_list(jg["x_list"], "/symbol_grid/x_list", dim);
        if (jg.contains("xi_list"))
            cfg.symbol_grid.xi_list = get_vec_list(jg["xi_list"], "/symbol_grid/xi_list", dim);
    }
    if (cfg.symbol_grid.x_list.empty()) cfg.symbol_grid.x_list.push_back(cfg.x0);
    if (cfg.symbol_grid.xi_list.empty()) cfg.symbol_grid.xi_list = cfg.estimator.xi_list;

    if (root.contains("check")) {
        const Json& jc = root["check"];
        require_object(jc, "/check");
        check_keys(jc, "/check", {"checks", "t", "mutation", "budget_c"});
        if (jc.contains("checks")) {
            cfg.check.checks.clear();
            if (!jc["checks"].is_array()) fail("/check/checks", "must be an array of names");
            for (std::size_t i = 0; i < jc["checks"].size(); ++i) {
                const std::string name =
                    get_str(jc["checks"][i], "/check/checks/" + std::to_string(i));
                if (name != "compensator" && name != "martingale" && name != "duality")
                    fail("/check/checks/" + std::to_string(i),
                         "unknown check '" + name + "' (compensator, martingale, duality)");
                cfg.check.checks.push_back(name);
            }
        }
        if (jc.contains("t")) cfg.check.t = get_num(jc["t"], "/check/t");
        if (!(cfg.check.t > 0) || cfg.check.t > cfg.sim.horizon)
            fail("/check/t", "must lie in (0, sim horizon]");
        if (jc.contains("mutation")) {
            cfg.check.mutation = get_str(jc["mutation"], "/check/mutation");
            if (cfg.check.mutation != "none" && cfg.check.mutation != "double_a")
                fail("/check/mutation", "must be 'none' or 'double_a'");
        }
        if (jc.contains("budget_c")) cfg.check.budget_c = get_num(jc["budget_c"], "/check/budget_c");
        if (!(cfg.check.budget_c >= 0)) fail("/check/budget_c", "must be >= 0");
    }

    if (root.contains("sweep")) {
        const Json& js = root["sweep"];
        require_object(js, "/sweep");
        check_keys(js, "/sweep", {"kind", "values"});
        SweepConfig sweep;
        if (!js.contains("kind") || !js.contains("values"))
            fail("/sweep", "needs 'kind' and 'values'");
        sweep.kind = get_str(js["kind"], "/sweep/kind");
        if (sweep.kind != "step" && sweep.kind != "radius" && sweep.kind != "t_scale")
            fail("/sweep/kind", "must be 'step', 'radius', or 't_scale'");
        sweep.values = get_num_list(js["values"], "/sweep/values");
        if (sweep.values.empty()) fail("/sweep/values", "must be nonempty");
        for (Scalar v : sweep.values)
            if (!(v > 0)) fail("/sweep/values", "entries must be > 0");
        cfg.sweep = std::move(sweep);
    }

    if (root.contains("outputs")) {
        const Json& jo = root["outputs"];
        require_object(jo, "/outputs");
        check_keys(jo, "/outputs", {"paths"});
        if (jo.contains("paths")) {
            if (!jo["paths"].is_boolean()) fail("/outputs/paths", "must be a boolean");
            cfg.outputs.paths = jo["paths"].get<bool>();
        }
    }

    // custom killing rates get a sampled nonnegativity screen around x0
    if (!cfg.entry && cfg.model.chars.a && root["process"]["custom"].contains("a")) {
        const CompiledExpr a = compile_expr(
            root["process"]["custom"]["a"].get<std::string>(), static_cast<int>(dim));
        spot_check_nonnegative(a, cfg.x0, "/process/custom/a");
    }

    // canonical resolved form; field order is irrelevant (keys serialize
    // sorted), floats print shortest-round-trip
    cfg.canonical = Json::object();
    cfg.canonical["process"] = std::move(canon_process);
    cfg.canonical["x0"] = vec_to_json(cfg.x0);
    cfg.canonical["sim"] = {{"step", cfg.sim.step},
                            {"horizon", cfg.sim.horizon},
                            {"explosion_norm", cfg.sim.explosion_norm},
                            {"seed", cfg.sim.seed},
                            {"n_paths", cfg.sim.n_paths},
                            {"workers", cfg.sim.workers}};
    cfg.canonical["estimator"] = {{"radius", cfg.estimator.radius},
                                  {"t_ladder", cfg.estimator.t_ladder},
                                  {"xi_list", vec_list_to_json(cfg.estimator.xi_list)}};
    cfg.canonical["symbol_grid"] = {{"x_list", vec_list_to_json(cfg.symbol_grid.x_list)},
                                    {"xi_list", vec_list_to_json(cfg.symbol_grid.xi_list)}};
    cfg.canonical["check"] = {{"checks", cfg.check.checks},
                              {"t", cfg.check.t},
                              {"mutation", cfg.check.mutation},
                              {"budget_c", cfg.check.budget_c}};
    if (cfg.sweep)
        cfg.canonical["sweep"] = {{"kind", cfg.sweep->kind}, {"values", cfg.sweep->values}};
    cfg.canonical["outputs"] = {{"paths", cfg.outputs.paths}};

    refresh_config_hash(cfg);
    return cfg;
}

void refresh_config_hash(ExperimentConfig& cfg) {
    cfg.canonical["sim"]["seed"] = cfg.sim.seed;
    cfg.canonical["sim"]["workers"] = cfg.sim.workers;
    Json hashed = cfg.canonical;
    hashed["sim"]["workers"] = 0;
    cfg.hash = fnv1a64(hashed.dump());
}

ExperimentConfig load_config(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError("cannot open config file '" + file_path + "'");
    Json root;
    try {
        root = Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ConfigError("config file '" + file_path + "' is not valid JSON: " + err.what());
    }
    return parse_config(root);
}

} // namespace ksim
