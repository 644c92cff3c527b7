#pragma once

#include "ksim/catalog.hpp"
#include "ksim/model.hpp"
#include "ksim/simulate.hpp"
#include "ksim/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ksim {

using Json = nlohmann::json;

struct EstimatorConfig {
    Scalar radius = 1.0;
    std::vector<Scalar> t_ladder{0.02, 0.01, 0.005};
    std::vector<Vec> xi_list; ///< defaulted to {ones(dim)} at load
};

/// (x, xi) grids for the analytic symbol table; empty lists fall back to
/// {x0} and estimator.xi_list.
struct SymbolGridConfig {
    std::vector<Vec> x_list;
    std::vector<Vec> xi_list;
};

struct CheckConfig {
    std::vector<std::string> checks{"compensator", "martingale", "duality"};
    Scalar t = 0.5;
    std::string mutation = "none"; ///< "none" or "double_a" (mis-specified compensator)
    Scalar budget_c = 2.0;         ///< discretization allowance coefficient C in C*h
};

struct SweepConfig {
    std::string kind; ///< "step", "radius", or "t_scale"
    std::vector<Scalar> values;
};

struct OutputsConfig {
    bool paths = true; ///< write paths.csv from cmd_simulate
};

/// A fully resolved experiment: the process model, every knob defaulted,
/// plus the canonical JSON form and its hash for provenance lines.
struct ExperimentConfig {
    std::string process_label;         ///< catalog entry name or "custom"
    std::optional<CatalogEntry> entry; ///< set iff catalog-backed
    ProcessModel model;
    Vec x0;
    SimConfig sim;
    EstimatorConfig estimator;
    SymbolGridConfig symbol_grid;
    CheckConfig check;
    std::optional<SweepConfig> sweep;
    OutputsConfig outputs;

    /// Defaults-filled canonical form; hashing masks sim.workers so worker
    /// count never changes output bytes.
    Json canonical;
    std::uint64_t hash = 0;
};

std::uint64_t fnv1a64(std::string_view s);

/// Strict schema: unknown keys rejected, errors prefixed with a JSON
/// pointer into the document. Throws ConfigError.
ExperimentConfig parse_config(const Json& root);

ExperimentConfig load_config(const std::string& file_path);

/// Re-sync canonical["sim"] and the hash after a seed/workers override.
void refresh_config_hash(ExperimentConfig& cfg);

} // namespace ksim
