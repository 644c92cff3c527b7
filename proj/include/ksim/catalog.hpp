#pragma once

#include "ksim/model.hpp"
#include "ksim/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ksim {

/// One named real parameter of a catalog entry.
struct ParamSpec {
    std::string name;
    Scalar default_value = 0.0;
    std::string constraint; ///< human-readable range, empty if unconstrained
};

/// A concrete process: characteristics, optional exact integrator and
/// declared compensator (inside the model), a closed-form symbol oracle,
/// and the parameter values it was instantiated with. Immutable after
/// lookup.
struct CatalogEntry {
    std::string name;
    std::string summary;
    ProcessModel model;
    Vec default_x0;

    /// Null iff !symbol_applicable.
    std::function<Complex(const Vec&, const Vec&)> closed_form_symbol;
    bool symbol_applicable = true;
    std::string symbol_note; ///< why the symbol is not applicable, when set

    std::vector<ParamSpec> schema;
    std::map<std::string, Scalar> resolved_params;

    /// Oracle evaluation with domain and applicability guards.
    Complex closed_form(const Vec& x, const Vec& xi) const;
};

struct CatalogInfo {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
};

/// Instantiate a registry entry. Unknown names, unknown parameter keys, and
/// out-of-range values throw ConfigError naming the violated constraint.
CatalogEntry catalog_lookup(const std::string& name,
                            const std::map<std::string, Scalar>& params = {});

/// Registry listing (fixed order), with parameter schemas.
const std::vector<CatalogInfo>& catalog_list();

std::vector<std::string> catalog_names();

} // namespace ksim
