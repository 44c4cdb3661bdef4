#pragma once

#include <json.hpp>

#include "floquet/magnetic_gauge.hpp"

namespace floquet {

// Symbol file:
//   { "name": "...", "dimension": d, "order": p, "real": bool, "elliptic": bool,
//     "terms": [ { "mu": [ints], "coef": <coefficient> } ] }
// Coefficient kinds:
//   {"kind": "constant", "value": c}
//   {"kind": "polynomial", "terms": [{"power": [ints], "coef": c}]}
//   {"kind": "free"}                       (2 pi)^2 |xi|^2, optional "scale"
//   {"kind": "bracket_power", "s": s}
//   {"kind": "gaussian", "sigma": sigma}
//   {"kind": "product", "factors": [<coefficient>, <coefficient>, ...]}
//   {"kind": "offset", "shift": [reals], "of": <coefficient>}
//   {"kind": "cutoff", "N": N}
// A complex number c is either a real or [re, im].
PeriodicSymbol parse_symbol(const nlohmann::json& j);
PeriodicSymbol load_symbol(const std::string& path);
CoefficientFunction parse_coefficient(const nlohmann::json& j, int d);
nlohmann::json to_json(const CoefficientFunction& c);
nlohmann::json to_json(const PeriodicSymbol& F);

// Potential file, components in dual basis units:
//   { "dimension": d,
//     "terms": [ { "component": j, "mu": [ints], "coef": c } ],   j is 1-based
//     "linear": [[...], ...] }                                     optional d x d
// The linear part is only accepted so that fields with flux can be described
// and rejected by the flux gate.
VectorPotential parse_potential(const nlohmann::json& j);
VectorPotential load_potential(const std::string& path);

// x-only series, same term format without "component".
FourierSeries parse_series(const nlohmann::json& j, int d);

nlohmann::json load_json(const std::string& path);

}  // namespace floquet
