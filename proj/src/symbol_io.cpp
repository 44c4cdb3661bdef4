#include "floquet/symbol_io.hpp"

#include <fstream>

namespace floquet {

using nlohmann::json;

namespace {

cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("expected a number or [re, im], got " + j.dump());
}

json complex_json(cplx c) {
    if (c.imag() == 0.0) return c.real();
    return json::array({c.real(), c.imag()});
}

IVec parse_index(const json& j, int d) {
    auto v = j.get<IVec>();
    if (static_cast<int>(v.size()) != d) throw ConfigError("index " + j.dump() + " does not have dimension " + std::to_string(d));
    return v;
}

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\" in " + j.dump());
    return j.at(key);
}

}  // namespace

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

CoefficientFunction parse_coefficient(const json& j, int d) {
    try {
        if (j.is_number() || j.is_array()) return CoefficientFunction::constant(d, parse_complex(j));
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "constant") return CoefficientFunction::constant(d, parse_complex(field(j, "value")));
        if (kind == "free") return CoefficientFunction::free_kinetic(d, j.value("scale", 1.0));
        if (kind == "polynomial") {
            std::vector<CoefficientFunction::Monomial> terms;
            for (const auto& t : field(j, "terms"))
                terms.push_back({parse_index(field(t, "power"), d), parse_complex(field(t, "coef"))});
            return CoefficientFunction::polynomial(d, std::move(terms));
        }
        if (kind == "bracket_power") return CoefficientFunction::bracket_power(d, field(j, "s").get<double>());
        if (kind == "gaussian") return CoefficientFunction::gaussian(d, field(j, "sigma").get<double>());
        if (kind == "cutoff") return CoefficientFunction::cutoff(d, field(j, "N").get<double>());
        if (kind == "offset") {
            auto s = field(j, "shift").get<Vec>();
            return CoefficientFunction::offset(parse_coefficient(field(j, "of"), d), s);
        }
        if (kind == "product") {
            const auto& fs = field(j, "factors");
            if (!fs.is_array() || fs.size() < 2) throw ConfigError("product needs at least two factors");
            CoefficientFunction acc = parse_coefficient(fs[0], d);
            for (std::size_t i = 1; i < fs.size(); ++i) acc = CoefficientFunction::product(acc, parse_coefficient(fs[i], d));
            return acc;
        }
        throw ConfigError("unknown coefficient kind \"" + kind + "\"");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad coefficient: ") + e.what());
    }
}

json to_json(const CoefficientFunction& c) {
    using K = CoefficientFunction::Kind;
    switch (c.kind()) {
        case K::polynomial: {
            json terms = json::array();
            for (const auto& m : c.monomials()) terms.push_back({{"power", m.power}, {"coef", complex_json(m.coef)}});
            return {{"kind", "polynomial"}, {"terms", terms}};
        }
        case K::bracket_power:
            return {{"kind", "bracket_power"}, {"s", c.parameter()}};
        case K::gaussian:
            return {{"kind", "gaussian"}, {"sigma", c.parameter()}};
        case K::cutoff:
            return {{"kind", "cutoff"}, {"N", c.parameter()}};
        case K::offset:
            return {{"kind", "offset"}, {"shift", c.shift_vector()}, {"of", to_json(c.first())}};
        case K::product:
            return {{"kind", "product"}, {"factors", json::array({to_json(c.first()), to_json(c.second())})}};
    }
    return {};
}

PeriodicSymbol parse_symbol(const json& j) {
    try {
        const int d = field(j, "dimension").get<int>();
        if (d < 1) throw ConfigError("dimension must be >= 1");
        PeriodicSymbol F(d, j.value("order", 0.0));
        F.set_name(j.value("name", std::string("symbol")));
        F.set_elliptic(j.value("elliptic", false));
        for (const auto& t : field(j, "terms")) F.add_term(parse_index(field(t, "mu"), d), parse_coefficient(field(t, "coef"), d));
        if (j.value("real", false)) F.mark_real();
        return F;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad symbol file: ") + e.what());
    }
}

json to_json(const PeriodicSymbol& F) {
    json terms = json::array();
    for (const auto& [mu, cs] : F.terms())
        for (const auto& c : cs) terms.push_back({{"mu", mu}, {"coef", to_json(c)}});
    return {{"name", F.name()}, {"dimension", F.dimension()}, {"order", F.order()},
            {"real", F.is_real()}, {"elliptic", F.is_elliptic()}, {"terms", terms}};
}

PeriodicSymbol load_symbol(const std::string& path) { return parse_symbol(load_json(path)); }

FourierSeries parse_series(const json& j, int d) {
    FourierSeries f(d);
    for (const auto& t : j) f.add(parse_index(field(t, "mu"), d), parse_complex(field(t, "coef")));
    return f;
}

VectorPotential parse_potential(const json& j) {
    try {
        const int d = field(j, "dimension").get<int>();
        if (d < 1) throw ConfigError("dimension must be >= 1");
        VectorPotential A(d);
        if (j.contains("terms"))
            for (const auto& t : j.at("terms")) {
                const int c = field(t, "component").get<int>();
                if (c < 1 || c > d) throw ConfigError("component out of range in " + t.dump());
                A.periodic[c - 1].add(parse_index(field(t, "mu"), d), parse_complex(field(t, "coef")));
            }
        if (j.contains("linear")) {
            auto L = j.at("linear").get<std::vector<Vec>>();
            if (static_cast<int>(L.size()) != d) throw ConfigError("linear part must be d x d");
            for (const auto& row : L)
                if (static_cast<int>(row.size()) != d) throw ConfigError("linear part must be d x d");
            A.linear = L;
        }
        if (A.real_defect() > 1e-12) throw ConfigError("vector potential is not real (coefficients not conjugate symmetric)");
        return A;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad potential file: ") + e.what());
    }
}

VectorPotential load_potential(const std::string& path) { return parse_potential(load_json(path)); }

}  // namespace floquet
