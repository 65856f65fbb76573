#pragma once

#include <json.hpp>

#include "pidelab/expr.hpp"
#include "pidelab/regularity.hpp"

namespace pidelab {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace cfg {

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ConfigError(path + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline double require_number(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(path + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline CoeffFn expr_or_null(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return nullptr;
    if (!j.at(key).is_string()) throw ConfigError(path + ": '" + key + "' must be an expression string");
    try {
        return parse_expression(j.at(key).get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline LevyKernel kernel_from_config(const json& j, const std::string& path = "kernel") {
    check_keys(j, {"kind", "dim", "beta", "coefficient", "gamma", "axes", "tail_radius",
                   "normalization"},
               path);
    std::string kind = get_or<std::string>(j, "kind", "isotropic-fractional");
    int dim = static_cast<int>(get_or<double>(j, "dim", 1));
    double beta = require_number(j, "beta", path);
    if (!(beta > 0.0 && beta < 2.0)) throw ConfigError(path + ": beta must lie in (0,2)");
    LevyKernel k;
    if (kind == "isotropic-fractional") {
        k = LevyKernel::fractional(dim, beta);
    } else if (kind == "x-modulated") {
        CoeffFn c = expr_or_null(j, "coefficient", path);
        if (!c) throw ConfigError(path + ": x-modulated kernel needs 'coefficient'");
        double gamma = get_or<double>(j, "gamma", 1.0);
        k = LevyKernel::x_modulated_fractional(dim, beta, c, gamma);
    } else if (kind == "directional-embedding") {
        if (!j.contains("axes") || !j.at("axes").is_array())
            throw ConfigError(path + ": directional-embedding kernel needs 'axes'");
        std::vector<int> axes;
        for (const auto& a : j.at("axes")) axes.push_back(a.get<int>());
        k = LevyKernel::directional_embedding_fractional(dim, axes, beta);
    } else {
        throw ConfigError(path + ": unknown kernel kind '" + kind + "'");
    }
    k.tail_radius = get_or<double>(j, "tail_radius", 1.0);
    k.normalization = get_or<double>(j, "normalization", 1.0);
    return k;
}

inline JumpFunction jump_from_config(const json& j, int dim, const std::string& path = "jump") {
    check_keys(j, {"kind", "factor", "amplitude"}, path);
    std::string kind = get_or<std::string>(j, "kind", "identity");
    if (kind == "identity") return JumpFunction::identity(dim);
    if (kind == "scale") return JumpFunction::scaling(dim, require_number(j, "factor", path));
    if (kind == "sinusoidal")
        return JumpFunction::sinusoidal(dim, require_number(j, "amplitude", path));
    throw ConfigError(path + ": unknown jump kind '" + kind + "'");
}

inline TermSet termset_from_config(const json& j, const std::string& path) {
    check_keys(j, {"terms", "forcing"}, path);
    TermSet ts;
    if (j.contains("terms")) {
        if (!j.at("terms").is_array()) throw ConfigError(path + ": 'terms' must be an array");
        int ti = 0;
        for (const auto& t : j.at("terms")) {
            std::string tp = path + ".terms[" + std::to_string(ti++) + "]";
            std::string type = get_or<std::string>(t, "type", "");
            if (type == "local-trace") {
                check_keys(t, {"type", "block", "a"}, tp);
                LocalTraceTerm lt;
                lt.block = static_cast<int>(get_or<double>(t, "block", 0));
                lt.a = expr_or_null(t, "a", tp);
                ts.local_terms.push_back(std::move(lt));
            } else if (type == "nonlocal") {
                check_keys(t, {"type", "block", "kernel", "jump", "coefficient", "sign",
                               "force_direct"},
                           tp);
                NonlocalTerm nt;
                nt.block = static_cast<int>(get_or<double>(t, "block", 0));
                if (!t.contains("kernel")) throw ConfigError(tp + ": missing 'kernel'");
                nt.kernel = kernel_from_config(t.at("kernel"), tp + ".kernel");
                if (t.contains("jump"))
                    nt.jump = jump_from_config(t.at("jump"), nt.kernel.dim, tp + ".jump");
                nt.coeff = expr_or_null(t, "coefficient", tp);
                nt.sign = get_or<double>(t, "sign", -1.0);
                nt.force_direct = get_or<bool>(t, "force_direct", false);
                ts.nonlocal_terms.push_back(std::move(nt));
            } else if (type == "gradient-power") {
                check_keys(t, {"type", "block", "b", "exponent"}, tp);
                GradientPowerTerm gt;
                gt.block = static_cast<int>(get_or<double>(t, "block", 0));
                gt.b = expr_or_null(t, "b", tp);
                gt.exponent = get_or<double>(t, "exponent", 1.0);
                ts.gradient_terms.push_back(std::move(gt));
            } else if (type == "drift") {
                check_keys(t, {"type", "block", "b"}, tp);
                DriftTerm dt;
                dt.block = static_cast<int>(get_or<double>(t, "block", 0));
                if (!t.contains("b") || !t.at("b").is_array())
                    throw ConfigError(tp + ": drift needs an array 'b' of expressions");
                for (const auto& e : t.at("b"))
                    dt.b.push_back(parse_expression(e.get<std::string>()));
                ts.drift_terms.push_back(std::move(dt));
            } else if (type == "zeroth-order") {
                check_keys(t, {"type", "c"}, tp);
                ts.zeroth_order += require_number(t, "c", tp);
            } else {
                throw ConfigError(tp + ": unknown term type '" + type + "'");
            }
        }
    }
    ts.forcing = expr_or_null(j, "forcing", path);
    return ts;
}

inline EquationSpec equation_from_config(const json& j, int n, const std::string& path = "equation") {
    check_keys(j, {"preset", "d1", "d2", "terms", "forcing", "beta", "b", "f", "c", "a1", "b1",
                   "k1", "b2", "k2", "A", "cI", "k", "r", "controls"},
               path);
    EquationSpec spec;
    std::string preset = get_or<std::string>(j, "preset", "");
    if (preset == "toy-model") {
        spec = catalogue::toy_model(n, require_number(j, "beta", path), expr_or_null(j, "f", path));
    } else if (preset == "advection-fractional") {
        spec = catalogue::advection_fractional(n, require_number(j, "beta", path),
                                               expr_or_null(j, "b", path), expr_or_null(j, "f", path),
                                               get_or<double>(j, "c", 1.0));
    } else if (preset == "model") {
        spec = catalogue::model_equation(
            n, static_cast<int>(get_or<double>(j, "d1", 1)), require_number(j, "beta", path),
            expr_or_null(j, "A", path), expr_or_null(j, "cI", path), expr_or_null(j, "b", path),
            get_or<double>(j, "k", 1.0), get_or<double>(j, "r", 0.0), get_or<double>(j, "c", 1.0),
            expr_or_null(j, "f", path));
    } else if (preset == "mixed-first-order") {
        spec = catalogue::mixed_first_order(
            n, require_number(j, "beta", path), expr_or_null(j, "a1", path),
            expr_or_null(j, "b1", path), get_or<double>(j, "k1", 1.0), expr_or_null(j, "b2", path),
            get_or<double>(j, "k2", 1.0), get_or<double>(j, "c", 1.0), expr_or_null(j, "f", path));
    } else if (preset.empty()) {
        int d1 = static_cast<int>(get_or<double>(j, "d1", 1));
        int d2 = static_cast<int>(get_or<double>(j, "d2", 0));
        spec.geo = Geometry(d1, d2, n);
        json sub = json::object();
        if (j.contains("terms")) sub["terms"] = j.at("terms");
        if (j.contains("forcing")) sub["forcing"] = j.at("forcing");
        spec.base = termset_from_config(sub, path);
        spec.profile_checked = false;  // arbitrary terms: (H2)/(H3) not validated
    } else {
        throw ConfigError(path + ": unknown preset '" + preset + "'");
    }
    if (j.contains("controls")) {
        if (!j.at("controls").is_array()) throw ConfigError(path + ": 'controls' must be an array");
        int gi = 0;
        for (const auto& row : j.at("controls")) {
            std::vector<TermSet> r;
            int di = 0;
            for (const auto& cell : row)
                r.push_back(termset_from_config(
                    cell, path + ".controls[" + std::to_string(gi) + "][" + std::to_string(di++) + "]"));
            spec.controls.push_back(std::move(r));
            ++gi;
        }
    }
    return spec;
}

}  // namespace cfg

}  // namespace pidelab
