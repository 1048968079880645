#pragma once

#include "ptl/certificates.hpp"
#include "ptl/exponents.hpp"
#include "ptl/measures.hpp"
#include "ptl/solver.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace ptl {

using nlohmann::json;

/// Formats a double so files are byte-identical across runs.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// --- exponent configuration ------------------------------------------------

/// cfg: {N, p, q, D1, D2}. p and q given as JSON strings ("3/2", "1.5") are
/// parsed as exact rationals; plain numbers classify with the documented
/// tolerance at regime boundaries.
inline ExponentConfig exponent_config_from_json(const json& j) {
    if (!j.contains("N") || !j.contains("p") || !j.contains("q"))
        throw std::invalid_argument("cfg requires fields N, p, q");
    const int N = j.at("N").get<int>();
    const double D1 = j.value("D1", 1.0);
    const double D2 = j.value("D2", 1.0);
    auto read_exponent = [&](const char* key) -> std::pair<double, std::optional<Rat>> {
        const json& v = j.at(key);
        if (v.is_string()) {
            auto r = parse_rational(v.get<std::string>());
            if (!r) throw std::invalid_argument(std::string("cannot parse exponent ") + key);
            return {to_double(*r), r};
        }
        return {v.get<double>(), std::nullopt};
    };
    auto [p, pr] = read_exponent("p");
    auto [q, qr] = read_exponent("q");
    if (pr && qr) return ExponentConfig(N, *pr, *qr, D1, D2);
    return ExponentConfig(N, p, q, D1, D2);
}

inline json exponent_config_to_json(const ExponentConfig& cfg) {
    json j;
    j["N"] = cfg.N;
    if (cfg.exact()) {
        j["p"] = rat_to_string(*cfg.p_exact);
        j["q"] = rat_to_string(*cfg.q_exact);
    } else {
        j["p"] = cfg.p;
        j["q"] = cfg.q;
    }
    j["D1"] = cfg.D1;
    j["D2"] = cfg.D2;
    return j;
}

// --- measure families --------------------------------------------------------

/// family spec: {family, c, a, logpow, cutoff, extension, table?}
inline RadialMeasure measure_from_json(const json& j, int N) {
    const std::string fam = j.at("family").get<std::string>();
    const double c = j.value("c", 1.0);
    auto ext = RadialMeasure::Extension::Zero;
    if (j.value("extension", "zero") == std::string("boundary"))
        ext = RadialMeasure::Extension::Boundary;
    if (fam == "dirac") return RadialMeasure::dirac(N, c);
    if (fam == "constant") return RadialMeasure::constant(N, c);
    if (fam == "powerlaw")
        return RadialMeasure::power_law(N, c, j.at("a").get<double>(), j.value("cutoff", 1.0), ext);
    if (fam == "powerloglaw")
        return RadialMeasure::power_log_law(N, c, j.at("a").get<double>(),
                                            j.at("logpow").get<double>(),
                                            j.value("cutoff", std::exp(-1.0)), ext);
    if (fam == "modulatedpower") {
        std::vector<double> r, h;
        for (const auto& row : j.at("table")) {
            r.push_back(row.at(0).get<double>());
            h.push_back(row.at(1).get<double>());
        }
        return RadialMeasure::modulated_power(N, j.at("a").get<double>(),
                                              TabulatedFunction(std::move(r), std::move(h)),
                                              j.value("cutoff", 1.0), ext);
    }
    throw std::invalid_argument("unknown family: " + fam);
}

inline json measure_to_json(const RadialMeasure& m) {
    json j;
    j["family"] = m.family_name();
    j["c"] = m.c;
    if (m.family == RadialMeasure::Family::PowerLaw ||
        m.family == RadialMeasure::Family::PowerLogLaw ||
        m.family == RadialMeasure::Family::ModulatedPower)
        j["a"] = m.a;
    if (m.family == RadialMeasure::Family::PowerLogLaw) j["logpow"] = m.logpow;
    if (std::isfinite(m.cutoff)) j["cutoff"] = m.cutoff;
    j["extension"] = m.extension == RadialMeasure::Extension::Zero ? "zero" : "boundary";
    if (m.family == RadialMeasure::Family::ModulatedPower) {
        json table = json::array();
        for (size_t i = 0; i < m.table.r.size(); ++i)
            table.push_back({m.table.r[i], m.table.h[i]});
        j["table"] = table;
    }
    return j;
}

// --- solve parameters --------------------------------------------------------

/// solve: {T, n_steps, n_sub, Rmax, M, first_frac, tol, threshold,
///         mass_radii, boundary_tol}
inline SolveConfig solve_config_from_json(const json& root, const ExponentConfig& cfg) {
    SolveConfig sc;
    sc.cfg = cfg;
    if (root.contains("solve")) {
        const json& j = root.at("solve");
        sc.T = j.value("T", sc.T);
        sc.n_steps = j.value("n_steps", sc.n_steps);
        sc.n_sub = j.value("n_sub", sc.n_sub);
        sc.picard_tol = j.value("tol", sc.picard_tol);
        sc.picard_max_iter = j.value("max_iter", sc.picard_max_iter);
        sc.blowup_threshold = j.value("threshold", sc.blowup_threshold);
        sc.growth_cap = j.value("growth_cap", sc.growth_cap);
        sc.boundary_tol = j.value("boundary_tol", sc.boundary_tol);
        sc.mesh.Rmax = j.value("Rmax", sc.mesh.Rmax);
        sc.mesh.nodes = j.value("M", sc.mesh.nodes);
        sc.mesh.first_frac = j.value("first_frac", sc.mesh.first_frac);
        sc.duhamel_windows = j.value("duhamel_windows", sc.duhamel_windows);
        sc.core_radius = j.value("core_radius", sc.core_radius);
        if (j.contains("mass_radii")) sc.mass_radii = j.at("mass_radii").get<std::vector<double>>();
    }
    return sc;
}

inline json solve_config_to_json(const SolveConfig& sc) {
    json j;
    j["T"] = sc.T;
    j["n_steps"] = sc.n_steps;
    j["n_sub"] = sc.n_sub;
    j["tol"] = sc.picard_tol;
    j["max_iter"] = sc.picard_max_iter;
    j["threshold"] = sc.blowup_threshold;
    j["growth_cap"] = sc.growth_cap;
    j["boundary_tol"] = sc.boundary_tol;
    j["Rmax"] = sc.mesh.Rmax;
    j["M"] = sc.mesh.nodes;
    j["first_frac"] = sc.mesh.first_frac;
    j["duhamel_windows"] = sc.duhamel_windows;
    j["core_radius"] = sc.core_radius;
    j["mass_radii"] = sc.mass_radii;
    return j;
}

// --- reports -----------------------------------------------------------------

inline json solve_report_to_json(const SolveReport& rep, const SolveConfig& sc) {
    json j;
    j["outcome"] = to_string(rep.outcome);
    if (rep.outcome == Outcome::BlowupDetected) j["t_blowup"] = rep.t_blowup;
    if (rep.outcome == Outcome::PicardDiverged) j["diverged_step"] = rep.diverged_step;
    if (!rep.note.empty()) j["note"] = rep.note;
    j["steps"] = rep.history.size();
    j["max_boundary_frac"] = rep.max_boundary_frac();
    j["core_radius_u"] = rep.core_radius_u;
    j["core_radius_v"] = rep.core_radius_v;
    if (!rep.duhamel.empty()) {
        json dw = json::array();
        for (const auto& d : rep.duhamel)
            dw.push_back({{"tau", d.tau}, {"t", d.t}, {"res_u", d.res_u}, {"res_v", d.res_v}});
        j["duhamel"] = std::move(dw);
    }
    json hist = json::array();
    for (const auto& rec : rep.history) {
        json h;
        h["t"] = rec.t;
        h["sup_u"] = rec.sup_u;
        h["sup_v"] = rec.sup_v;
        h["mass_u"] = rec.mass_u;
        h["mass_v"] = rec.mass_v;
        h["picard_iters"] = rec.picard_iters;
        hist.push_back(std::move(h));
    }
    j["history"] = std::move(hist);
    j["mass_radii"] = sc.mass_radii;
    return j;
}

inline json ledger_to_json(const IterationLedger& led) {
    json j;
    j["scheme"] = to_string(led.scheme);
    j["M"] = led.M;
    j["rho"] = led.rho;
    j["closed_forms_ok"] = led.closed_forms_ok;
    json k;
    k["dp_ratio"] = led.constants.dp_ratio;
    k["c_star"] = {{"value", led.constants.c_star}, {"note", led.constants.c_star_note}};
    k["gamma"] = {{"value", led.constants.gamma}, {"note", led.constants.gamma_note}};
    k["majorizer_C"] = led.constants.majorizer_C;
    k["a_star"] = {{"value", led.constants.a_star}, {"note", led.constants.a_star_note}};
    k["ratio"] = led.constants.ratio;
    j["constants"] = std::move(k);
    j["log_a"] = led.log_a;
    j["a"] = json::array();
    for (double a : led.a)
        j["a"].push_back(std::isfinite(a) ? json(a) : json("inf"));
    j["b"] = led.b;
    j["c"] = led.c;
    if (!led.b_exact.empty()) {
        j["b_exact"] = led.b_exact;
        j["c_exact"] = led.c_exact;
    }
    j["threshold_mass"] = led.threshold_mass;
    j["threshold_note"] = led.threshold_note;
    return j;
}

inline json bound_report_to_json(const BoundReport& rep) {
    json j;
    j["tag"] = to_string(rep.tag);
    j["T"] = rep.T;
    j["gamma"] = rep.gamma;
    j["divergent"] = rep.divergent;
    j["pass"] = rep.pass;
    j["fitted_power"] = rep.fitted_power;
    j["fitted_log_power"] = rep.fitted_log_power;
    j["sigma"] = rep.sigma;
    j["lhs"] = rep.lhs;
    j["rhs_template"] = rep.rhs_template;
    j["ratio"] = rep.ratio;
    return j;
}

// --- file emission -------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Trajectory CSV: t, sup_u, sup_v, then mass_u@rho / mass_v@rho per
/// configured radius. The full resolved configuration rides along as a
/// comment line for provenance.
inline std::string trajectory_csv(const SolveReport& rep, const SolveConfig& sc,
                                  const json& resolved_config) {
    std::string s = "# config: " + resolved_config.dump() + "\n";
    s += "t,sup_u,sup_v";
    for (double rho : sc.mass_radii) {
        s += ",mass_u@" + fmt_g17(rho);
        s += ",mass_v@" + fmt_g17(rho);
    }
    s += "\n";
    for (const auto& rec : rep.history) {
        s += fmt_g17(rec.t) + "," + fmt_g17(rec.sup_u) + "," + fmt_g17(rec.sup_v);
        for (size_t k = 0; k < sc.mass_radii.size(); ++k)
            s += "," + fmt_g17(rec.mass_u[k]) + "," + fmt_g17(rec.mass_v[k]);
        s += "\n";
    }
    return s;
}

inline std::string mass_curve_csv(const MassCurve& curve, const json& resolved_config) {
    std::string s = "# config: " + resolved_config.dump() + "\n";
    s += "sigma,mass\n";
    for (size_t i = 0; i < curve.radii.size(); ++i)
        s += fmt_g17(curve.radii[i]) + "," + fmt_g17(curve.masses[i]) + "\n";
    return s;
}

inline std::string bound_report_csv(const BoundReport& rep, const json& resolved_config) {
    std::string s = "# config: " + resolved_config.dump() + "\n";
    s += "# tag: " + std::string(to_string(rep.tag)) + "\n";
    s += "# divergent: " + std::string(rep.divergent ? "true" : "false") + "\n";
    s += "# pass: " + std::string(rep.pass ? "true" : "false") + "\n";
    s += "# fitted_power: " + fmt_g17(rep.fitted_power) + "\n";
    s += "# fitted_log_power: " + fmt_g17(rep.fitted_log_power) + "\n";
    s += "sigma,lhs,rhs_template,ratio\n";
    for (size_t i = 0; i < rep.sigma.size(); ++i)
        s += fmt_g17(rep.sigma[i]) + "," + fmt_g17(rep.lhs[i]) + "," +
             fmt_g17(rep.rhs_template[i]) + "," + fmt_g17(rep.ratio[i]) + "\n";
    return s;
}

} // namespace ptl
