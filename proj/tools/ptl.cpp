// ptl: numerical laboratory for the semilinear system
//   du/dt = D1 Lap u + v^p,   dv/dt = D2 Lap v + u^q
// with radial measure data. Subcommands: classify, kernel-selftest, solve,
// probe, certify, bounds. Exit codes: 0 success, 1 validation error,
// 2 numerical failure.

#include "ptl/config_io.hpp"
#include "ptl/kernel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

using namespace ptl;
namespace fs = std::filesystem;

namespace {

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

ExponentConfig cfg_from_flags_or_config(const json& config, int N, const std::string& p,
                                        const std::string& q, double D1, double D2) {
    if (!p.empty() || !q.empty() || N > 0) {
        if (p.empty() || q.empty() || N <= 0)
            throw validation_error("provide all of --N, --p, --q (or none and use --config)");
        json j;
        j["N"] = N;
        j["p"] = p;
        j["q"] = q;
        j["D1"] = D1;
        j["D2"] = D2;
        return exponent_config_from_json(j);
    }
    if (!config.contains("cfg")) throw validation_error("config lacks a cfg block");
    return exponent_config_from_json(config.at("cfg"));
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        write_text_file(out_path, text);
    }
}

// ---- kernel-selftest -------------------------------------------------------

std::string run_kernel_selftest(int nodes, int samples, unsigned seed) {
    json resolved = {{"nodes", nodes}, {"samples", samples}, {"seed", seed}};
    std::string csv = "# config: " + resolved.dump() + "\n";
    csv += "check,param,worst,pass\n";
    auto row = [&](const std::string& check, const std::string& param, double worst, bool pass) {
        csv += check + "," + param + "," + fmt_g17(worst) + "," + (pass ? "1" : "0") + "\n";
    };

    for (int N : {1, 2, 3})
        for (double t : {0.01, 1.0, 100.0}) {
            const double err = std::abs(gauss_mass_radial(t, N) - 1.0);
            row("gauss-normalization", "N=" + std::to_string(N) + ";t=" + fmt_g17(t), err,
                err < 1e-10);
        }

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    PropagateOptions opts;
    opts.check_truncation = false;
    for (int N : {1, 2, 3}) {
        RadialMesh mesh = RadialMesh::graded(N, 12.0, nodes, 1e-4);
        double worst_comp = 0.0, worst_mass = 0.0;
        for (int it = 0; it < samples; ++it) {
            std::vector<double> vals(mesh.r.size(), 0.05 + 0.2 * U(rng));
            for (int k = 0; k < 3; ++k) {
                const double w = 0.3 + 1.7 * U(rng), c = 2.0 * U(rng), r0 = 3.0 * U(rng);
                for (size_t i = 0; i < vals.size(); ++i)
                    vals[i] += c * std::exp(-(mesh.r[i] - r0) * (mesh.r[i] - r0) / (w * w));
            }
            RadialField f(mesh, vals, 0.0);
            const double s = 0.05 + 0.5 * U(rng);
            const double t = s + 0.05 + 0.8 * U(rng);
            RadialField once = propagate(f, t, 1.0, opts);
            RadialField twice = propagate(propagate(f, s, 1.0, opts), t - s, 1.0, opts);
            const double sup = once.sup_norm();
            for (size_t i = 0; i < vals.size(); ++i)
                if (mesh.r[i] < 0.75 * mesh.rmax())
                    worst_comp =
                        std::max(worst_comp, std::abs(once.values[i] - twice.values[i]) / sup);
            const double tail = f.values.back();
            const double full = unit_ball_volume(N) * std::pow(mesh.rmax(), N);
            const double m0 = ball_integral(f, mesh.rmax()) - tail * full;
            const double m1 = ball_integral(once, mesh.rmax()) - tail * full;
            worst_mass = std::max(worst_mass, std::abs(m1 - m0) / std::abs(m0));
        }
        row("semigroup-composition", "N=" + std::to_string(N), worst_comp, worst_comp < 1e-8);
        row("mass-conservation", "N=" + std::to_string(N), worst_mass, worst_mass < 1e-5);
    }

    for (int N : {1, 2, 3}) {
        RadialMesh mesh = RadialMesh::graded(N, 10.0, std::max(128, nodes / 2), 1e-4);
        std::vector<double> vals(mesh.r.size());
        for (size_t i = 0; i < vals.size(); ++i)
            vals[i] = 1.0 / (0.05 + std::pow(mesh.r[i], 1.4));
        RadialField pl(mesh, vals, 0.0);
        auto jr = jensen_check(pl, 0.3, 2.5, {0.0, 0.4, 1.1, 2.5, 4.0});
        row("jensen", "N=" + std::to_string(N) + ";alpha=2.5", jr.worst_margin, jr.passed);

        std::vector<double> uni(mesh.r.size());
        for (size_t i = 0; i < uni.size(); ++i) uni[i] = mesh.r[i] <= 0.8 ? 1.0 : 0.0;
        auto kr = kernel_lower_bound_check(0.8, 0.64, RadialField(mesh, uni, 0.0),
                                           {0.0, 0.5, 1.2, 2.5});
        row("kernel-mass-lower-bound", "N=" + std::to_string(N), kr.worst_margin, kr.passed);
    }

    double worst_pair = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 1000; ++it) {
        const int N = 1 + static_cast<int>(3 * U(rng));
        const double alpha = std::exp(std::log(0.1) + std::log(100.0) * U(rng));
        const double beta = std::exp(std::log(0.1) + std::log(100.0) * U(rng));
        const double s = 0.01 + 5.0 * U(rng);
        const double t = s + 0.01 + 5.0 * U(rng);
        auto pair = gaussian_power_convolution_bound(N, alpha, beta, 5.0 * U(rng), 8.0 * U(rng),
                                                     s, t);
        worst_pair = std::min(worst_pair, pair.lhs - pair.rhs);
    }
    row("gaussian-power-convolution", "1000 samples", worst_pair, worst_pair >= -1e-12);

    bool covers = true;
    for (int N : {1, 2, 3}) covers = covers && ball_cover(2.5, N).verify();
    row("ball-cover", "k=2.5", covers ? 0.0 : 1.0, covers);
    return csv;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a two-component semilinear heat system"};
    app.require_subcommand(1);
    app.footer("The PTL_THREADS environment variable caps worker threads.");

    // ---- classify ----
    auto* cls = app.add_subcommand("classify", "classify exponents into regimes A..F");
    int cls_N = 0;
    std::string cls_p, cls_q;
    double cls_D1 = 1.0, cls_D2 = 1.0;
    cls->add_option("--N", cls_N, "spatial dimension")->required();
    cls->add_option("--p", cls_p, "exponent p (rational or decimal, parsed exactly)")->required();
    cls->add_option("--q", cls_q, "exponent q")->required();
    cls->add_option("--D1", cls_D1, "diffusion coefficient of u");
    cls->add_option("--D2", cls_D2, "diffusion coefficient of v");

    // ---- kernel-selftest ----
    auto* selftest = app.add_subcommand("kernel-selftest", "run kernel invariants, emit CSV");
    int st_nodes = 640, st_samples = 3;
    unsigned st_seed = 1;
    std::string st_out;
    selftest->add_option("--nodes", st_nodes, "mesh nodes for the composition check");
    selftest->add_option("--samples", st_samples, "random fields per dimension");
    selftest->add_option("--seed", st_seed, "rng seed");
    selftest->add_option("--out", st_out, "output CSV path (default stdout)");
    selftest->footer("CSV columns: check, param, worst, pass.");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "run the Picard solver on configured data");
    std::string solve_config, solve_outdir;
    double ov_T = -1.0;
    int ov_steps = -1, ov_nodes = -1;
    solve->add_option("--config", solve_config, "run-config JSON")->required();
    solve->add_option("--out-dir", solve_outdir, "output directory (overrides config)");
    solve->add_option("--T", ov_T, "horizon override");
    solve->add_option("--n-steps", ov_steps, "time slab count override");
    solve->add_option("--M", ov_nodes, "mesh node count override");
    solve->footer("trajectory.csv columns: t, sup_u, sup_v, then mass_u@rho and mass_v@rho per\n"
                  "configured radius; report.json carries the outcome, per-step history,\n"
                  "Duhamel residual windows, and the resolved config.");

    // ---- probe ----
    auto* probe = app.add_subcommand("probe", "bisect the critical family constant");
    std::string probe_config, probe_case, probe_out;
    double probe_lo = 0.0, probe_hi = 0.0;
    probe->add_option("--config", probe_config, "run-config JSON")->required();
    probe->add_option("--case", probe_case, "case label (A, B or C)")->required();
    probe->add_option("--c-lo", probe_lo, "constant expected to converge")->required();
    probe->add_option("--c-hi", probe_hi, "constant expected to blow up")->required();
    probe->add_option("--out", probe_out, "output JSON path (default stdout)");

    // ---- certify ----
    auto* certify = app.add_subcommand("certify", "nonexistence certificate ledger");
    std::string cert_case, cert_p, cert_q, cert_config, cert_out;
    int cert_N = 0, cert_nmax = 12;
    double cert_M = -1.0, cert_rho = -1.0, cert_D1 = 1.0, cert_D2 = 1.0;
    certify->add_option("--case", cert_case, "case label (A, B or C)")->required();
    certify->add_option("--M", cert_M, "observed ball mass")->required();
    certify->add_option("--rho", cert_rho, "ball radius")->required();
    certify->add_option("--N", cert_N, "spatial dimension");
    certify->add_option("--p", cert_p, "exponent p");
    certify->add_option("--q", cert_q, "exponent q");
    certify->add_option("--D1", cert_D1, "diffusion coefficient of u");
    certify->add_option("--D2", cert_D2, "diffusion coefficient of v");
    certify->add_option("--config", cert_config, "run-config JSON providing cfg");
    certify->add_option("--n-max", cert_nmax, "ledger length");
    certify->add_option("--out", cert_out, "output JSON path (default stdout)");

    // ---- bounds ----
    auto* bounds = app.add_subcommand("bounds", "evaluate a necessary-condition bound");
    std::string bounds_config, bounds_tag, bounds_out, bounds_curves;
    double bounds_gamma = 1.0;
    bounds->add_option("--config", bounds_config, "run-config JSON")->required();
    bounds->add_option("--theorem", bounds_tag,
                       "bound tag: mass-u, mass-v, log-B, log-C, sigma-D, sigma-E, unit-DE")
        ->required();
    bounds->add_option("--gamma", bounds_gamma, "constant to test the bound against");
    bounds->add_option("--out", bounds_out, "output CSV path (default stdout)");
    bounds->add_option("--curves-dir", bounds_curves,
                       "also emit mass_curve_u.csv / mass_curve_v.csv (columns: sigma, mass)");
    bounds->footer("CSV columns: sigma, lhs, rhs_template, ratio. The fitted decay rates and\n"
                   "pass/fail against --gamma ride along as comment lines.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cls->parsed()) {
            json j;
            j["N"] = cls_N;
            j["p"] = cls_p;
            j["q"] = cls_q;
            j["D1"] = cls_D1;
            j["D2"] = cls_D2;
            ExponentConfig cfg = exponent_config_from_json(j);
            if (classification_is_fragile(cfg))
                std::cerr << "warning: configuration sits near a regime boundary; the label is "
                             "tolerance-dependent for non-exact inputs\n";
            json out;
            out["case"] = to_string(classify(cfg));
            out["alpha"] = cfg.alpha();
            out["beta"] = cfg.beta();
            out["sing_u"] = cfg.sing_u();
            out["sing_v"] = cfg.sing_v();
            out["fujita_q"] = cfg.fujita_q();
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (selftest->parsed()) {
            emit(st_out, run_kernel_selftest(st_nodes, st_samples, st_seed));
            return 0;
        }

        if (solve->parsed()) {
            json config = load_config(solve_config);
            ExponentConfig cfg = exponent_config_from_json(config.at("cfg"));
            RadialMeasure mu = measure_from_json(config.at("family_u"), cfg.N);
            RadialMeasure nu = measure_from_json(config.at("family_v"), cfg.N);
            SolveConfig sc = solve_config_from_json(config, cfg);
            if (!config.contains("solve") || !config.at("solve").contains("duhamel_windows"))
                sc.duhamel_windows = 2;
            if (ov_T > 0.0) sc.T = ov_T;
            if (ov_steps > 0) sc.n_steps = ov_steps;
            if (ov_nodes > 0) sc.mesh.nodes = ov_nodes;
            std::string outdir = !solve_outdir.empty() ? solve_outdir
                                                       : config.value("output_dir", std::string("."));
            fs::create_directories(outdir);

            json resolved;
            resolved["cfg"] = exponent_config_to_json(cfg);
            resolved["family_u"] = measure_to_json(mu);
            resolved["family_v"] = measure_to_json(nu);
            resolved["solve"] = solve_config_to_json(sc);
            resolved["seed"] = config.value("seed", 0);

            auto result = picard_solve(mu, nu, sc);
            json rep = solve_report_to_json(result.report, sc);
            rep["config"] = resolved;
            write_text_file(outdir + "/report.json", rep.dump(2) + "\n");
            write_text_file(outdir + "/trajectory.csv",
                            trajectory_csv(result.report, sc, resolved));
            std::cout << "outcome: " << to_string(result.report.outcome) << "\n";
            return 0;
        }

        if (probe->parsed()) {
            json config = load_config(probe_config);
            ExponentConfig cfg = exponent_config_from_json(config.at("cfg"));
            SolveConfig sc = solve_config_from_json(config, cfg);
            CaseLabel label = case_from_string(probe_case);
            auto pr = blowup_probe(label, cfg, probe_lo, probe_hi, sc);
            json out;
            out["case"] = probe_case;
            out["conclusive"] = pr.conclusive;
            if (pr.conclusive) {
                out["c_lo"] = pr.c_lo;
                out["c_hi"] = pr.c_hi;
                out["rel_width"] = pr.rel_width();
            } else {
                out["status"] = "inconclusive";
                out["reason"] = pr.reason;
            }
            out["runs"] = pr.runs;
            json resolved;
            resolved["cfg"] = exponent_config_to_json(cfg);
            resolved["solve"] = solve_config_to_json(sc);
            out["config"] = resolved;
            emit(probe_out, out.dump(2) + "\n");
            return pr.conclusive ? 0 : 2;
        }

        if (certify->parsed()) {
            json config = cert_config.empty() ? json::object() : load_config(cert_config);
            ExponentConfig cfg =
                cfg_from_flags_or_config(config, cert_N, cert_p, cert_q, cert_D1, cert_D2);
            CaseLabel label = case_from_string(cert_case);
            IterationLedger led;
            switch (label) {
                case CaseLabel::A: led = ledger_case_a(cfg, cert_M, cert_rho, cert_nmax); break;
                case CaseLabel::B: led = ledger_case_b(cfg, cert_M, cert_rho, cert_nmax); break;
                case CaseLabel::C: led = ledger_case_c(cfg, cert_M, cert_rho, cert_nmax); break;
                default:
                    throw validation_error("certificates exist for cases A, B and C only");
            }
            json out = ledger_to_json(led);
            out["certified_nonexistence"] = cert_M > led.threshold_mass;
            out["config"] = exponent_config_to_json(cfg);
            emit(cert_out, out.dump(2) + "\n");
            return 0;
        }

        if (bounds->parsed()) {
            json config = load_config(bounds_config);
            ExponentConfig cfg = exponent_config_from_json(config.at("cfg"));
            RadialMeasure mu = measure_from_json(config.at("family_u"), cfg.N);
            RadialMeasure nu = measure_from_json(config.at("family_v"), cfg.N);
            BoundTag tag = bound_tag_from_string(bounds_tag);
            double T = 1.0, smin = 1e-6, smax = 1e-2;
            int spoints = 30;
            if (config.contains("bounds")) {
                const json& jb = config.at("bounds");
                T = jb.value("T", T);
                smin = jb.value("sigma_min", smin);
                smax = jb.value("sigma_max", smax);
                spoints = jb.value("sigma_points", spoints);
                bounds_gamma = jb.value("gamma", bounds_gamma);
            }
            auto grid = geometric_grid(smin, smax, spoints);
            auto rep = bound_report(tag, mu, nu, cfg, grid, bounds_gamma, T);
            json resolved;
            resolved["cfg"] = exponent_config_to_json(cfg);
            resolved["family_u"] = measure_to_json(mu);
            resolved["family_v"] = measure_to_json(nu);
            resolved["bounds"] = {{"T", T},          {"sigma_min", smin},
                                  {"sigma_max", smax}, {"sigma_points", spoints},
                                  {"gamma", bounds_gamma}, {"theorem", bounds_tag}};
            emit(bounds_out, bound_report_csv(rep, resolved));
            if (!bounds_curves.empty()) {
                fs::create_directories(bounds_curves);
                write_text_file(bounds_curves + "/mass_curve_u.csv",
                                mass_curve_csv(mass_curve(mu, grid), resolved));
                write_text_file(bounds_curves + "/mass_curve_v.csv",
                                mass_curve_csv(mass_curve(nu, grid), resolved));
            }
            return 0;
        }
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: config schema violation: " << e.what() << "\n";
        return 1;
    } catch (const domain_too_small_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const non_integrable_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
