#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("PTL_CLI");
    REQUIRE(p != nullptr);
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WEXITSTATUS(status);
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_config(const std::string& path) {
    json cfg;
    cfg["cfg"] = {{"N", 3}, {"p", "2"}, {"q", "3"}};
    cfg["family_u"] = {{"family", "powerlaw"}, {"c", 0.3}, {"a", 1.2}, {"cutoff", 1.0}};
    cfg["family_v"] = {{"family", "powerlaw"}, {"c", 0.3}, {"a", 1.6}, {"cutoff", 1.0}};
    cfg["solve"] = {{"T", 0.25},       {"n_steps", 50}, {"n_sub", 2},
                    {"Rmax", 10.0},    {"M", 128},      {"first_frac", 3e-4},
                    {"tol", 1e-8},     {"threshold", 1e8}, {"mass_radii", {0.5}}};
    cfg["bounds"] = {{"sigma_min", 1e-5}, {"sigma_max", 1e-2}, {"sigma_points", 8}};
    cfg["seed"] = 7;
    std::ofstream out(path);
    out << cfg.dump(2);
    return path;
}

} // namespace

TEST_CASE("classify emits the regime summary as JSON") {
    auto res = run("classify --N 3 --p 2 --q 3");
    CHECK(res.exit_code == 0);
    json j = json::parse(res.out);
    CHECK(j.at("case") == "A");
    CHECK(j.at("alpha").get<double>() == Catch::Approx(0.6));
    CHECK(j.at("beta").get<double>() == Catch::Approx(0.8));
    CHECK(j.at("sing_u").get<double>() == Catch::Approx(1.2));
    CHECK(j.at("sing_v").get<double>() == Catch::Approx(1.6));
    CHECK(j.at("fujita_q").get<double>() == Catch::Approx(5.0 / 3.0));
}

TEST_CASE("missing required flags exit with code 1") {
    CHECK(run("classify --N 3").exit_code == 1);
    CHECK(run("unknown-subcommand").exit_code == 1);
    CHECK(run("solve").exit_code == 1);
}

TEST_CASE("invalid configurations exit with code 1") {
    CHECK(run("classify --N 3 --p 3 --q 2").exit_code == 1);  // p > q
    CHECK(run("classify --N 3 --p 1 --q 1").exit_code == 1);  // pq = 1
    CHECK(run("solve --config /nonexistent.json").exit_code == 1);
}

TEST_CASE("probe with a non-bracketing interval reports inconclusive, exit 2") {
    const std::string cfg = write_config("/tmp/ptl_cli_probe.json");
    auto res = run("probe --config " + cfg + " --case A --c-lo 5 --c-hi 20 --out /tmp/ptl_probe_out.json");
    CHECK(res.exit_code == 2);
    json j = json::parse(slurp("/tmp/ptl_probe_out.json"));
    CHECK(j.at("status") == "inconclusive");
    CHECK(j.at("conclusive") == false);
}

TEST_CASE("solve emits trajectory CSV and report JSON with embedded config") {
    const std::string cfg = write_config("/tmp/ptl_cli_solve.json");
    auto res = run("solve --config " + cfg + " --out-dir /tmp/ptl_cli_out1");
    REQUIRE(res.exit_code == 0);
    const std::string traj = slurp("/tmp/ptl_cli_out1/trajectory.csv");
    CHECK(traj.rfind("# config:", 0) == 0);
    CHECK(traj.find("t,sup_u,sup_v,mass_u@0.5,mass_v@0.5") != std::string::npos);
    json rep = json::parse(slurp("/tmp/ptl_cli_out1/report.json"));
    CHECK(rep.at("outcome") == "Converged");
    CHECK(rep.contains("config"));
    CHECK(rep.at("config").at("cfg").at("p") == "2");
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const std::string cfg = write_config("/tmp/ptl_cli_det.json");
    REQUIRE(run("solve --config " + cfg + " --out-dir /tmp/ptl_cli_det1").exit_code == 0);
    REQUIRE(run("solve --config " + cfg + " --out-dir /tmp/ptl_cli_det2").exit_code == 0);
    CHECK(slurp("/tmp/ptl_cli_det1/trajectory.csv") == slurp("/tmp/ptl_cli_det2/trajectory.csv"));
    CHECK(slurp("/tmp/ptl_cli_det1/report.json") == slurp("/tmp/ptl_cli_det2/report.json"));

    auto s1 = run("kernel-selftest --nodes 96 --samples 1 --seed 5");
    auto s2 = run("kernel-selftest --nodes 96 --samples 1 --seed 5");
    CHECK(s1.out == s2.out);
}

TEST_CASE("certify emits a ledger with tracked constants") {
    auto res = run("certify --case A --M 100 --rho 0.2 --N 3 --p 2 --q 3");
    REQUIRE(res.exit_code == 0);
    json j = json::parse(res.out);
    CHECK(j.at("closed_forms_ok") == true);
    CHECK(j.at("constants").contains("a_star"));
    CHECK(j.at("constants").at("gamma").at("value").get<double>() == Catch::Approx(1.0));
    CHECK(j.at("threshold_mass").get<double>() > 0.0);
    CHECK(j.contains("certified_nonexistence"));

    auto big = run("certify --case A --M 1e9 --rho 0.2 --N 3 --p 2 --q 3");
    CHECK(json::parse(big.out).at("certified_nonexistence") == true);
}

TEST_CASE("bounds emits the sigma/lhs/rhs/ratio table") {
    const std::string cfg = write_config("/tmp/ptl_cli_bounds.json");
    auto res = run("bounds --config " + cfg + " --theorem mass-u --gamma 10");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.find("sigma,lhs,rhs_template,ratio") != std::string::npos);
    CHECK(res.out.find("# pass: true") != std::string::npos);
    CHECK(res.out.find("# fitted_power: 1.8") != std::string::npos);

    auto bad = run("bounds --config " + cfg + " --theorem log-B");
    CHECK(bad.exit_code == 1); // tag/case mismatch is a validation error
}

TEST_CASE("bounds can emit the family mass curves") {
    const std::string cfg = write_config("/tmp/ptl_cli_curves.json");
    auto res = run("bounds --config " + cfg +
                   " --theorem mass-u --gamma 10 --curves-dir /tmp/ptl_cli_curves --out /tmp/ptl_cli_curves/bounds.csv");
    REQUIRE(res.exit_code == 0);
    const std::string curve = slurp("/tmp/ptl_cli_curves/mass_curve_u.csv");
    CHECK(curve.find("sigma,mass") != std::string::npos);
    CHECK(curve.rfind("# config:", 0) == 0);
    CHECK(slurp("/tmp/ptl_cli_curves/mass_curve_v.csv").find("sigma,mass") != std::string::npos);
}

TEST_CASE("solve reports include Duhamel residual windows") {
    const std::string cfg = write_config("/tmp/ptl_cli_duh.json");
    REQUIRE(run("solve --config " + cfg + " --out-dir /tmp/ptl_cli_duh_out").exit_code == 0);
    json rep = json::parse(slurp("/tmp/ptl_cli_duh_out/report.json"));
    REQUIRE(rep.contains("duhamel"));
    for (const auto& w : rep.at("duhamel")) {
        CHECK(w.at("res_u").get<double>() < 1e-2);
        CHECK(w.at("res_v").get<double>() < 1e-2);
        CHECK(w.at("tau").get<double>() < w.at("t").get<double>());
    }
}
