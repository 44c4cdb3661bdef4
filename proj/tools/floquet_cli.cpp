// floquet: band sweeps, flux checks, kernel dumps and verification suites.
//
// Exit codes: 0 ok, 1 internal error, 2 config error, 3 numerical gate.

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "floquet/csv.hpp"
#include "floquet/spectral_engine.hpp"
#include "floquet/symbol_io.hpp"
#include "floquet/toroidal_kernel.hpp"
#include "floquet/verify.hpp"

using namespace floquet;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

Vec parse_vec(const std::string& s) {
    Vec v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("not a number list: \"" + s + "\"");
        }
    }
    if (v.empty()) throw ConfigError("empty vector \"" + s + "\"");
    return v;
}

std::string vec_str(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

void check_dim(const Vec& v, int d, const char* what) {
    if (static_cast<int>(v.size()) != d)
        throw ConfigError(std::string(what) + " has " + std::to_string(v.size()) + " components, symbol has d=" +
                          std::to_string(d));
}

// Parameters shared by the subcommands. A run config (JSON) supplies values
// that were not given on the command line.
struct Params {
    std::string config;
    std::string symbol;
    std::string potential;
    std::vector<std::string> waypoints;
    int samples = 10;
    int window = 8;
    int k_keep = 0;
    int grid = 0;
    double cutoff = 8.0;
    double tail_tol = 0.0;
    int R_per = -1;
    std::string xi = "0";
    std::string out;
    std::string format = "csv";
    int radius = -1;
    std::vector<int> radii{4, 8, 16};
    double conv_tol = 1e-10;
    std::vector<std::string> suites;
    std::string config_dir = FLOQUET_CONFIG_DIR;
    std::string report;
    bool mis_sign = false;
    unsigned seed = 2024;
};

template <class T>
void fill(CLI::App& app, const char* flag, const json& j, const char* key, T& dst) {
    auto* o = app.get_option_no_throw(flag);
    if (o && o->count() > 0) return;
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
    }
}

void merge_config(CLI::App& app, Params& p) {
    if (p.config.empty()) return;
    json j = load_json(p.config);
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    fill(app, "--symbol", j, "symbol", p.symbol);
    fill(app, "--potential", j, "potential", p.potential);
    fill(app, "--waypoint", j, "waypoints", p.waypoints);
    fill(app, "--samples", j, "samples_per_segment", p.samples);
    fill(app, "--window", j, "window_radius", p.window);
    fill(app, "--k-keep", j, "k_keep", p.k_keep);
    fill(app, "--grid", j, "grid_n", p.grid);
    fill(app, "--cutoff", j, "cutoff_N", p.cutoff);
    fill(app, "--tail-tol", j, "tail_tol", p.tail_tol);
    fill(app, "--r-per", j, "R_per", p.R_per);
    fill(app, "--xi", j, "xi", p.xi);
    fill(app, "--out", j, "output", p.out);
    fill(app, "--format", j, "format", p.format);
    fill(app, "--radius", j, "kernel_radius", p.radius);
    fill(app, "--radii", j, "radii", p.radii);
    fill(app, "--tol", j, "tolerance", p.conv_tol);
    fill(app, "--suite", j, "suites", p.suites);
    fill(app, "--config-dir", j, "config_dir", p.config_dir);
    fill(app, "--report", j, "report", p.report);
    fill(app, "--seed", j, "seed", p.seed);
    // relative paths in a run config are relative to the config file
    auto base = std::filesystem::path(p.config).parent_path();
    auto rebase = [&](std::string& s, const char* flag) {
        auto* o = app.get_option_no_throw(flag);
        if (!s.empty() && (!o || o->count() == 0) && std::filesystem::path(s).is_relative())
            s = (base / s).string();
    };
    if (j.contains("symbol")) rebase(p.symbol, "--symbol");
    if (j.contains("potential")) rebase(p.potential, "--potential");
}

PeriodicSymbol need_symbol(const Params& p) {
    if (p.symbol.empty()) throw ConfigError("no symbol given (--symbol or \"symbol\" in the run config)");
    return load_symbol(p.symbol);
}

// Smallest safe grid, rounded up. In d = 1 the grid is cheap and a coarse one
// lifts the round-off floor of the kernel tail above the default tolerance.
int auto_grid(int window, double cutoff, const Vec& xi_max, int max_mu) {
    int need = 2 * (window + static_cast<int>(std::ceil(cutoff + sup_norm(xi_max))) + max_mu) + 1;
    need = (need + 7) / 8 * 8;
    return xi_max.size() == 1 ? std::max(need, 64) : need;
}

json run_record(const Params& p, const std::string& task) {
    return {{"tool", "floquet"},   {"version", kVersion},     {"task", task},       {"symbol", p.symbol},
            {"potential", p.potential}, {"window_radius", p.window}, {"cutoff_N", p.cutoff}, {"grid_n", p.grid},
            {"tail_tol", p.tail_tol}};
}

int cmd_bands(Params& p) {
    auto F = need_symbol(p);
    const int d = F.dimension();
    MomentumPath path;
    path.samples_per_segment = p.samples;
    if (p.waypoints.empty()) p.waypoints = {d == 1 ? "0" : "0,0", d == 1 ? "0.5" : "0.5,0"};
    for (const auto& w : p.waypoints) {
        path.waypoints.push_back(parse_vec(w));
        check_dim(path.waypoints.back(), d, "waypoint");
    }
    if (p.samples < 1) throw ConfigError("samples_per_segment must be >= 1");
    if (p.window < 0 || p.window > 64) throw ConfigError("window_radius must be in [0, 64]");
    DualWindow window(d, p.window);
    int k_keep = p.k_keep > 0 ? p.k_keep : default_k_keep(window);
    if (k_keep > window.size()) throw ConfigError("k_keep exceeds the window size");

    std::optional<MagneticSetup> mag;
    if (!p.potential.empty()) {
        auto A = load_potential(p.potential);
        if (A.d != d) throw ConfigError("potential dimension differs from the symbol");
        Vec xi_max(d, 0.0);
        for (const auto& w : path.waypoints)
            for (int j = 0; j < d; ++j) xi_max[j] = std::max(xi_max[j], std::abs(w[j]));
        if (p.grid <= 0) p.grid = auto_grid(p.window, p.cutoff, xi_max, F.max_mu());
        MagneticOptions mo;
        mo.tail_tol = p.tail_tol;
        mo.R_per = p.R_per;
        mag = MagneticSetup{A, GridSpec{d, p.grid}, CutoffProfile{p.cutoff}, mo};
    }
    auto B = bands(F, path, window, k_keep, mag ? &*mag : nullptr);
    std::string prefix = p.out.empty() ? "bands" : p.out;
    write_bands_csv(B, prefix + ".csv");
    write_bands_json(B, prefix + ".json", run_record(p, "bands").dump());
    std::cerr << "wrote " << prefix << ".csv (" << B.xi.size() << " samples, " << k_keep << " bands)\n";
    return 0;
}

int cmd_check_flux(Params& p) {
    if (p.potential.empty()) throw ConfigError("no potential given");
    auto A = load_potential(p.potential);
    auto rep = zero_flux_gate(curl(A));
    json j{{"pass", rep.pass}, {"worst", rep.worst}, {"faces", json::array()}};
    for (const auto& [jk, f] : rep.fluxes) j["faces"].push_back({{"j", jk.first + 1}, {"k", jk.second + 1}, {"flux", f}});
    std::cout << j.dump(2) << '\n';
    if (!rep.pass) throw GateError(rep.message);
    return 0;
}

int cmd_kernel(Params& p) {
    auto F = need_symbol(p);
    const int d = F.dimension();
    Vec xi = parse_vec(p.xi);
    check_dim(xi, d, "xi");
    if (p.format != "csv" && p.format != "binary") throw ConfigError("format must be csv or binary");
    std::optional<CutoffProfile> cut;
    if (p.cutoff > 0) cut = CutoffProfile{p.cutoff};
    int R = p.radius >= 0 ? p.radius : default_kernel_radius(xi, cut ? cut->N : 8.0);
    if (p.grid <= 0) p.grid = 64;
    auto K = build_kernel(F, xi, DualWindow(d, R), GridSpec{d, p.grid}, cut ? &*cut : nullptr);
    if (K.distributional) std::cerr << "warning: no cutoff, the kernel is a truncated distributional sum\n";
    std::string path = p.out.empty() ? "kernel." + std::string(p.format == "csv" ? "csv" : "bin") : p.out;
    write_kernel(K, path, p.format == "binary");
    std::cerr << "wrote " << path << '\n';
    return 0;
}

int cmd_fiber_matrix(Params& p) {
    auto F = need_symbol(p);
    const int d = F.dimension();
    Vec xi = parse_vec(p.xi);
    check_dim(xi, d, "xi");
    DualWindow window(d, p.window);
    CMatrix M;
    if (!p.potential.empty()) {
        auto A = load_potential(p.potential);
        if (A.d != d) throw ConfigError("potential dimension differs from the symbol");
        if (p.grid <= 0) p.grid = auto_grid(p.window, p.cutoff, xi, F.max_mu());
        CutoffProfile cut{p.cutoff};
        MagneticOptions mo;
        mo.tail_tol = p.tail_tol;
        mo.R_per = p.R_per;
        M = magnetic_fiber_matrix(F, A, xi, window, GridSpec{d, p.grid}, &cut, mo).M;
    } else {
        FiberOptions fo;
        fo.debug_mis_sign = p.mis_sign;
        M = build_fiber_matrix(F, xi, window, Exec::parallel, fo).entries;
    }
    std::ofstream fout;
    if (!p.out.empty()) {
        fout.open(p.out);
        if (!fout) throw ConfigError("cannot open " + p.out);
    }
    std::ostream& out = p.out.empty() ? std::cout : fout;
    out << "# xi=" << vec_str(xi) << " window_radius=" << p.window << " size=" << M.rows()
        << " hermiticity_defect=" << format_double(hermiticity_defect(M)) << " columns=re,im interleaved\n";
    for (Eigen::Index a = 0; a < M.rows(); ++a) {
        for (Eigen::Index b = 0; b < M.cols(); ++b)
            out << (b ? "," : "") << format_double(M(a, b).real()) << ',' << format_double(M(a, b).imag());
        out << '\n';
    }
    return 0;
}

int cmd_converge(Params& p) {
    auto F = need_symbol(p);
    Vec xi = parse_vec(p.xi);
    check_dim(xi, F.dimension(), "xi");
    if (p.radii.size() < 2) throw ConfigError("need at least two radii");
    int k_keep = p.k_keep > 0 ? p.k_keep : default_k_keep(DualWindow(F.dimension(), p.radii.front()));
    auto rep = truncation_convergence(F, xi, p.radii, k_keep, p.conv_tol);
    json j{{"xi", xi}, {"radii", rep.radii}, {"cauchy", rep.cauchy}, {"stalled", rep.stalled}, {"k_keep", k_keep}};
    j["lambda"] = json::array();
    for (const auto& v : rep.values) j["lambda"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
    if (p.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        std::ofstream(p.out) << j.dump(2) << '\n';
    if (rep.stalled) std::cerr << "warning: Cauchy differences stopped decreasing above " << p.conv_tol << '\n';
    return 0;
}

int cmd_verify(Params& p, bool suites_given) {
    std::vector<std::string> names = suites_given ? p.suites : available_suites();
    names.erase(std::remove(names.begin(), names.end(), std::string()), names.end());
    if (names.empty()) throw ConfigError("empty suite list");
    VerifyOptions opt{p.config_dir, p.mis_sign, p.seed};
    json report = json::array();
    bool all = true;
    for (const auto& n : names) {
        auto r = run_suite(n, opt);
        all = all && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  worst=" << format_double(r.worst)
                  << "  tol=" << format_double(r.tol) << '\n';
        report.push_back({{"suite", r.name}, {"pass", r.pass}, {"worst", r.worst}, {"tol", r.tol}, {"detail", r.detail}});
    }
    if (!p.report.empty()) std::ofstream(p.report) << report.dump(2) << '\n';
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("FLOQUET_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"Bloch-Floquet fiber spectra of periodic pseudo-differential operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Params p;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", p.config, "run config (JSON); flags override its keys");
        s->add_option("--symbol", p.symbol, "symbol file (JSON)");
    };
    auto window_opt = [&](CLI::App* s) { s->add_option("--window", p.window, "dual window radius N_w"); };
    auto magnetic_opts = [&](CLI::App* s) {
        s->add_option("--potential", p.potential, "vector potential file (JSON, dual basis units)");
        s->add_option("--grid", p.grid, "grid points per dimension (0 picks the smallest safe grid)");
        s->add_option("--cutoff", p.cutoff, "momentum cutoff N");
        s->add_option("--tail-tol", p.tail_tol, "relative kernel tail allowed beyond the periodization radius (0: 1e-15 in d=1, 1e-8 above)");
        s->add_option("--r-per", p.R_per, "periodization radius in cells (-1 picks it from the decay)");
    };

    auto* bands_cmd = app.add_subcommand("bands", "band structure along a momentum path");
    common(bands_cmd);
    window_opt(bands_cmd);
    magnetic_opts(bands_cmd);
    bands_cmd->add_option("--waypoint", p.waypoints, "path waypoint, comma separated (repeatable)");
    bands_cmd->add_option("--samples", p.samples, "samples per segment");
    bands_cmd->add_option("--k-keep", p.k_keep, "bands kept per sample (0: a quarter of the window)");
    bands_cmd->add_option("--out", p.out, "output prefix for .csv and .json");

    auto* flux_cmd = app.add_subcommand("check-flux", "zero-mean-face test for a vector potential");
    flux_cmd->add_option("--config", p.config, "run config (JSON)");
    flux_cmd->add_option("--potential", p.potential, "vector potential file");

    auto* kernel_cmd = app.add_subcommand("kernel", "toroidal kernel of a fiber on a grid");
    common(kernel_cmd);
    kernel_cmd->add_option("--xi", p.xi, "quasi-momentum, comma separated");
    kernel_cmd->add_option("--grid", p.grid, "grid points per dimension");
    kernel_cmd->add_option("--cutoff", p.cutoff, "momentum cutoff N (0 disables)");
    kernel_cmd->add_option("--radius", p.radius, "alpha* window radius (-1: cover the cutoff support)");
    kernel_cmd->add_option("--format", p.format, "csv or binary");
    kernel_cmd->add_option("--out", p.out, "output file");

    auto* fiber_cmd = app.add_subcommand("fiber-matrix", "fiber matrix on a dual window");
    common(fiber_cmd);
    window_opt(fiber_cmd);
    magnetic_opts(fiber_cmd);
    fiber_cmd->add_option("--xi", p.xi, "quasi-momentum, comma separated");
    fiber_cmd->add_option("--out", p.out, "output file (stdout when empty)");
    fiber_cmd->add_flag("--debug-mis-sign", p.mis_sign, "evaluate entries at the wrong momentum (testing only)");

    auto* conv_cmd = app.add_subcommand("converge", "Cauchy test of eigenvalues over growing windows");
    common(conv_cmd);
    conv_cmd->add_option("--xi", p.xi, "quasi-momentum, comma separated");
    conv_cmd->add_option("--radii", p.radii, "window radii")->delimiter(',');
    conv_cmd->add_option("--k-keep", p.k_keep, "eigenvalues compared");
    conv_cmd->add_option("--tol", p.conv_tol, "target Cauchy difference");
    conv_cmd->add_option("--out", p.out, "report file (stdout when empty)");

    auto* verify_cmd = app.add_subcommand("verify", "run the verification suites");
    verify_cmd->add_option("--config", p.config, "run config (JSON) with a \"suites\" list");
    auto* suite_opt = verify_cmd->add_option("--suite", p.suites, "suite name (repeatable; default all)")
                          ->expected(0, CLI::detail::expected_max_vector_size);
    verify_cmd->add_option("--config-dir", p.config_dir, "directory with the shipped configs");
    verify_cmd->add_option("--report", p.report, "JSON report path");
    verify_cmd->add_option("--seed", p.seed, "sampling seed");
    verify_cmd->add_flag("--debug-mis-sign", p.mis_sign, "mutation run: the Hermiticity suite must fail");
    verify_cmd->add_flag_callback("--list", [] {
        for (const auto& n : available_suites()) std::cout << n << '\n';
        std::exit(0);
    }, "list suite names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        merge_config(*sub, p);
        if (sub == bands_cmd) return cmd_bands(p);
        if (sub == flux_cmd) return cmd_check_flux(p);
        if (sub == kernel_cmd) return cmd_kernel(p);
        if (sub == fiber_cmd) return cmd_fiber_matrix(p);
        if (sub == conv_cmd) return cmd_converge(p);
        if (sub == verify_cmd) {
            bool given = suite_opt->count() > 0;
            if (!p.config.empty() && load_json(p.config).contains("suites")) given = true;
            return cmd_verify(p, given);
        }
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GateError& e) {
        std::cerr << "gate failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
