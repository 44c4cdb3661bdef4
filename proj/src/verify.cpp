#include "floquet/verify.hpp"

#include <filesystem>
#include <random>

#include "floquet/oracle.hpp"
#include "floquet/spectral_engine.hpp"
#include "floquet/symbol_io.hpp"
#include "floquet/toroidal_kernel.hpp"

namespace floquet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<PeriodicSymbol> shipped_real_symbols(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(dir) / "symbols"))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<PeriodicSymbol> out;
    for (const auto& f : files) {
        auto F = load_symbol(f.string());
        if (F.is_real()) out.push_back(F);
    }
    if (out.empty()) throw ConfigError("no shipped real symbols under " + dir);
    return out;
}

SuiteResult finish(SuiteResult r) {
    r.pass = r.worst <= r.tol;
    return r;
}

SuiteResult hermiticity(const VerifyOptions& opt) {
    SuiteResult r{"hermiticity", false, 0.0, 1e-12, json::object()};
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    FiberOptions fo;
    fo.debug_mis_sign = opt.debug_mis_sign;
    for (const auto& F : shipped_real_symbols(opt.config_dir)) {
        DualWindow w(F.dimension(), F.dimension() == 1 ? 8 : 4);
        double worst = 0.0;
        for (int s = 0; s < 50; ++s) {
            Vec xi(F.dimension());
            for (auto& v : xi) v = U(rng);
            worst = std::max(worst, hermiticity_defect(build_fiber_matrix(F, xi, w, Exec::parallel, fo)));
        }
        r.detail[F.name()] = worst;
        r.worst = std::max(r.worst, worst);
    }
    return finish(r);
}

SuiteResult periodicity(const VerifyOptions& opt) {
    SuiteResult r{"periodicity", false, 0.0, 1e-13, json::object()};
    for (const auto& F : shipped_real_symbols(opt.config_dir)) {
        const int d = F.dimension();
        DualWindow w(d, d == 1 ? 10 : 4);
        Vec xi(d, 0.3125);
        IVec g(d, 0);
        g[0] = 1;
        double e = band_periodicity_check(F, xi, g, w, 1);
        r.detail[F.name()] = e;
        r.worst = std::max(r.worst, e);
    }
    return finish(r);
}

SuiteResult free_bands(const VerifyOptions&) {
    SuiteResult r{"free-bands", false, 0.0, 1e-10, json::object()};
    auto F = free_symbol(1);
    DualWindow w(1, 8);
    for (int s = 0; s <= 5; ++s) {
        double xi = 0.1 * s;
        auto ev = eig_hermitian(build_fiber_matrix(F, {xi}, w).entries).values;
        std::vector<double> ref;
        for (int a = -2; a <= 2; ++a) ref.push_back(kTwoPi * kTwoPi * (xi - a) * (xi - a));
        std::sort(ref.begin(), ref.end());
        for (int k = 0; k < 5; ++k) r.worst = std::max(r.worst, std::abs(ev(k) - ref[k]));
    }
    return finish(r);
}

SuiteResult route_equivalence(const VerifyOptions&) {
    SuiteResult r{"route-equivalence", false, 0.0, 1e-10, json::object()};
    CutoffProfile cut{8.0};
    GridSpec grid{1, 64};
    DualWindow w(1, 2);
    for (const auto& F : {free_symbol(1), schrodinger_cosine(1)}) {
        Vec xi{0.3};
        DualWindow kw(1, default_kernel_radius(xi, cut.N));
        auto K = build_kernel(F, xi, kw, grid, &cut);
        CMatrix Mk = matrix_from_kernel(K, w);
        CMatrix Mf = build_fiber_matrix(apply_cutoff(F, cut), xi, w).entries;
        double e = (Mk - Mf).cwiseAbs().maxCoeff();
        r.detail[F.name()] = e;
        r.worst = std::max(r.worst, e);
    }
    return finish(r);
}

SuiteResult constant_gauge(const VerifyOptions&) {
    SuiteResult r{"constant-gauge", false, 0.0, 1e-10, json::object()};
    auto F = schrodinger_cosine(1);
    CutoffProfile cut{8.0};
    GridSpec grid{1, 64};
    DualWindow w(1, 4);
    const double a = 0.1;
    for (double xi : {0.0, 0.25, 0.4}) {
        auto Mm = magnetic_fiber_matrix(F, VectorPotential::constant({a}), {xi}, w, grid, &cut).M;
        auto M0 = build_fiber_matrix(apply_cutoff(F, cut), {xi - a}, w).entries;
        double e = (eig_hermitian(Mm).values - eig_hermitian(M0).values).cwiseAbs().maxCoeff();
        r.worst = std::max(r.worst, e);
    }
    return finish(r);
}

SuiteResult flux_gate(const VerifyOptions& opt) {
    SuiteResult r{"flux-gate", false, 0.0, 1e-14, json::object()};
    auto A = load_potential((fs::path(opt.config_dir) / "potentials" / "periodic_2d.json").string());
    auto rep = zero_flux_gate(curl(A));
    r.worst = rep.worst;
    auto B = load_potential((fs::path(opt.config_dir) / "potentials" / "constant_b_2d.json").string());
    auto bad = zero_flux_gate(curl(B));
    r.detail["constant_field_rejected"] = !bad.pass;
    r = finish(r);
    r.pass = r.pass && !bad.pass;
    return r;
}

SuiteResult weyl_laws(const VerifyOptions& opt) {
    SuiteResult r{"weyl-laws", false, 0.0, 1e-12, json::object()};
    GridSpec g{1, 16};
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> T(-g.n, g.n - 1), G(-4, 4);
    std::normal_distribution<double> N;
    for (int s = 0; s < 100; ++s) {
        CVector phi(g.size()), psi(g.size());
        for (long i = 0; i < g.size(); ++i) {
            phi(i) = {N(rng), N(rng)};
            psi(i) = {N(rng), N(rng)};
        }
        Vec t1{static_cast<double>(T(rng)) / g.n}, t2{static_cast<double>(T(rng)) / g.n};
        IVec a{G(rng)}, b{G(rng)};
        CVector lhs = weyl_apply(g, t1, a, weyl_apply(g, t2, b, phi));
        Vec t12 = reduce_double(Vec{t1[0] + t2[0]});
        cplx ph = unit_phase(kPi * (a[0] * t2[0] - b[0] * t1[0]));
        CVector rhs = ph * weyl_apply(g, t12, {a[0] + b[0]}, phi);
        r.worst = std::max(r.worst, (lhs - rhs).cwiseAbs().maxCoeff());
        cplx l = weyl_apply(g, t1, a, psi).dot(phi);
        cplx rr = psi.dot(weyl_apply(g, reduce_double(Vec{-t1[0]}), {-a[0]}, phi));
        r.worst = std::max(r.worst, std::abs(l - rr));
    }
    return finish(r);
}

SuiteResult bf_transforms(const VerifyOptions& opt) {
    SuiteResult r{"bf-transforms", false, 0.0, 1e-12, json::object()};
    SupercellGrid g{1, 4, 32};
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> N;
    for (int s = 0; s < 20; ++s) {
        CVector f(g.size());
        for (long i = 0; i < g.size(); ++i) f(i) = {N(rng), N(rng)};
        std::map<IVec, CVector> fib;
        double norm = 0.0;
        for (const auto& k : dual_grid(g)) {
            fib[k] = discrete_bloch_floquet(g, f, k);
            norm += fib[k].squaredNorm();
            double e = (discrete_bfz(g, f, k) - discrete_bfz_factorized(g, f, k)).cwiseAbs().maxCoeff();
            r.worst = std::max(r.worst, e);
        }
        r.worst = std::max(r.worst, std::abs(norm / g.L - f.squaredNorm()) / f.squaredNorm());
        r.worst = std::max(r.worst, (inverse_bloch_floquet(g, fib) - f).cwiseAbs().maxCoeff());
    }
    return finish(r);
}

SuiteResult supercell(const VerifyOptions&) {
    SuiteResult r{"supercell", false, 0.0, 1e-8, json::object()};
    SupercellOptions o;
    auto rep = supercell_identity_check(schrodinger_cosine(1), o);
    r.worst = rep.max_deviation;
    return finish(r);
}

SuiteResult mathieu(const VerifyOptions&) {
    SuiteResult r{"mathieu", false, 0.0, 1e-4, json::object()};
    auto F = schrodinger_cosine(1);
    FourierSeries V(1);
    V.add({1}, 1.0).add({-1}, 1.0);
    DualWindow w(1, 16);
    for (double xi : {0.0, 0.5}) {
        Eigen::VectorXd ev = eig_hermitian(build_fiber_matrix(F, {xi}, w).entries).values.head(4);
        auto fd = fd_bloch_spectrum(V, {xi}, 2048, nullptr, 4);
        for (int k = 0; k < 4; ++k)
            r.worst = std::max(r.worst, std::abs(ev(k) - fd(k)) / std::max(1.0, std::abs(fd(k))));
    }
    return finish(r);
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r = {
        {"free-bands", free_bands},       {"mathieu", mathieu},
        {"periodicity", periodicity},     {"hermiticity", hermiticity},
        {"route-equivalence", route_equivalence}, {"supercell", supercell},
        {"bf-transforms", bf_transforms}, {"constant-gauge", constant_gauge},
        {"flux-gate", flux_gate},         {"weyl-laws", weyl_laws},
    };
    return r;
}

}  // namespace

std::vector<std::string> available_suites() {
    std::vector<std::string> names;
    for (const auto& [n, _] : registry()) names.push_back(n);
    return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
    for (const auto& [n, fn] : registry())
        if (n == name) return fn(opt);
    throw ConfigError("unknown suite \"" + name + "\"");
}

}  // namespace floquet
