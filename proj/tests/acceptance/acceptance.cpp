// One line per acceptance criterion. Exit status is nonzero when any fails.
//
//   acceptance <path to floquet CLI>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sys/wait.h>

#include "floquet/csv.hpp"
#include "floquet/oracle.hpp"
#include "floquet/spectral_engine.hpp"
#include "floquet/symbol_io.hpp"
#include "floquet/toroidal_kernel.hpp"

using namespace floquet;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

struct Outcome {
    bool pass;
    std::string detail;
};

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++g_failures;
    std::printf("%s  %2d  %-34s %s  (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string num(double v) { return format_double(v); }

std::string config(const std::string& rel) { return std::string(FLOQUET_CONFIG_DIR) + "/" + rel; }

Eigen::VectorXd lowest(const CMatrix& M, int k) { return eig_hermitian(M).values.head(k); }

double max_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

CVector random_vector(long n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    CVector v(n);
    for (long i = 0; i < n; ++i) v(i) = {N(rng), N(rng)};
    return v;
}

FourierSeries random_series(int d, int mmax, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-0.2, 0.2);
    FourierSeries f(d);
    DualWindow w(d, mmax);
    for (const auto& mu : w.indices()) {
        IVec neg = mu;
        for (auto& v : neg) v = -v;
        if (mu < neg) continue;
        cplx a(U(rng), mu == neg ? 0.0 : U(rng));
        f.coef[mu] += a;
        if (mu != neg) f.coef[neg] += std::conj(a);
    }
    return f;
}

int run_cli(const std::string& args) {
    std::string cmd = "\"" + g_cli + "\" " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <floquet cli>\n";
        return 2;
    }
    g_cli = argv[1];

    criterion(1, "free-band exactness", [] {
        auto t0 = std::chrono::steady_clock::now();
        auto F = free_symbol(1);
        DualWindow w(1, 8);
        double worst = 0.0;
        for (int s = 0; s <= 5; ++s) {
            double xi = 0.1 * s;
            std::vector<double> ref;
            for (int a = -2; a <= 2; ++a) ref.push_back(kTwoPi * kTwoPi * (xi - a) * (xi - a));
            std::sort(ref.begin(), ref.end());
            auto ev = lowest(build_fiber_matrix(F, {xi}, w).entries, 5);
            for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(ev(k) - ref[k]));
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{worst <= 1e-10 && secs < 1.0, "abs=" + num(worst) + " tol=1e-10"};
    });

    criterion(2, "Mathieu cross-check", [] {
        auto t0 = std::chrono::steady_clock::now();
        auto F = load_symbol(config("symbols/cosine_schrodinger_1d.json"));
        FourierSeries V(1);
        V.add({1}, 1.0).add({-1}, 1.0);
        double rel = 0.0, cauchy = 0.0;
        for (double xi : {0.0, 0.5}) {
            auto e16 = lowest(build_fiber_matrix(F, {xi}, DualWindow(1, 16)).entries, 4);
            auto e8 = lowest(build_fiber_matrix(F, {xi}, DualWindow(1, 8)).entries, 4);
            auto fd = fd_bloch_spectrum(V, {xi}, 2048, nullptr, 4);
            for (int k = 0; k < 4; ++k) rel = std::max(rel, std::abs(e16(k) - fd(k)) / std::abs(fd(k)));
            cauchy = std::max(cauchy, max_diff(e16, e8));
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Outcome{rel <= 1e-4 && cauchy <= 1e-10 && secs < 10.0,
                       "rel=" + num(rel) + " tol=1e-4, cauchy=" + num(cauchy) + " tol=1e-10"};
    });

    criterion(3, "band periodicity", [] {
        double entry = 0.0, eig = 0.0;
        for (const char* f : {"symbols/cosine_schrodinger_1d.json", "symbols/variable_mass_1d.json"}) {
            auto F = load_symbol(config(f));
            DualWindow w(1, 16);
            for (double xi : {0.0, 0.17, 0.5, -0.33}) {
                entry = std::max(entry, band_periodicity_check(F, {xi}, {1}, w, 1));
                auto e0 = lowest(build_fiber_matrix(F, {xi}, w).entries, 8);
                auto e1 = lowest(build_fiber_matrix(F, {xi + 1.0}, w).entries, 8);
                eig = std::max(eig, max_diff(e0, e1));
            }
        }
        auto G = load_symbol(config("symbols/schrodinger_2d.json"));
        for (const IVec& g : std::vector<IVec>{{1, 0}, {0, 1}, {1, -1}}) {
            entry = std::max(entry, band_periodicity_check(G, {0.2, -0.1}, g, DualWindow(2, 6), 1));
            Vec xs{0.2 + g[0], -0.1 + g[1]};
            auto e0 = lowest(build_fiber_matrix(G, {0.2, -0.1}, DualWindow(2, 6)).entries, 6);
            auto e1 = lowest(build_fiber_matrix(G, xs, DualWindow(2, 6)).entries, 6);
            eig = std::max(eig, max_diff(e0, e1));
        }
        return Outcome{entry <= 1e-13 && eig <= 1e-10,
                       "entries=" + num(entry) + " tol=1e-13, eigen=" + num(eig) + " tol=1e-10"};
    });

    criterion(4, "Hermiticity of shipped symbols", [] {
        std::mt19937_64 rng(404);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double worst = 0.0;
        int configs = 0;
        for (const auto& e : fs::directory_iterator(config("symbols"))) {
            auto F = load_symbol(e.path().string());
            if (!F.is_real()) continue;
            ++configs;
            const int d = F.dimension();
            DualWindow w(d, d == 1 ? 10 : 4);
            for (int s = 0; s < 50; ++s) {
                Vec xi(d);
                for (auto& v : xi) v = U(rng);
                worst = std::max(worst, hermiticity_defect(build_fiber_matrix(F, xi, w)));
            }
        }
        return Outcome{configs > 0 && worst <= 1e-12, std::to_string(configs) + " configs, defect=" + num(worst) + " tol=1e-12"};
    });

    criterion(5, "kernel route vs fiber matrix", [] {
        CutoffProfile cut{8.0};
        GridSpec grid{1, 64};
        DualWindow w(1, 4);
        double worst = 0.0;
        for (const auto& F : {free_symbol(1), schrodinger_cosine(1)})
            for (double xi : {0.0, 0.3, 0.5}) {
                auto K = build_kernel(F, {xi}, DualWindow(1, default_kernel_radius({xi}, cut.N)), grid, &cut);
                CMatrix Mk = matrix_from_kernel(K, w);
                CMatrix Mf = build_fiber_matrix(apply_cutoff(F, cut), {xi}, w).entries;
                worst = std::max(worst, (Mk - Mf).cwiseAbs().maxCoeff());
            }
        return Outcome{worst <= 1e-10, "max entry diff=" + num(worst) + " tol=1e-10"};
    });

    criterion(6, "supercell direct-integral identity", [] {
        SupercellOptions o;  // L = 4, lowest 20
        auto rep = supercell_identity_check(load_symbol(config("symbols/cosine_schrodinger_1d.json")), o);
        return Outcome{rep.max_deviation <= 1e-8, "L=4 k=20 dev=" + num(rep.max_deviation) + " tol=1e-8"};
    });

    criterion(7, "discrete BF / BFZ", [] {
        SupercellGrid g{1, 4, 32};
        std::mt19937_64 rng(707);
        double parseval = 0.0, inversion = 0.0, factor = 0.0;
        for (int s = 0; s < 100; ++s) {
            CVector f = random_vector(g.size(), rng);
            std::map<IVec, CVector> fib;
            double norm = 0.0;
            for (const auto& k : dual_grid(g)) {
                fib[k] = discrete_bloch_floquet(g, f, k);
                norm += fib[k].squaredNorm();
            }
            parseval = std::max(parseval, std::abs(norm / g.L - f.squaredNorm()) / f.squaredNorm());
            inversion = std::max(inversion, (inverse_bloch_floquet(g, fib) - f).cwiseAbs().maxCoeff());
            for (int k = -5; k <= 5; ++k)
                factor = std::max(factor, (discrete_bfz(g, f, {k}) - discrete_bfz_factorized(g, f, {k})).cwiseAbs().maxCoeff());
        }
        return Outcome{parseval <= 1e-12 && inversion <= 1e-12 && factor <= 1e-13,
                       "parseval=" + num(parseval) + " inversion=" + num(inversion) + " tol=1e-12, factorization=" +
                           num(factor) + " tol=1e-13"};
    });

    criterion(8, "constant-gauge shift", [] {
        auto F = load_symbol(config("symbols/cosine_schrodinger_1d.json"));
        CutoffProfile cut{8.0};
        GridSpec grid{1, 64};
        DualWindow w(1, 4);
        double worst = 0.0;
        for (double a : {0.1, 0.25, -0.4})
            for (double xi : {0.0, 0.3}) {
                auto Mm = magnetic_fiber_matrix(F, VectorPotential::constant({a}), {xi}, w, grid, &cut).M;
                auto M0 = build_fiber_matrix(apply_cutoff(F, cut), {xi - a}, w).entries;
                worst = std::max(worst, max_diff(eig_hermitian(Mm).values, eig_hermitian(M0).values));
            }
        return Outcome{worst <= 1e-10, "spectra diff=" + num(worst) + " tol=1e-10"};
    });

    criterion(9, "gauge covariance", [] {
        auto F = load_symbol(config("symbols/cosine_schrodinger_1d.json"));
        CutoffProfile cut{8.0};
        GridSpec grid{1, 128};
        DualWindow w(1, 22);
        VectorPotential A(1);
        A.periodic[0].add({1}, 0.1).add({-1}, 0.1);  // 0.2 cos(2 pi x)
        FourierSeries phi(1);                         // 0.3 sin(2 pi x)
        phi.add({1}, cplx(0.0, 0.15)).add({-1}, cplx(0.0, -0.15));
        double worst = 0.0;
        for (double xi : {0.0, 0.35}) {
            auto e1 = eig_hermitian(magnetic_fiber_matrix(F, A, {xi}, w, grid, &cut).M).values;
            auto e2 = eig_hermitian(magnetic_fiber_matrix(F, A.plus_gradient(phi), {xi}, w, grid, &cut).M).values;
            worst = std::max(worst, max_diff(e1, e2));
        }
        return Outcome{worst <= 1e-6, "spectra diff=" + num(worst) + " tol=1e-6"};
    });

    criterion(10, "zero-flux gate", [] {
        int rc = run_cli("check-flux --potential \"" + config("potentials/constant_b_2d.json") + "\"");
        std::mt19937_64 rng(1010);
        double worst = 0.0;
        for (int s = 0; s < 50; ++s) {
            const int d = 2 + s % 2;
            VectorPotential A(d);
            for (int j = 0; j < d; ++j) A.periodic[j] = random_series(d, 2, rng);
            auto rep = zero_flux_gate(curl(A), 1e-14);
            if (!rep.pass) worst = std::max(worst, 1.0);
            worst = std::max(worst, rep.worst);
        }
        return Outcome{rc == 3 && worst <= 1e-14, "constant B exit=" + std::to_string(rc) + ", curl flux=" + num(worst) + " tol=1e-14"};
    });

    criterion(11, "symmetric quantization adjoint law", [] {
        GridSpec g{1, 16};
        auto F = load_symbol(config("symbols/variable_mass_1d.json"));
        F.add_term({2}, CoefficientFunction::gaussian(1, 0.8));  // not real on purpose
        std::mt19937_64 rng(1111);
        double worst = 0.0;
        for (int s = 0; s < 50; ++s) {
            Vec xi{std::uniform_real_distribution<double>(-0.5, 0.5)(rng)};
            CutoffProfile cut{6.0};
            auto seq = sample_symmetric_symbol(F, xi, 7, g, &cut);
            auto cseq = conjugate(seq);
            CVector psi = random_vector(g.size(), rng), phi = random_vector(g.size(), rng);
            cplx l = psi.dot(quantize_symmetric(seq, g, phi));
            cplx r = quantize_symmetric(cseq, g, psi).dot(phi);
            worst = std::max(worst, std::abs(l - r) / std::max(1.0, std::abs(l)));
        }
        return Outcome{worst <= 1e-10, "50 pairs, defect=" + num(worst) + " tol=1e-10"};
    });

    criterion(12, "Weyl-system laws", [] {
        GridSpec g{2, 8};
        std::mt19937_64 rng(1212);
        std::uniform_int_distribution<int> T(-8, 7), G(-4, 4);
        double comp = 0.0, adj = 0.0;
        for (int s = 0; s < 100; ++s) {
            CVector phi = random_vector(g.size(), rng), psi = random_vector(g.size(), rng);
            Vec t1{T(rng) / 8.0, T(rng) / 8.0}, t2{T(rng) / 8.0, T(rng) / 8.0};
            IVec a{G(rng), G(rng)}, b{G(rng), G(rng)};
            Vec t12 = reduce_double(Vec{t1[0] + t2[0], t1[1] + t2[1]});
            double ph = kPi * (a[0] * t2[0] + a[1] * t2[1] - b[0] * t1[0] - b[1] * t1[1]);
            CVector lhs = weyl_apply(g, t1, a, weyl_apply(g, t2, b, phi));
            CVector rhs = unit_phase(ph) * weyl_apply(g, t12, {a[0] + b[0], a[1] + b[1]}, phi);
            comp = std::max(comp, (lhs - rhs).cwiseAbs().maxCoeff());
            cplx l = psi.dot(weyl_apply(g, t1, a, phi));
            cplx r = weyl_apply(g, reduce_double(Vec{-t1[0], -t1[1]}), {-a[0], -a[1]}, psi).dot(phi);
            adj = std::max(adj, std::abs(l - r));
        }
        return Outcome{comp <= 1e-12 && adj <= 1e-12, "composition=" + num(comp) + " adjoint=" + num(adj) + " tol=1e-12"};
    });

    criterion(13, "minimal-coupling remainder order", [] {
        auto F = free_symbol(1);
        CutoffProfile cut{8.0};
        auto Fc = apply_cutoff(F, cut);
        GridSpec grid{1, 128};
        DualWindow w(1, 5);
        MagneticOptions mo;
        mo.R_per = 20;
        mo.tail_tol = 1e-12;
        std::vector<double> eps{0.1, 0.05, 0.025}, gap;
        for (double e : eps) {
            VectorPotential A(1);
            A.periodic[0].add({1}, cplx(0.0, 0.5 * e)).add({-1}, cplx(0.0, -0.5 * e));  // e sin(2 pi x)
            auto exact = lowest(magnetic_fiber_matrix(F, A, {0.2}, w, grid, &cut, mo).M, 6);
            MinimalCoupling mc(Fc, A);
            auto lead = lowest(build_fiber_matrix(mc.projection(64, 12), {0.2}, w).entries, 6);
            gap.push_back(max_diff(exact, lead));
        }
        // least-squares slope of log gap against log eps
        double mx = 0, my = 0;
        for (int i = 0; i < 3; ++i) {
            mx += std::log(eps[i]) / 3;
            my += std::log(gap[i]) / 3;
        }
        double sxy = 0, sxx = 0;
        for (int i = 0; i < 3; ++i) {
            sxy += (std::log(eps[i]) - mx) * (std::log(gap[i]) - my);
            sxx += (std::log(eps[i]) - mx) * (std::log(eps[i]) - mx);
        }
        double slope = sxy / sxx;
        return Outcome{slope >= 1.8, "gaps=" + num(gap[0]) + "," + num(gap[1]) + "," + num(gap[2]) +
                                         " slope=" + num(slope) + " min=1.8"};
    });

    std::printf("%d of 13 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
