#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "floquet/toroidal_kernel.hpp"

using namespace floquet;

namespace {

CVector random_vector(long n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    CVector v(n);
    for (long i = 0; i < n; ++i) v(i) = {N(rng), N(rng)};
    return v;
}

}  // namespace

TEST_CASE("fast kernel equals the amplitude sum") {
    CutoffProfile cut{2.5};
    GridSpec grid{1, 8};
    Vec xi{0.3};
    DualWindow w(1, default_kernel_radius(xi, cut.N));
    for (const auto& F : {free_symbol(1), schrodinger_cosine(1)}) {
        auto fast = build_kernel(F, xi, w, grid, &cut);
        auto ref = build_kernel_from_amplitudes(F, xi, w, grid, &cut);
        CHECK((fast.K - ref.K).cwiseAbs().maxCoeff() < 1e-10 * fast.K.cwiseAbs().maxCoeff());
    }
    GridSpec g2{2, 4};
    CutoffProfile c2{1.2};
    Vec xi2{0.1, -0.2};
    DualWindow w2(2, default_kernel_radius(xi2, c2.N));
    auto F2 = schrodinger_cosine(2);
    auto fast = build_kernel(F2, xi2, w2, g2, &c2);
    auto ref = build_kernel_from_amplitudes(F2, xi2, w2, g2, &c2);
    CHECK((fast.K - ref.K).cwiseAbs().maxCoeff() < 1e-10 * fast.K.cwiseAbs().maxCoeff());
}

TEST_CASE("kernel route reproduces the fiber matrix") {
    CutoffProfile cut{8.0};
    GridSpec grid{1, 64};
    DualWindow w(1, 3);
    for (const auto& F : {free_symbol(1), schrodinger_cosine(1)})
        for (double xi : {0.0, 0.3, -0.5}) {
            auto K = build_kernel(F, {xi}, DualWindow(1, default_kernel_radius({xi}, cut.N)), grid, &cut);
            CMatrix Mk = matrix_from_kernel(K, w);
            CMatrix Mf = build_fiber_matrix(apply_cutoff(F, cut), {xi}, w).entries;
            CHECK((Mk - Mf).cwiseAbs().maxCoeff() < 1e-10);
        }
    auto K = build_kernel(free_symbol(1), {0.0}, DualWindow(1, 9), GridSpec{1, 16}, &cut);
    CHECK_THROWS_AS(matrix_from_kernel(K, w), GateError);
}

TEST_CASE("kernel acts as the fiber on plane waves") {
    CutoffProfile cut{6.0};
    GridSpec grid{1, 48};
    auto F = schrodinger_cosine(1);
    Vec xi{0.2};
    auto K = build_kernel(F, xi, DualWindow(1, default_kernel_radius(xi, cut.N)), grid, &cut);
    auto Fc = apply_cutoff(F, cut);
    // basis wave e_beta(x) = exp(-i 2 pi beta x) carries momentum xi - beta;
    // the image is sum_alpha M_{alpha beta} e_alpha
    for (int beta : {-2, 0, 3}) {
        CVector e(grid.size());
        for (long k = 0; k < grid.size(); ++k) e(k) = std::exp(cplx(0, -pairing(IVec{beta}, grid.point(k))));
        CVector img = apply_kernel(K, e);
        for (long k = 0; k < grid.size(); ++k) {
            Vec x = grid.point(k);
            cplx want = 0.0;
            for (int alpha = beta - 1; alpha <= beta + 1; ++alpha)
                want += Fc.fourier_coefficient({alpha - beta}, {xi[0] - 0.5 * (alpha + beta)}) *
                        std::exp(cplx(0, -pairing(IVec{alpha}, x)));
            CHECK(std::abs(img(k) - want) < 1e-9);
        }
    }
}

TEST_CASE("Weyl system: composition and adjoint") {
    GridSpec g{2, 8};
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> T(-8, 7), G(-3, 3);
    for (int s = 0; s < 30; ++s) {
        CVector phi = random_vector(g.size(), rng), psi = random_vector(g.size(), rng);
        Vec t1{T(rng) / 8.0, T(rng) / 8.0}, t2{T(rng) / 8.0, T(rng) / 8.0};
        IVec a{G(rng), G(rng)}, b{G(rng), G(rng)};
        Vec t12 = reduce_double(Vec{t1[0] + t2[0], t1[1] + t2[1]});
        IVec ab{a[0] + b[0], a[1] + b[1]};
        double ph = kPi * (a[0] * t2[0] + a[1] * t2[1] - b[0] * t1[0] - b[1] * t1[1]);
        CVector lhs = weyl_apply(g, t1, a, weyl_apply(g, t2, b, phi));
        CVector rhs = std::exp(cplx(0, ph)) * weyl_apply(g, t12, ab, phi);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        Vec mt = reduce_double(Vec{-t1[0], -t1[1]});
        cplx l = psi.dot(weyl_apply(g, t1, a, phi));
        cplx r = weyl_apply(g, mt, IVec{-a[0], -a[1]}, psi).dot(phi);
        CHECK(std::abs(l - r) < 1e-12);
    }
    CHECK_THROWS_AS(weyl_apply(g, {0.01, 0.0}, {0, 0}, CVector::Ones(g.size())), GateError);
}

TEST_CASE("interpolated translation of a band-limited function") {
    GridSpec g{1, 16};
    CVector phi(g.size());
    for (long k = 0; k < g.size(); ++k) phi(k) = std::cos(kTwoPi * 3 * g.point(k)[0]);
    CVector out = weyl_apply(g, {0.037}, {0}, phi, true);
    for (long k = 0; k < g.size(); ++k)
        CHECK(std::abs(out(k) - std::cos(kTwoPi * 3 * (g.point(k)[0] + 0.037))) < 1e-12);
}

TEST_CASE("symmetric quantization: adjoint law and constants") {
    GridSpec g{1, 12};
    GridSpec g2{1, 24};
    auto F = schrodinger_cosine(1);
    F.add_term({2}, CoefficientFunction::gaussian(1, 0.8));
    F.add_term({-2}, CoefficientFunction::gaussian(1, 0.4));  // complex symbol on purpose
    auto seq = sample_symmetric_symbol(F, {0.15}, 4, g);
    auto cseq = conjugate(seq);
    std::mt19937_64 rng(3);
    for (int s = 0; s < 50; ++s) {
        CVector psi = random_vector(g.size(), rng), phi = random_vector(g.size(), rng);
        cplx l = psi.dot(quantize_symmetric(seq, g, phi));
        cplx r = quantize_symmetric(cseq, g, psi).dot(phi);
        CHECK(std::abs(l - r) < 1e-10 * std::max(1.0, std::abs(l)));
    }
    // F = c at every half index (one full period of 2n on this grid)
    // quantizes to c times the identity
    ToroidalSymbolSeq c;
    c.grid = g2;
    c.half_index = true;
    for (int gs = -12; gs < 12; ++gs) c.values[{gs}] = CVector::Constant(g2.size(), cplx(2.5, -1.0));
    CVector phi = random_vector(g.size(), rng);
    CHECK((quantize_symmetric(c, g, phi) - cplx(2.5, -1.0) * phi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Kohn-Nirenberg of an x-independent symbol is a Fourier multiplier") {
    GridSpec g{1, 16};
    ToroidalSymbolSeq a;
    a.grid = g;
    for (int k = -8; k < 8; ++k) a.values[{k}] = CVector::Constant(g.size(), cplx(1.0 + k * k, 0.0));
    std::mt19937_64 rng(4);
    CVector phi = random_vector(g.size(), rng);
    CVector out = quantize_kohn_nirenberg(a, g, phi);
    // direct DFT oracle
    for (long x = 0; x < g.size(); ++x) {
        cplx want = 0.0;
        for (int k = -8; k < 8; ++k) {
            cplx hat = 0.0;
            for (long y = 0; y < g.size(); ++y)
                hat += phi(y) * std::exp(cplx(0, -pairing(IVec{k}, g.point(y))));
            want += (1.0 + k * k) * hat * std::exp(cplx(0, pairing(IVec{k}, g.point(x))));
        }
        CHECK(std::abs(out(x) - want / 16.0) < 1e-10);
    }
}

TEST_CASE("difference operator") {
    ToroidalSymbolSeq s;
    s.grid = GridSpec{1, 2};
    for (int k = -3; k <= 3; ++k) s.values[{k}] = CVector::Constant(2, cplx(k * k, 0));
    auto d = difference_op(s, 0);
    CHECK(std::abs((*d.find({1}))(0) - cplx(3.0, 0)) < 1e-15);
    CHECK(std::abs((*d.find({3}))(0) - cplx(-9.0, 0)) < 1e-15);
}

TEST_CASE("kernel file has a JSON header") {
    CutoffProfile cut{3.0};
    auto K = build_kernel(free_symbol(1), {0.0}, DualWindow(1, 4), GridSpec{1, 8}, &cut);
    auto path = std::filesystem::temp_directory_path() / "floquet_kernel_test.csv";
    write_kernel(K, path.string(), false);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    auto j = nlohmann::json::parse(header);
    CHECK(j.at("rows") == 8);
    std::getline(in, row);
    CHECK(std::count(row.begin(), row.end(), ',') == 15);
    std::filesystem::remove(path);
}
