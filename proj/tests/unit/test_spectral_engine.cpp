#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "floquet/spectral_engine.hpp"

using namespace floquet;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("eigensolver refuses non-Hermitian input") {
    CMatrix M(2, 2);
    M << 1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 2.0;
    CHECK_THROWS_AS(eig_hermitian(M), GateError);
    M(1, 0) = cplx(0.0, -1.0);
    auto r = eig_hermitian(M, true);
    CHECK(r.values(0) <= r.values(1));
    CHECK((M * r.vectors - r.vectors * r.values.asDiagonal()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("momentum path sampling") {
    MomentumPath p{{{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}}, 4};
    auto s = p.samples();
    REQUIRE(s.size() == 9);
    CHECK(s[0] == Vec{0.0, 0.0});
    CHECK(s[4] == Vec{0.5, 0.0});
    CHECK(s[8] == Vec{0.5, 0.5});
    CHECK(s[2][0] == doctest::Approx(0.25));
    CHECK_THROWS_AS((MomentumPath{{}, 3}.samples()), ConfigError);
}

TEST_CASE("free bands along a path") {
    MomentumPath p{{{0.0}, {0.5}}, 5};
    auto B = bands(free_symbol(1), p, DualWindow(1, 8), 5);
    REQUIRE(B.values.size() == 6);
    for (std::size_t s = 0; s < B.xi.size(); ++s) {
        std::vector<double> ref;
        for (int a = -2; a <= 2; ++a) ref.push_back(kTwoPi * kTwoPi * (B.xi[s][0] - a) * (B.xi[s][0] - a));
        std::sort(ref.begin(), ref.end());
        for (int k = 0; k < 5; ++k) CHECK(std::abs(B.values[s](k) - ref[k]) < 1e-10);
    }
    CHECK(B.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(bands(free_symbol(1), p, DualWindow(1, 1), 4), ConfigError);
}

TEST_CASE("serial and parallel sweeps write identical files") {
    MomentumPath p{{{0.0, 0.0}, {0.5, 0.5}}, 6};
    auto F = schrodinger_cosine(2);
    auto a = bands(F, p, DualWindow(2, 4), 6, nullptr, Exec::serial);
    auto b = bands(F, p, DualWindow(2, 4), 6, nullptr, Exec::parallel);
    auto dir = std::filesystem::temp_directory_path();
    write_bands_csv(a, (dir / "floquet_a.csv").string());
    write_bands_csv(b, (dir / "floquet_b.csv").string());
    auto sa = slurp(dir / "floquet_a.csv");
    CHECK(sa == slurp(dir / "floquet_b.csv"));
    CHECK(sa.rfind("xi_1,xi_2,lambda_1,", 0) == 0);
    std::filesystem::remove(dir / "floquet_a.csv");
    std::filesystem::remove(dir / "floquet_b.csv");
}

TEST_CASE("truncation convergence is Cauchy") {
    auto rep = truncation_convergence(schrodinger_cosine(1), {0.3}, {4, 8, 16}, 4);
    REQUIRE(rep.cauchy.size() == 2);
    CHECK(rep.cauchy[1] <= 1e-10);
    CHECK(rep.cauchy[0] <= 1e-6);
    CHECK_THROWS_AS(truncation_convergence(schrodinger_cosine(1), {0.3}, {8, 4}, 4), ConfigError);
}

TEST_CASE("band derivatives from finite differences") {
    // lowest free band near xi = 0.2 is (2 pi)^2 xi^2
    auto rep = band_smoothness_probe(free_symbol(1), {0.2}, {1.0}, {1e-2, 5e-3, 2.5e-3}, 0, DualWindow(1, 6));
    CHECK(rep.first_richardson == doctest::Approx(2 * kTwoPi * kTwoPi * 0.2).epsilon(1e-8));
    CHECK(rep.second_richardson == doctest::Approx(2 * kTwoPi * kTwoPi).epsilon(1e-6));
    CHECK(rep.stabilized);
    // xi = 1/2 is a crossing of the free bands
    CHECK_THROWS_AS(band_smoothness_probe(free_symbol(1), {0.5}, {1.0}, {1e-2, 5e-3}, 0, DualWindow(1, 6)),
                    GateError);
}
