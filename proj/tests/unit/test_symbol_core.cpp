#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floquet/symbol_core.hpp"
#include "floquet/symbol_io.hpp"

using namespace floquet;

namespace {

using CF = CoefficientFunction;

std::vector<CF> sample_functions() {
    return {
        CF::free_kinetic(2, 0.5),
        CF::polynomial(2, {{{1, 2}, cplx(0.3, -0.1)}, {{0, 0}, 2.0}}),
        CF::bracket_power(2, 1.5),
        CF::gaussian(2, 0.7),
        CF::product(CF::gaussian(2, 1.1), CF::bracket_power(2, 2.0)),
        CF::offset(CF::free_kinetic(2), {0.25, -0.5}),
        CF::offset(CF::offset(CF::gaussian(2, 0.9), {0.1, 0.0}), {0.0, 0.2}),
        CF::cutoff(2, 3.0),
    };
}

}  // namespace

TEST_CASE("cutoff profile") {
    CHECK(cutoff_theta(0.0) == 1.0);
    CHECK(cutoff_theta(0.5) == 1.0);
    CHECK(cutoff_theta(1.0) == 0.0);
    CHECK(cutoff_theta(1.7) == 0.0);
    double prev = 1.0;
    for (double r = 0.5; r <= 1.0; r += 0.01) {
        CHECK(cutoff_theta(r) <= prev + 1e-15);
        prev = cutoff_theta(r);
        double fd = (cutoff_theta(r + 1e-6) - cutoff_theta(r - 1e-6)) / 2e-6;
        CHECK(cutoff_theta_derivative(r) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
    CutoffProfile c{4.0};
    CHECK(c(Vec{1.9, 0.0}) == 1.0);
    CHECK(c(Vec{3.0, 3.0}) == 0.0);
}

TEST_CASE("gradients match central differences") {
    const Vec xi{0.37, -1.21};
    const double h = 1e-6;
    for (const auto& f : sample_functions()) {
        auto g = f.gradient(xi);
        for (int j = 0; j < 2; ++j) {
            Vec p = xi, m = xi;
            p[j] += h;
            m[j] -= h;
            cplx fd = (f(p) - f(m)) / (2 * h);
            CHECK(std::abs(g[j] - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("offset and conjugate") {
    auto f = CF::polynomial(1, {{{1}, cplx(0.0, 2.0)}, {{0}, 1.0}});
    auto o = CF::offset(f, {0.5});
    CHECK(std::abs(o(Vec{1.0}) - f(Vec{1.5})) < 1e-15);
    CHECK(std::abs(f.conjugate()(Vec{0.7}) - std::conj(f(Vec{0.7}))) < 1e-15);
    CHECK_FALSE(f.real_valued());
    CHECK(CF::gaussian(1, 1.0).real_valued());
}

TEST_CASE("quadrature recovers stored coefficients") {
    auto F = schrodinger_cosine(2, 0.75);
    F.add_term({1, -1}, CF::polynomial(2, {{{1, 0}, cplx(0.0, 0.4)}}));
    const Vec xi{0.3, -0.8};
    for (const auto& mu : std::vector<IVec>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {1, -1}, {-1, 1}, {2, 0}}) {
        cplx q = fourier_coefficient_quadrature(F, mu, xi, 16);
        CHECK(std::abs(q - F.fourier_coefficient(mu, xi)) < 1e-12);
    }
    CHECK_THROWS_AS(fourier_coefficient_quadrature(F, {1, 0}, xi, 3), GateError);
}

TEST_CASE("reality check rejects asymmetric symbols") {
    auto F = free_symbol(1);
    F.add_term({1}, CF::constant(1, 1.0));
    CHECK_THROWS_AS(F.mark_real(), ConfigError);
    F.add_term({-1}, CF::constant(1, 1.0));
    CHECK_NOTHROW(F.mark_real());
    CHECK(F.is_real());
}

TEST_CASE("shift moves the momentum argument") {
    auto F = schrodinger_cosine(1);
    F.add_term({1}, CF::gaussian(1, 0.5));
    F.add_term({-1}, CF::gaussian(1, 0.5));
    auto G = shift(F, {0.3});
    for (double z : {-1.0, 0.0, 0.45})
        for (const auto& mu : F.support())
            CHECK(std::abs(G.fourier_coefficient(mu, {z}) - F.fourier_coefficient(mu, {z + 0.3})) < 1e-14);
}

TEST_CASE("cutoff removes large momenta") {
    auto F = apply_cutoff(free_symbol(1), CutoffProfile{4.0});
    CHECK(std::abs(F.fourier_coefficient({0}, {1.0}) - kTwoPi * kTwoPi) < 1e-12);
    CHECK(F.fourier_coefficient({0}, {4.5}) == cplx(0.0));
}

TEST_CASE("seminorms and ellipticity probes") {
    ProbeBox box;
    double s = seminorm_probe(free_symbol(1), 2.0, 2, 2, box, 200);
    CHECK(std::isfinite(s));
    CHECK(s <= 2 * kTwoPi * kTwoPi * (1 + 1e-6));
    CHECK(s >= kTwoPi * kTwoPi * 0.5);
    auto e = ellipticity_probe(schrodinger_cosine(2), 2.0, 4.0, 200);
    CHECK(e.elliptic);
    CHECK(e.constant > 1.0);
    CHECK_FALSE(ellipticity_probe(cosine_potential(1), 2.0, 4.0, 200).elliptic);
}

TEST_CASE("json round trip") {
    auto F = schrodinger_cosine(2);
    F.add_term({0, 0}, CF::product(CF::gaussian(2, 0.5), CF::offset(CF::bracket_power(2, 1.0), {0.1, 0.2})));
    F.set_name("roundtrip");
    auto G = parse_symbol(to_json(F));
    CHECK(G.name() == "roundtrip");
    for (const auto& mu : F.support())
        for (const Vec& xi : std::vector<Vec>{{0.0, 0.0}, {0.3, -2.0}, {5.0, 1.0}})
            CHECK(std::abs(G.fourier_coefficient(mu, xi) - F.fourier_coefficient(mu, xi)) < 1e-14);
    CHECK_THROWS_AS(parse_symbol(nlohmann::json::parse(R"({"dimension": 1, "terms": [{"mu": [0], "coef": {"kind": "nope"}}]})")),
                    ConfigError);
}
