#pragma once

#include <map>

#include "floquet/lattice_torus.hpp"

namespace floquet {

// f(x) = sum_mu a_mu exp(-i <mu, x>) on the torus, finitely many mu.
struct FourierSeries {
    int d = 1;
    std::map<IVec, cplx> coef;

    FourierSeries() = default;
    explicit FourierSeries(int dim) : d(dim) {}

    FourierSeries& add(const IVec& mu, cplx a) {
        coef[mu] += a;
        return *this;
    }

    cplx eval(const Vec& x) const {
        cplx s = 0.0;
        for (const auto& [mu, a] : coef) s += a * unit_phase(-pairing(mu, x));
        return s;
    }

    cplx coefficient(const IVec& mu) const {
        auto it = coef.find(mu);
        return it == coef.end() ? cplx(0.0) : it->second;
    }

    // d/dx_j, exact on coefficients
    FourierSeries derivative(int j) const {
        FourierSeries g(d);
        for (const auto& [mu, a] : coef)
            if (mu[j] != 0) g.coef[mu] = a * cplx(0.0, -kTwoPi * mu[j]);
        return g;
    }

    FourierSeries operator+(const FourierSeries& o) const {
        FourierSeries g = *this;
        for (const auto& [mu, a] : o.coef) g.coef[mu] += a;
        return g;
    }

    FourierSeries operator-(const FourierSeries& o) const {
        FourierSeries g = *this;
        for (const auto& [mu, a] : o.coef) g.coef[mu] -= a;
        return g;
    }

    double real_defect() const {
        double w = 0.0;
        for (const auto& [mu, a] : coef) {
            IVec m = mu;
            for (auto& v : m) v = -v;
            w = std::max(w, std::abs(coefficient(m) - std::conj(a)));
        }
        return w;
    }

    int max_mu() const {
        int m = 0;
        for (const auto& [mu, _] : coef) m = std::max(m, sup_norm(mu));
        return m;
    }
};

}  // namespace floquet
