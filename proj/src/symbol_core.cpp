#include "floquet/symbol_core.hpp"
#include "floquet/csv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace floquet {

namespace {

double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double norm2(const Vec& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return s;
}

Vec add(const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) c[j] = a[j] + b[j];
    return c;
}

IVec negate(const IVec& v) {
    IVec w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) w[j] = -v[j];
    return w;
}

}  // namespace

double cutoff_theta(double r) {
    r = std::abs(r);
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    const double t = 2.0 * r - 1.0;
    const double g = mollifier(1.0 - t), h = mollifier(t);
    return g / (g + h);
}

double cutoff_theta_derivative(double r) {
    double sgn = r < 0 ? -1.0 : 1.0;
    r = std::abs(r);
    if (r <= 0.5 || r >= 1.0) return 0.0;
    const double t = 2.0 * r - 1.0;
    const double g = mollifier(1.0 - t), h = mollifier(t);
    const double s = g + h;
    const double dt = -g * h * (1.0 / ((1.0 - t) * (1.0 - t)) + 1.0 / (t * t)) / (s * s);
    return sgn * 2.0 * dt;
}

double CutoffProfile::operator()(const Vec& xi) const { return cutoff_theta(std::sqrt(norm2(xi)) / N); }

double bracket(const Vec& xi) { return std::sqrt(1.0 + norm2(xi)); }

// ---- CoefficientFunction -------------------------------------------------

CoefficientFunction CoefficientFunction::constant(int d, cplx c) {
    return polynomial(d, {Monomial{IVec(d, 0), c}});
}

CoefficientFunction CoefficientFunction::polynomial(int d, std::vector<Monomial> terms) {
    CoefficientFunction f;
    f.kind_ = Kind::polynomial;
    f.d_ = d;
    for (auto& m : terms) {
        if (static_cast<int>(m.power.size()) != d) throw ConfigError("polynomial power has wrong dimension");
        for (int p : m.power)
            if (p < 0) throw ConfigError("polynomial powers must be nonnegative");
    }
    f.mono_ = std::move(terms);
    return f;
}

CoefficientFunction CoefficientFunction::free_kinetic(int d, double scale) {
    std::vector<Monomial> terms;
    for (int j = 0; j < d; ++j) {
        IVec p(d, 0);
        p[j] = 2;
        terms.push_back({p, cplx(scale * kTwoPi * kTwoPi, 0.0)});
    }
    return polynomial(d, std::move(terms));
}

CoefficientFunction CoefficientFunction::bracket_power(int d, double s) {
    CoefficientFunction f;
    f.kind_ = Kind::bracket_power;
    f.d_ = d;
    f.param_ = s;
    return f;
}

CoefficientFunction CoefficientFunction::gaussian(int d, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian width must be positive");
    CoefficientFunction f;
    f.kind_ = Kind::gaussian;
    f.d_ = d;
    f.param_ = sigma;
    return f;
}

CoefficientFunction CoefficientFunction::product(CoefficientFunction a, CoefficientFunction b) {
    if (a.d_ != b.d_) throw ConfigError("product factors have different dimensions");
    CoefficientFunction f;
    f.kind_ = Kind::product;
    f.d_ = a.d_;
    f.a_ = std::make_shared<const CoefficientFunction>(std::move(a));
    f.b_ = std::make_shared<const CoefficientFunction>(std::move(b));
    return f;
}

CoefficientFunction CoefficientFunction::offset(CoefficientFunction g, Vec shift) {
    if (static_cast<int>(shift.size()) != g.d_) throw ConfigError("offset has wrong dimension");
    // collapse nested offsets so repeated shifts stay shallow
    if (g.kind_ == Kind::offset) {
        Vec s = add(g.shift_, shift);
        return offset(*g.a_, std::move(s));
    }
    CoefficientFunction f;
    f.kind_ = Kind::offset;
    f.d_ = g.d_;
    f.shift_ = std::move(shift);
    f.a_ = std::make_shared<const CoefficientFunction>(std::move(g));
    return f;
}

CoefficientFunction CoefficientFunction::cutoff(int d, double N) {
    if (!(N > 0.0)) throw ConfigError("cutoff N must be positive");
    CoefficientFunction f;
    f.kind_ = Kind::cutoff;
    f.d_ = d;
    f.param_ = N;
    return f;
}

cplx CoefficientFunction::eval(const Vec& xi) const {
    switch (kind_) {
        case Kind::polynomial: {
            cplx s = 0.0;
            for (const auto& m : mono_) {
                double v = 1.0;
                for (int j = 0; j < d_; ++j)
                    for (int k = 0; k < m.power[j]; ++k) v *= xi[j];
                s += m.coef * v;
            }
            return s;
        }
        case Kind::bracket_power:
            return std::pow(1.0 + norm2(xi), 0.5 * param_);
        case Kind::gaussian:
            return std::exp(-norm2(xi) / (param_ * param_));
        case Kind::product:
            return a_->eval(xi) * b_->eval(xi);
        case Kind::offset:
            return a_->eval(add(xi, shift_));
        case Kind::cutoff:
            return cutoff_theta(std::sqrt(norm2(xi)) / param_);
    }
    return 0.0;
}

std::vector<cplx> CoefficientFunction::gradient(const Vec& xi) const {
    std::vector<cplx> g(d_, 0.0);
    switch (kind_) {
        case Kind::polynomial:
            for (const auto& m : mono_) {
                for (int j = 0; j < d_; ++j) {
                    if (m.power[j] == 0) continue;
                    double v = m.power[j];
                    for (int i = 0; i < d_; ++i) {
                        int p = m.power[i] - (i == j ? 1 : 0);
                        for (int k = 0; k < p; ++k) v *= xi[i];
                    }
                    g[j] += m.coef * v;
                }
            }
            break;
        case Kind::bracket_power: {
            double f = param_ * std::pow(1.0 + norm2(xi), 0.5 * param_ - 1.0);
            for (int j = 0; j < d_; ++j) g[j] = f * xi[j];
            break;
        }
        case Kind::gaussian: {
            double s2 = param_ * param_;
            double f = -2.0 / s2 * std::exp(-norm2(xi) / s2);
            for (int j = 0; j < d_; ++j) g[j] = f * xi[j];
            break;
        }
        case Kind::product: {
            cplx fa = a_->eval(xi), fb = b_->eval(xi);
            auto ga = a_->gradient(xi), gb = b_->gradient(xi);
            for (int j = 0; j < d_; ++j) g[j] = ga[j] * fb + fa * gb[j];
            break;
        }
        case Kind::offset:
            return a_->gradient(add(xi, shift_));
        case Kind::cutoff: {
            double r = std::sqrt(norm2(xi));
            if (r == 0.0) break;
            double f = cutoff_theta_derivative(r / param_) / param_ / r;
            for (int j = 0; j < d_; ++j) g[j] = f * xi[j];
            break;
        }
    }
    return g;
}

CoefficientFunction CoefficientFunction::conjugate() const {
    switch (kind_) {
        case Kind::polynomial: {
            auto m = mono_;
            for (auto& t : m) t.coef = std::conj(t.coef);
            return polynomial(d_, std::move(m));
        }
        case Kind::product:
            return product(a_->conjugate(), b_->conjugate());
        case Kind::offset:
            return offset(a_->conjugate(), shift_);
        default:
            return *this;
    }
}

bool CoefficientFunction::real_valued() const {
    switch (kind_) {
        case Kind::polynomial:
            return std::all_of(mono_.begin(), mono_.end(), [](const Monomial& m) { return m.coef.imag() == 0.0; });
        case Kind::product:
            return a_->real_valued() && b_->real_valued();
        case Kind::offset:
            return a_->real_valued();
        default:
            return true;
    }
}

// ---- PeriodicSymbol ------------------------------------------------------

PeriodicSymbol& PeriodicSymbol::add_term(const IVec& mu, CoefficientFunction c) {
    if (static_cast<int>(mu.size()) != d_ || c.dimension() != d_)
        throw ConfigError("term dimension does not match symbol dimension");
    terms_[mu].push_back(std::move(c));
    real_ = false;  // the claim has to be re-established with mark_real
    return *this;
}

std::vector<IVec> PeriodicSymbol::support() const {
    std::vector<IVec> s;
    for (const auto& [mu, _] : terms_) s.push_back(mu);
    return s;
}

int PeriodicSymbol::max_mu() const {
    int m = 0;
    for (const auto& [mu, _] : terms_) m = std::max(m, sup_norm(mu));
    return m;
}

cplx PeriodicSymbol::fourier_coefficient(const IVec& mu, const Vec& xi) const {
    auto it = terms_.find(mu);
    if (it == terms_.end()) return 0.0;
    cplx s = 0.0;
    for (const auto& c : it->second) s += c.eval(xi);
    return s;
}

cplx PeriodicSymbol::eval(const Vec& x, const Vec& xi) const {
    cplx s = 0.0;
    for (const auto& [mu, cs] : terms_) {
        cplx c = 0.0;
        for (const auto& f : cs) c += f.eval(xi);
        s += c * unit_phase(-pairing(mu, x));
    }
    return s;
}

double PeriodicSymbol::conjugate_symmetry_defect(int samples, unsigned seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec xi(d_);
        for (auto& v : xi) v = U(rng);
        for (const auto& [mu, _] : terms_) {
            cplx a = fourier_coefficient(mu, xi);
            cplx b = fourier_coefficient(negate(mu), xi);
            double scale = std::max(1.0, std::abs(a));
            worst = std::max(worst, std::abs(b - std::conj(a)) / scale);
        }
    }
    return worst;
}

void PeriodicSymbol::mark_real(unsigned seed) {
    double defect = conjugate_symmetry_defect(64, seed);
    if (defect > 1e-12)
        throw ConfigError("symbol declared real but coefficients are not conjugate symmetric (defect " +
                          format_double(defect) + ")");
    real_ = true;
}

PeriodicSymbol free_symbol(int d) {
    PeriodicSymbol F(d, 2.0);
    F.add_term(IVec(d, 0), CoefficientFunction::free_kinetic(d));
    F.set_name("free");
    F.set_elliptic(true);
    F.mark_real();
    return F;
}

PeriodicSymbol cosine_potential(int d, double amplitude) {
    PeriodicSymbol F(d, 0.0);
    for (int j = 0; j < d; ++j) {
        IVec mu(d, 0);
        mu[j] = 1;
        F.add_term(mu, CoefficientFunction::constant(d, amplitude));
        mu[j] = -1;
        F.add_term(mu, CoefficientFunction::constant(d, amplitude));
    }
    F.set_name("cosine-potential");
    F.mark_real();
    return F;
}

PeriodicSymbol schrodinger_cosine(int d, double amplitude) {
    PeriodicSymbol F = cosine_potential(d, amplitude);
    F.add_term(IVec(d, 0), CoefficientFunction::free_kinetic(d));
    F.set_order(2.0);
    F.set_elliptic(true);
    F.set_name("cosine-schrodinger");
    F.mark_real();
    return F;
}

cplx fourier_coefficient_quadrature(const PeriodicSymbol& F, const IVec& mu, const Vec& xi, int n_quad) {
    const int need = 2 * (F.max_mu() + sup_norm(mu)) + 1;
    if (n_quad < need)
        throw GateError("quadrature grid undersampled: n_quad=" + std::to_string(n_quad) + " < " +
                        std::to_string(need));
    GridSpec g{F.dimension(), n_quad};
    cplx s = 0.0;
    for (long k = 0; k < g.size(); ++k) {
        Vec x = g.point(k);
        s += unit_phase(pairing(mu, x)) * F.eval(x, xi);
    }
    return s / static_cast<double>(g.size());
}

PeriodicSymbol shift(const PeriodicSymbol& F, const Vec& xi0) {
    if (static_cast<int>(xi0.size()) != F.dimension()) throw std::invalid_argument("dimension mismatch");
    PeriodicSymbol G(F.dimension(), F.order());
    G.set_name(F.name());
    G.set_elliptic(F.is_elliptic());
    for (const auto& [mu, cs] : F.terms())
        for (const auto& c : cs) G.add_term(mu, CoefficientFunction::offset(c, xi0));
    if (F.is_real()) G.mark_real();
    return G;
}

PeriodicSymbol apply_cutoff(const PeriodicSymbol& F, const CutoffProfile& prof) {
    PeriodicSymbol G(F.dimension(), F.order());
    G.set_name(F.name());
    const auto theta = CoefficientFunction::cutoff(F.dimension(), prof.N);
    for (const auto& [mu, cs] : F.terms())
        for (const auto& c : cs) G.add_term(mu, CoefficientFunction::product(theta, c));
    if (F.is_real()) G.mark_real();
    return G;
}

PeriodicSymbol conjugate(const PeriodicSymbol& F) {
    PeriodicSymbol G(F.dimension(), F.order());
    G.set_name(F.name() + "-conj");
    for (const auto& [mu, cs] : F.terms())
        for (const auto& c : cs) G.add_term(negate(mu), c.conjugate());
    if (F.is_real()) G.mark_real();
    return G;
}

// ---- probes --------------------------------------------------------------

namespace {

// d_x^a d_xi^b of c_mu(xi) exp(-i<mu,x>) summed over mu.
cplx mixed_derivative(const PeriodicSymbol& F, const Vec& x, const Vec& xi, const IVec& a, const IVec& b) {
    const int d = F.dimension();
    int order_b = 0;
    for (int v : b) order_b += v;

    std::function<cplx(const IVec&, const Vec&, const IVec&)> coef_derivative =
        [&](const IVec& mu, const Vec& at, const IVec& bb) -> cplx {
        int ob = 0;
        for (int v : bb) ob += v;
        if (ob == 0) return F.fourier_coefficient(mu, at);
        auto it = F.terms().find(mu);
        if (ob == 1) {
            int j = static_cast<int>(std::find(bb.begin(), bb.end(), 1) - bb.begin());
            cplx s = 0.0;
            for (const auto& c : it->second) s += c.gradient(at)[j];
            return s;
        }
        const double h = 1e-4;
        int j = 0;
        while (bb[j] == 0) ++j;
        IVec lower = bb;
        --lower[j];
        Vec p = at, m = at;
        p[j] += h;
        m[j] -= h;
        return (coef_derivative(mu, p, lower) - coef_derivative(mu, m, lower)) / (2.0 * h);
    };
    (void)order_b;

    cplx s = 0.0;
    for (const auto& [mu, _] : F.terms()) {
        cplx fx = 1.0;
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < a[j]; ++k) fx *= cplx(0.0, -kTwoPi * mu[j]);
        if (fx == 0.0) continue;
        s += fx * coef_derivative(mu, xi, b) * unit_phase(-pairing(mu, x));
    }
    return s;
}

std::vector<IVec> multi_indices(int d, int max_order) {
    std::vector<IVec> out;
    IVec cur(d, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == d) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[j] = v;
            rec(j + 1, left - v);
        }
        cur[j] = 0;
    };
    rec(0, max_order);
    return out;
}

Vec random_direction(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> G;
    Vec v(d);
    double s;
    do {
        s = 0.0;
        for (auto& c : v) {
            c = G(rng);
            s += c * c;
        }
    } while (s == 0.0);
    for (auto& c : v) c /= std::sqrt(s);
    return v;
}

}  // namespace

double seminorm_probe(const PeriodicSymbol& F, double p, int n, int m, const ProbeBox& box, int n_samples,
                      unsigned seed) {
    const int d = F.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto As = multi_indices(d, n);
    auto Bs = multi_indices(d, m);
    double sup = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Vec x(d);
        for (auto& v : x) v = U(rng) - 0.5;
        Vec xi = random_direction(d, rng);
        double r = box.xi_radius * U(rng);
        if (s == 0) r = box.xi_radius;  // always probe the far edge
        for (auto& v : xi) v *= r;
        const double w = bracket(xi);
        for (const auto& a : As)
            for (const auto& b : Bs) {
                int ob = 0;
                for (int v : b) ob += v;
                double val = std::pow(w, -p + ob) * std::abs(mixed_derivative(F, x, xi, a, b));
                sup = std::max(sup, val);
            }
    }
    return sup;
}

EllipticityResult ellipticity_probe(const PeriodicSymbol& F, double p, double R, int n_samples, unsigned seed) {
    if (!(p > 0.0)) throw std::invalid_argument("ellipticity probe needs p > 0");
    const int d = F.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> K(0, 15);
    // x on a 16-point lattice so zeros of trigonometric parts are hit
    double inner = std::numeric_limits<double>::infinity(), outer = inner;
    for (int s = 0; s < n_samples; ++s) {
        Vec x(d);
        for (auto& v : x) v = K(rng) / 16.0 - 0.5;
        Vec xi = random_direction(d, rng);
        double u = U(rng);
        double r = R * std::pow(100.0, u);
        for (auto& v : xi) v *= r;
        double val = std::abs(F.eval(x, xi)) * std::pow(bracket(xi), -p);
        (u < 0.5 ? inner : outer) = std::min(u < 0.5 ? inner : outer, val);
    }
    double inf = std::min(inner, outer);
    // a bound that keeps shrinking towards the outer shell is not a bound
    bool ok = inf > 1e-6 && outer >= 0.1 * inner;
    return {ok, inf};
}

}  // namespace floquet
