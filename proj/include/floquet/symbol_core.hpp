#pragma once

#include <map>
#include <memory>
#include <random>

#include "floquet/lattice_torus.hpp"

namespace floquet {

// Smooth radial bump: 1 on r <= 1/2, 0 on r >= 1, built from exp(-1/t).
double cutoff_theta(double r);
double cutoff_theta_derivative(double r);

struct CutoffProfile {
    double N = 8.0;
    double operator()(const Vec& xi) const;
};

// Closed family of smooth coefficient functions of xi.
class CoefficientFunction {
public:
    enum class Kind { polynomial, bracket_power, gaussian, product, offset, cutoff };

    struct Monomial {
        IVec power;
        cplx coef;
    };

    static CoefficientFunction constant(int d, cplx c);
    static CoefficientFunction polynomial(int d, std::vector<Monomial> terms);
    // (2 pi)^2 |xi|^2 times scale.
    static CoefficientFunction free_kinetic(int d, double scale = 1.0);
    static CoefficientFunction bracket_power(int d, double s);
    static CoefficientFunction gaussian(int d, double sigma);
    static CoefficientFunction product(CoefficientFunction a, CoefficientFunction b);
    static CoefficientFunction offset(CoefficientFunction f, Vec shift);
    static CoefficientFunction cutoff(int d, double N);

    Kind kind() const { return kind_; }
    int dimension() const { return d_; }

    cplx operator()(const Vec& xi) const { return eval(xi); }
    cplx eval(const Vec& xi) const;
    std::vector<cplx> gradient(const Vec& xi) const;
    // Complex conjugate as a coefficient function.
    CoefficientFunction conjugate() const;
    // True when the function is real on real arguments by construction.
    bool real_valued() const;

    // Accessors used by serialization.
    const std::vector<Monomial>& monomials() const { return mono_; }
    double parameter() const { return param_; }
    const Vec& shift_vector() const { return shift_; }
    const CoefficientFunction& first() const { return *a_; }
    const CoefficientFunction& second() const { return *b_; }

private:
    Kind kind_ = Kind::polynomial;
    int d_ = 1;
    std::vector<Monomial> mono_;
    double param_ = 0.0;
    Vec shift_;
    std::shared_ptr<const CoefficientFunction> a_, b_;
};

// F(x, xi) = sum_mu c_mu(xi) exp(-i <mu, x>), finitely many mu.
class PeriodicSymbol {
public:
    PeriodicSymbol() = default;
    explicit PeriodicSymbol(int d, double order = 0.0) : d_(d), order_(order) {}

    int dimension() const { return d_; }
    double order() const { return order_; }
    void set_order(double p) { order_ = p; }
    bool is_real() const { return real_; }
    bool is_elliptic() const { return elliptic_; }
    void set_elliptic(bool e) { elliptic_ = e; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    // Adds c to the coefficient of mu (summing when mu is already present).
    PeriodicSymbol& add_term(const IVec& mu, CoefficientFunction c);
    const std::map<IVec, std::vector<CoefficientFunction>>& terms() const { return terms_; }
    std::vector<IVec> support() const;
    int max_mu() const;

    // Declares the symbol real after checking conjugate symmetry on samples.
    void mark_real(unsigned seed = 7);
    // Largest mismatch |c_{-mu}(xi) - conj c_mu(xi)| over random samples.
    double conjugate_symmetry_defect(int samples = 64, unsigned seed = 7) const;

    cplx eval(const Vec& x, const Vec& xi) const;
    cplx fourier_coefficient(const IVec& mu, const Vec& xi) const;

private:
    int d_ = 1;
    double order_ = 0.0;
    bool real_ = false;
    bool elliptic_ = false;
    std::string name_ = "symbol";
    std::map<IVec, std::vector<CoefficientFunction>> terms_;
};

// Common symbols.
PeriodicSymbol free_symbol(int d);
// V(x) = amplitude * sum_j 2 cos(2 pi x_j)
PeriodicSymbol cosine_potential(int d, double amplitude = 1.0);
PeriodicSymbol schrodinger_cosine(int d, double amplitude = 1.0);

// Uniform-grid quadrature of the mu-th Fourier coefficient. Throws when
// n_quad per dimension is below 2 (max stored |mu| + |mu|) + 1.
cplx fourier_coefficient_quadrature(const PeriodicSymbol& F, const IVec& mu, const Vec& xi, int n_quad);

// Coefficients zeta -> c_mu(zeta + xi0).
PeriodicSymbol shift(const PeriodicSymbol& F, const Vec& xi0);
PeriodicSymbol apply_cutoff(const PeriodicSymbol& F, const CutoffProfile& prof);
// Coefficients conj c_{-mu}: the symbol conj F.
PeriodicSymbol conjugate(const PeriodicSymbol& F);

struct ProbeBox {
    double xi_radius = 10.0;
};

// Empirical sup of <xi>^{-p+|b|} |d_x^a d_xi^b F| over random samples with
// |a| <= n, |b| <= m. Derivatives in xi beyond first order use central
// differences with step 1e-4.
double seminorm_probe(const PeriodicSymbol& F, double p, int n, int m, const ProbeBox& box,
                      int n_samples, unsigned seed = 11);

struct EllipticityResult {
    bool elliptic = false;
    double constant = 0.0;  // sampled inf of |F| <xi>^{-p}
};

// Samples |F(x, xi)| <xi>^{-p} on |xi| in [R, 100 R].
EllipticityResult ellipticity_probe(const PeriodicSymbol& F, double p, double R, int n_samples,
                                    unsigned seed = 13);

double bracket(const Vec& xi);

}  // namespace floquet
