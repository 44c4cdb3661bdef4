#pragma once

#include <utility>

#include "floquet/fiber_matrix.hpp"
#include "floquet/fourier_series.hpp"
#include "floquet/symbol_core.hpp"

namespace floquet {

// A_j(x) = periodic_j(x) + sum_k linear[j][k] x_k. Components are in dual
// basis units: the constant potential A = a shifts quasi-momentum by a.
// A nonzero linear part is only there so that fields with nonzero flux can
// be written down and rejected.
struct VectorPotential {
    int d = 1;
    std::vector<FourierSeries> periodic;
    std::vector<Vec> linear;

    explicit VectorPotential(int dim = 1);
    static VectorPotential constant(const Vec& a);

    bool is_periodic() const;
    Vec eval(const Vec& x) const;
    VectorPotential operator+(const VectorPotential& o) const;
    // A + d(phi)
    VectorPotential plus_gradient(const FourierSeries& phi) const;
    double real_defect() const;
};

// B_{jk}, j < k, zero-based keys.
struct MagneticField2Form {
    int d = 1;
    std::map<std::pair<int, int>, FourierSeries> B;
};

MagneticField2Form curl(const VectorPotential& A);
// Mean of B_{jk} over the unit face, i.e. its zero Fourier coefficient.
double face_flux(const MagneticField2Form& B, int j, int k);

struct FluxReport {
    bool pass = true;
    double worst = 0.0;  // largest |face mean| over all faces and positions
    std::vector<std::pair<std::pair<int, int>, double>> fluxes;
    std::string message;
};

// Zero-mean-face test. The face mean of B_{jk} may still depend on the
// remaining coordinates, so every coefficient with mu_j = mu_k = 0 counts.
FluxReport zero_flux_gate(const MagneticField2Form& B, double tol = 1e-12);

// Integral of A along the segment from y to x, Euclidean (no 2 pi).
double line_integral(const VectorPotential& A, const Vec& x, const Vec& y);
// exp(i 2 pi line_integral(A, x, y)).
cplx lambda_phase(const VectorPotential& A, const Vec& x, const Vec& y);

// Evaluator for the leading minimal-coupling symbol F(x, xi - A(x)).
class MinimalCoupling {
public:
    MinimalCoupling(PeriodicSymbol F, VectorPotential A);
    cplx eval(const Vec& x, const Vec& xi) const;
    // mu-th Fourier coefficient in x by uniform quadrature with n_quad points
    cplx coefficient(const IVec& mu, const Vec& zeta, int n_quad) const;
    // Coefficient source truncated at |mu|_inf <= mu_max, usable by the
    // generic fiber builder.
    CoefficientSource projection(int n_quad, int mu_max) const;

private:
    PeriodicSymbol F_;
    VectorPotential A_;
};

struct MagneticOptions {
    int R_per = -1;         // periodization radius in cells, -1 picks it from the decay
    int R_max = 0;          // search limit for the automatic choice, 0 picks by dimension
    // sup of the kernel beyond R_per relative to its peak; 0 picks 1e-15 in
    // d = 1 and 1e-8 above, where the (2 R + 1)^d cell sum gets expensive.
    // Raised to ten times the round-off floor of the table when that is larger.
    double tail_tol = 0.0;
};

struct MagneticFiberResult {
    CMatrix M;
    int R_per = 0;
    double tail = 0.0;      // measured relative kernel sup beyond R_per
    double eta_step = 0.0;
};

// The cutoff is mandatory. The magnetic kernel is built by momentum
// quadrature and periodized over R_per cells, then projected on plane waves.
MagneticFiberResult magnetic_fiber_matrix(const PeriodicSymbol& F, const VectorPotential& A, const Vec& xi,
                                          const DualWindow& window, const GridSpec& grid,
                                          const CutoffProfile* cutoff, const MagneticOptions& opt = {},
                                          Exec exec = Exec::parallel);

}  // namespace floquet
