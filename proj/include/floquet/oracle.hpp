#pragma once

#include <optional>

#include "floquet/magnetic_gauge.hpp"

namespace floquet {

// Lowest k_keep eigenvalues of the second-order finite-difference
// discretization of (-i grad - 2 pi A)^2 + V on n^d points per cell with
// psi(x + e_j) = exp(i 2 pi xi_j) psi(x). Eigenvalues come from bisection on
// Sylvester inertia of sparse LDL^T factorizations. d in {1, 2}.
Eigen::VectorXd fd_bloch_spectrum(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A,
                                  int k_keep);
// The same, as a dense matrix, for cross-checks on small grids.
CMatrix fd_bloch_matrix(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A);
// (4 lambda(2n) - lambda(n)) / 3.
Eigen::VectorXd fd_bloch_richardson(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A,
                                    int k_keep);

// Samples on L^d cells of n^d points. Point (gamma, m) sits at
// gamma + m / n - 1/2 with gamma in [0, L)^d, stored lexicographically in
// the global index gamma * n + m per dimension.
struct SupercellGrid {
    int d = 1;
    int L = 1;
    int n = 4;

    long size() const;
    long cell_size() const;
    long global_index(const IVec& gamma, const IVec& m) const;
    Vec point(const IVec& gamma, const IVec& m) const;
};

// (U_BF f)(xi, x) = sum_gamma exp(-i <xi, gamma>) f(x + gamma), xi = k / L.
CVector discrete_bloch_floquet(const SupercellGrid& g, const CVector& f, const IVec& k);
// Inverse from all L^d fibers, keyed by k in [0, L)^d.
CVector inverse_bloch_floquet(const SupercellGrid& g, const std::map<IVec, CVector>& fibers);
// Direct sum: sum_gamma exp(-i <xi, x + gamma>) f(x + gamma), xi = k / L for
// any integer k.
CVector discrete_bfz(const SupercellGrid& g, const CVector& f, const IVec& k);
// exp(-i <xi, x>) (U_BF f)(p*(xi), x), the factorized route.
CVector discrete_bfz_factorized(const SupercellGrid& g, const CVector& f, const IVec& k);
std::vector<IVec> dual_grid(const SupercellGrid& g);

struct SupercellOptions {
    int L = 4;
    int window_radius = 6;   // fiber window, and the matching supercell momenta
    int n = 64;              // grid points per cell
    double cutoff_N = 16.0;
    int k_keep = 20;
    double reach = 12.0;     // kernel support kept, in cells
};

struct SupercellReport {
    Eigen::VectorXd supercell;  // lowest k_keep
    Eigen::VectorXd fibers;     // lowest k_keep of the union
    double max_deviation = 0.0;
};

// Compares the periodic operator on L-periodic functions, quantized by a
// direct double quadrature of the Weyl kernel on the supercell, with the
// union of fiber spectra at xi in (1/L) Z^d / Z^d.
SupercellReport supercell_identity_check(const PeriodicSymbol& F, const SupercellOptions& opt);

}  // namespace floquet
