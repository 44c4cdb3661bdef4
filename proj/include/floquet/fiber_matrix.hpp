#pragma once

#include <functional>

#include "floquet/symbol_core.hpp"

namespace floquet {

// (mu, zeta) -> mu-th Fourier coefficient at momentum zeta.
using CoefficientSource = std::function<cplx(const IVec&, const Vec&)>;

struct FiberMatrix {
    Vec xi;
    DualWindow window;
    CMatrix entries;
};

struct FiberOptions {
    // Mutation switch for the verification suites: evaluates entries at
    // xi - alpha instead of xi - (alpha + beta) / 2. Never on by default.
    bool debug_mis_sign = false;
};

// M_{alpha beta} = F^_{alpha - beta}(xi - (alpha + beta) / 2).
FiberMatrix build_fiber_matrix(const PeriodicSymbol& F, const Vec& xi, const DualWindow& window,
                               Exec exec = Exec::parallel, const FiberOptions& opt = {});
FiberMatrix build_fiber_matrix(const CoefficientSource& src, const Vec& xi, const DualWindow& window,
                               Exec exec = Exec::parallel, const FiberOptions& opt = {});

double hermiticity_defect(const CMatrix& M);
inline double hermiticity_defect(const FiberMatrix& M) { return hermiticity_defect(M.entries); }

// Compares M(xi + gamma*) with M(xi) relabelled by gamma* on the interior
// sub-window |alpha|_inf <= N_w - margin |gamma*|_inf. Returns the largest
// entry difference, relative to the entry once it exceeds 1.
double band_periodicity_check(const PeriodicSymbol& F, const Vec& xi, const IVec& gamma_star,
                              const DualWindow& window, int margin);

}  // namespace floquet
