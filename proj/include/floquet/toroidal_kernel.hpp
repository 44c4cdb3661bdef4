#pragma once

#include <optional>

#include "floquet/fiber_matrix.hpp"

namespace floquet {

// Sequence of grid functions on the torus indexed by dual indices. With
// half_index set, key gamma stands for the momentum gamma / 2. The grid
// functions live on a grid of resolution `grid.n`, which for the symmetric
// quantization must be twice the resolution of the functions it acts on.
struct ToroidalSymbolSeq {
    GridSpec grid;
    bool half_index = false;
    double order = 0.0;
    int rho = 1;
    std::map<IVec, CVector> values;

    const CVector* find(const IVec& g) const {
        auto it = values.find(g);
        return it == values.end() ? nullptr : &it->second;
    }
};

// (d_j f)_gamma = f_{gamma + e_j} - f_gamma, with zeros outside the support.
ToroidalSymbolSeq difference_op(const ToroidalSymbolSeq& seq, int j);

struct Amplitude {
    IVec alpha_star;
    GridSpec grid;
    CMatrix values;  // rows x, columns y
};

Amplitude build_amplitude(const PeriodicSymbol& F, const Vec& xi, const IVec& alpha_star, const GridSpec& grid,
                          const CutoffProfile* cutoff = nullptr);

struct ToroidalKernel {
    GridSpec grid;
    CMatrix K;  // K(z, z') on grid x grid
    std::string symbol_name;
    Vec xi;
    int window_radius = 0;
    double cutoff_N = 0.0;  // 0 when no cutoff
    bool distributional = false;  // truncated sum of a kernel that is not a function
};

// Smallest alpha* window that covers the momentum support of the cutoff
// symbol shifted by xi.
int default_kernel_radius(const Vec& xi, double cutoff_N);

ToroidalKernel build_kernel(const PeriodicSymbol& F, const Vec& xi, const DualWindow& window, const GridSpec& grid,
                            const CutoffProfile* cutoff = nullptr, Exec exec = Exec::parallel);
// Direct sum of the amplitudes, kept as the reference for build_kernel.
ToroidalKernel build_kernel_from_amplitudes(const PeriodicSymbol& F, const Vec& xi, const DualWindow& window,
                                            const GridSpec& grid, const CutoffProfile* cutoff = nullptr);

CVector apply_kernel(const ToroidalKernel& K, const CVector& phi);

// M'_{alpha beta} = n^{-2d} sum e^{i<alpha,z>} K(z,z') e^{-i<beta,z'>}.
// Throws GateError when the grid cannot resolve window plus kernel radius.
CMatrix matrix_from_kernel(const ToroidalKernel& K, const DualWindow& window);
// Same projection for any kernel matrix with a known frequency reach.
CMatrix project_on_plane_waves(const CMatrix& K, const GridSpec& grid, const DualWindow& window);

// Grid-aligned Weyl system on the double torus:
// (W(t, gamma) phi)(x) = e^{-i pi <gamma, t>} e^{-i 2 pi <gamma, x>} phi(x + t).
// t must satisfy n t integral unless interpolation is requested, in which
// case the shift is done by band-limited trigonometric interpolation.
CVector weyl_apply(const GridSpec& grid, const Vec& t, const IVec& gamma, const CVector& phi,
                   bool interpolate = false);

// Symmetric toroidal quantization. Fseq uses half indices and must be
// sampled on the grid of resolution 2n.
CMatrix symmetric_kernel(const ToroidalSymbolSeq& Fseq, const GridSpec& grid, Exec exec = Exec::parallel);
CVector quantize_symmetric(const ToroidalSymbolSeq& Fseq, const GridSpec& grid, const CVector& phi);

// Kohn-Nirenberg quantization with integer indices, a sampled on `grid`.
CMatrix kohn_nirenberg_kernel(const ToroidalSymbolSeq& a, const GridSpec& grid);
CVector quantize_kohn_nirenberg(const ToroidalSymbolSeq& a, const GridSpec& grid, const CVector& phi);

// Samples gamma* -> F(., xi + gamma*/2) on the 2n grid for |gamma*| <= 2R + 1.
ToroidalSymbolSeq sample_symmetric_symbol(const PeriodicSymbol& F, const Vec& xi, int R, const GridSpec& grid,
                                          const CutoffProfile* cutoff = nullptr);
// Pointwise conjugate of every grid function.
ToroidalSymbolSeq conjugate(const ToroidalSymbolSeq& s);

// Writes a kernel as a JSON header line followed by CSV rows or raw
// little-endian doubles (re, im interleaved).
void write_kernel(const ToroidalKernel& K, const std::string& path, bool binary);

}  // namespace floquet
