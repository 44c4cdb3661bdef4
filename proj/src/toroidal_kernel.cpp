#include "floquet/toroidal_kernel.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "floquet/csv.hpp"

namespace floquet {

namespace {

std::vector<IVec> parity_vectors(int d) {
    std::vector<IVec> out;
    for (int m = 0; m < (1 << d); ++m) {
        IVec k(d);
        for (int j = 0; j < d; ++j) k[j] = (m >> j) & 1;
        out.push_back(k);
    }
    return out;
}

Vec half_point(const Vec& x, const Vec& y, const IVec& kappa) {
    Vec p(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) p[j] = 0.5 * (x[j] + y[j] + kappa[j]);
    return p;
}

double dotv(const IVec& a, const Vec& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += a[j] * v[j];
    return s;
}

double doti(const IVec& a, const IVec& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += static_cast<double>(a[j]) * b[j];
    return s;
}

PeriodicSymbol maybe_cut(const PeriodicSymbol& F, const CutoffProfile* cutoff) {
    return cutoff ? apply_cutoff(F, *cutoff) : F;
}

// Flat index in the table of lattice differences i - j, |i_j - j_j| < n.
struct DiffTable {
    int d, n, side;
    long size() const {
        long s = 1;
        for (int j = 0; j < d; ++j) s *= side;
        return s;
    }
    long index(const IVec& mi, const IVec& mj) const {
        long k = 0;
        for (int j = 0; j < d; ++j) k = k * side + (mi[j] - mj[j] + n - 1);
        return k;
    }
    Vec diff(long k) const {
        Vec v(d);
        for (int j = d - 1; j >= 0; --j) {
            v[j] = static_cast<double>(k % side - (n - 1)) / n;
            k /= side;
        }
        return v;
    }
};

}  // namespace

// ---- difference operator -------------------------------------------------

ToroidalSymbolSeq difference_op(const ToroidalSymbolSeq& seq, int j) {
    if (j < 0 || j >= seq.grid.d) throw std::invalid_argument("difference direction out of range");
    ToroidalSymbolSeq out = seq;
    out.values.clear();
    const CVector zero = CVector::Zero(seq.grid.size());
    std::map<IVec, bool> keys;
    for (const auto& [g, _] : seq.values) {
        keys[g] = true;
        IVec h = g;
        --h[j];
        keys[h] = true;
    }
    for (const auto& [g, _] : keys) {
        IVec up = g;
        ++up[j];
        const CVector* a = seq.find(up);
        const CVector* b = seq.find(g);
        out.values[g] = (a ? *a : zero) - (b ? *b : zero);
    }
    return out;
}

// ---- amplitudes and kernels ---------------------------------------------

Amplitude build_amplitude(const PeriodicSymbol& F0, const Vec& xi, const IVec& alpha_star, const GridSpec& grid,
                          const CutoffProfile* cutoff) {
    const PeriodicSymbol F = maybe_cut(F0, cutoff);
    const int d = grid.d;
    const auto kappas = parity_vectors(d);
    const auto pts = grid.points();
    const long P = grid.size();
    const double norm = 1.0 / static_cast<double>(1 << d);

    Amplitude A{alpha_star, grid, CMatrix::Zero(P, P)};
    for (const auto& ks : kappas) {
        Vec eta(d);
        for (int j = 0; j < d; ++j) eta[j] = xi[j] + alpha_star[j] + 0.5 * ks[j];
        for (long a = 0; a < P; ++a)
            for (long b = 0; b < P; ++b) {
                Vec diff(d);
                for (int j = 0; j < d; ++j) diff[j] = pts[a][j] - pts[b][j];
                cplx inner = 0.0;
                for (const auto& k : kappas)
                    inner += unit_phase(kPi * doti(ks, k)) * norm * F.eval(half_point(pts[a], pts[b], k), eta);
                A.values(a, b) += unit_phase(kPi * dotv(ks, diff)) * inner;
            }
    }
    return A;
}

int default_kernel_radius(const Vec& xi, double cutoff_N) {
    return static_cast<int>(std::ceil(cutoff_N + sup_norm(xi))) + 1;
}

ToroidalKernel build_kernel_from_amplitudes(const PeriodicSymbol& F, const Vec& xi, const DualWindow& window,
                                            const GridSpec& grid, const CutoffProfile* cutoff) {
    if (window.size() == 0) throw std::invalid_argument("empty window");
    const auto pts = grid.points();
    const long P = grid.size();
    ToroidalKernel K{grid, CMatrix::Zero(P, P), F.name(), xi, window.radius(), cutoff ? cutoff->N : 0.0,
                     cutoff == nullptr};
    for (const auto& a : window.indices()) {
        Amplitude A = build_amplitude(F, xi, a, grid, cutoff);
        for (long i = 0; i < P; ++i)
            for (long k = 0; k < P; ++k) {
                Vec diff(grid.d);
                for (int j = 0; j < grid.d; ++j) diff[j] = pts[i][j] - pts[k][j];
                K.K(i, k) += unit_phase(pairing(a, diff)) * A.values(i, k);
            }
    }
    return K;
}

ToroidalKernel build_kernel(const PeriodicSymbol& F0, const Vec& xi, const DualWindow& window, const GridSpec& grid,
                            const CutoffProfile* cutoff, Exec exec) {
    if (window.size() == 0) throw std::invalid_argument("empty window");
    if (grid.d != F0.dimension() || window.dimension() != grid.d) throw std::invalid_argument("dimension mismatch");
    const PeriodicSymbol F = maybe_cut(F0, cutoff);
    const int d = grid.d;
    const long P = grid.size();
    const auto pts = grid.points();
    const auto kappas = parity_vectors(d);

    // The parity sum in the amplitude only keeps gamma* = 2 alpha* + kappa*
    // with gamma* = mu mod 2, so the kernel is
    //   K(x,y) = sum_mu e^{-i pi <mu, x+y>} S_mu(x - y),
    //   S_mu(v) = sum_{gamma* = mu mod 2} e^{i pi <gamma*, v>} c_mu(xi + gamma*/2).
    DiffTable tab{d, grid.n, 2 * grid.n - 1};
    const auto support = F.support();
    std::vector<CVector> S(support.size(), CVector::Zero(tab.size()));
    for (std::size_t m = 0; m < support.size(); ++m) {
        const IVec& mu = support[m];
        std::vector<std::pair<IVec, cplx>> gam;
        for (const auto& a : window.indices())
            for (const auto& ks : kappas) {
                IVec g(d);
                bool keep = true;
                for (int j = 0; j < d; ++j) {
                    g[j] = 2 * a[j] + ks[j];
                    if (((g[j] - mu[j]) % 2 + 2) % 2 != 0) keep = false;
                }
                if (!keep) continue;
                Vec eta(d);
                for (int j = 0; j < d; ++j) eta[j] = xi[j] + 0.5 * g[j];
                cplx c = F.fourier_coefficient(mu, eta);
                if (c != 0.0) gam.emplace_back(g, c);
            }
        const long T = tab.size();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
        for (long k = 0; k < T; ++k) {
            Vec v = tab.diff(k);
            cplx s = 0.0;
            for (const auto& [g, c] : gam) s += unit_phase(kPi * dotv(g, v)) * c;
            S[m](k) = s;
        }
    }

    std::vector<IVec> midx(P);
    for (long i = 0; i < P; ++i) midx[i] = grid.multi_index(i);
    ToroidalKernel K{grid, CMatrix::Zero(P, P), F0.name(), xi, window.radius(), cutoff ? cutoff->N : 0.0,
                     cutoff == nullptr};
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (long i = 0; i < P; ++i)
        for (long k = 0; k < P; ++k) {
            Vec sum(d);
            for (int j = 0; j < d; ++j) sum[j] = pts[i][j] + pts[k][j];
            const long t = tab.index(midx[i], midx[k]);
            cplx s = 0.0;
            for (std::size_t m = 0; m < support.size(); ++m)
                s += unit_phase(-kPi * dotv(support[m], sum)) * S[m](t);
            K.K(i, k) = s;
        }
    return K;
}

CVector apply_kernel(const ToroidalKernel& K, const CVector& phi) {
    if (phi.size() != K.grid.size()) throw std::invalid_argument("grid mismatch");
    return K.K * phi / static_cast<double>(K.grid.size());
}

CMatrix project_on_plane_waves(const CMatrix& K, const GridSpec& grid, const DualWindow& window) {
    const long P = grid.size();
    const auto pts = grid.points();
    CMatrix E(window.size(), P);
    for (std::size_t a = 0; a < window.size(); ++a)
        for (long i = 0; i < P; ++i) E(a, i) = unit_phase(pairing(window[a], pts[i]));
    const double s = 1.0 / (static_cast<double>(P) * P);
    return (E * K * E.adjoint()) * s;
}

CMatrix matrix_from_kernel(const ToroidalKernel& K, const DualWindow& window) {
    const int need = 2 * (2 * window.radius() + K.window_radius) + 1;
    if (K.grid.n < need)
        throw GateError("grid too coarse for alias-free projection: need n >= " + std::to_string(need));
    return project_on_plane_waves(K.K, K.grid, window);
}

// ---- Weyl system ---------------------------------------------------------

CVector weyl_apply(const GridSpec& grid, const Vec& t, const IVec& gamma, const CVector& phi, bool interpolate) {
    const int d = grid.d;
    const long P = grid.size();
    if (phi.size() != P) throw std::invalid_argument("grid mismatch");
    const auto pts = grid.points();
    const double prefactor_phase = -kPi * dotv(gamma, t);
    CVector out(P);

    IVec steps(d);
    bool aligned = true;
    for (int j = 0; j < d; ++j) {
        double s = t[j] * grid.n;
        steps[j] = static_cast<int>(std::lround(s));
        if (std::abs(s - steps[j]) > 1e-9) aligned = false;
    }
    if (!aligned && !interpolate) throw GateError("translation not grid aligned and interpolation disabled");

    if (aligned) {
        for (long i = 0; i < P; ++i) {
            IVec m = grid.multi_index(i);
            for (int j = 0; j < d; ++j) m[j] += steps[j];
            out(i) = unit_phase(prefactor_phase - pairing(gamma, pts[i])) * phi(grid.flat_index(m));
        }
        return out;
    }

    // band-limited shift: phi(x + t) from the discrete Fourier series of phi
    std::vector<IVec> freqs(P);
    for (long k = 0; k < P; ++k) {
        IVec m = grid.multi_index(k);
        for (int j = 0; j < d; ++j)
            if (m[j] > grid.n / 2) m[j] -= grid.n;
        freqs[k] = m;
    }
    CVector hat = CVector::Zero(P);
    for (long k = 0; k < P; ++k) {
        cplx s = 0.0;
        for (long i = 0; i < P; ++i) s += unit_phase(-pairing(freqs[k], pts[i])) * phi(i);
        hat(k) = s / static_cast<double>(P);
    }
    for (long i = 0; i < P; ++i) {
        Vec x = pts[i];
        for (int j = 0; j < d; ++j) x[j] += t[j];
        cplx s = 0.0;
        for (long k = 0; k < P; ++k) s += hat(k) * unit_phase(pairing(freqs[k], x));
        out(i) = unit_phase(prefactor_phase - pairing(gamma, pts[i])) * s;
    }
    return out;
}

// ---- symmetric and Kohn-Nirenberg quantization -----------------------------

CMatrix symmetric_kernel(const ToroidalSymbolSeq& Fseq, const GridSpec& grid, Exec exec) {
    if (!Fseq.half_index) throw std::invalid_argument("symmetric quantization needs half indices");
    if (Fseq.grid.n != 2 * grid.n || Fseq.grid.d != grid.d)
        throw std::invalid_argument("symbol sequence must be sampled on the doubled grid");
    const int d = grid.d;
    const int n = grid.n;
    const long P = grid.size();
    const auto pts = grid.points();
    const auto kappas = parity_vectors(d);
    const double norm = 1.0 / static_cast<double>(1 << d);
    std::vector<IVec> midx(P);
    for (long i = 0; i < P; ++i) midx[i] = grid.multi_index(i);

    std::vector<std::pair<IVec, const CVector*>> seq;
    for (const auto& [g, v] : Fseq.values) seq.emplace_back(g, &v);

    CMatrix K = CMatrix::Zero(P, P);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (long i = 0; i < P; ++i)
        for (long k = 0; k < P; ++k) {
            Vec diff(d);
            for (int j = 0; j < d; ++j) diff[j] = pts[i][j] - pts[k][j];
            cplx s = 0.0;
            for (const auto& [g, vals] : seq) {
                cplx inner = 0.0;
                for (const auto& kap : kappas) {
                    // (x + y + kappa)/2 without reducing x + y first
                    IVec fine(d);
                    for (int j = 0; j < d; ++j) fine[j] = midx[i][j] + midx[k][j] + kap[j] * n;
                    inner += unit_phase(kPi * doti(g, kap)) * (*vals)(Fseq.grid.flat_index(fine));
                }
                s += unit_phase(kPi * dotv(g, diff)) * inner;
            }
            K(i, k) = norm * s;
        }
    return K;
}

CVector quantize_symmetric(const ToroidalSymbolSeq& Fseq, const GridSpec& grid, const CVector& phi) {
    if (phi.size() != grid.size()) throw std::invalid_argument("grid mismatch");
    return symmetric_kernel(Fseq, grid) * phi / static_cast<double>(grid.size());
}

CMatrix kohn_nirenberg_kernel(const ToroidalSymbolSeq& a, const GridSpec& grid) {
    if (a.half_index) throw std::invalid_argument("Kohn-Nirenberg quantization needs integer indices");
    if (a.grid.n != grid.n || a.grid.d != grid.d) throw std::invalid_argument("grid mismatch");
    const long P = grid.size();
    const auto pts = grid.points();
    CMatrix K = CMatrix::Zero(P, P);
    for (const auto& [alpha, vals] : a.values)
        for (long i = 0; i < P; ++i)
            for (long k = 0; k < P; ++k) {
                Vec diff(grid.d);
                for (int j = 0; j < grid.d; ++j) diff[j] = pts[i][j] - pts[k][j];
                K(i, k) += unit_phase(pairing(alpha, diff)) * vals(i);
            }
    return K;
}

CVector quantize_kohn_nirenberg(const ToroidalSymbolSeq& a, const GridSpec& grid, const CVector& phi) {
    if (phi.size() != grid.size()) throw std::invalid_argument("grid mismatch");
    return kohn_nirenberg_kernel(a, grid) * phi / static_cast<double>(grid.size());
}

ToroidalSymbolSeq sample_symmetric_symbol(const PeriodicSymbol& F0, const Vec& xi, int R, const GridSpec& grid,
                                          const CutoffProfile* cutoff) {
    const PeriodicSymbol F = maybe_cut(F0, cutoff);
    ToroidalSymbolSeq s;
    s.grid = GridSpec{grid.d, 2 * grid.n};
    s.half_index = true;
    s.order = F.order();
    const auto fine = s.grid.points();
    DualWindow gw(grid.d, 2 * R + 1);
    for (const auto& g : gw.indices()) {
        Vec eta(grid.d);
        for (int j = 0; j < grid.d; ++j) eta[j] = xi[j] + 0.5 * g[j];
        CVector v(s.grid.size());
        bool nonzero = false;
        for (long k = 0; k < s.grid.size(); ++k) {
            v(k) = F.eval(fine[k], eta);
            nonzero = nonzero || v(k) != 0.0;
        }
        if (nonzero) s.values[g] = std::move(v);
    }
    return s;
}

ToroidalSymbolSeq conjugate(const ToroidalSymbolSeq& s) {
    ToroidalSymbolSeq c = s;
    for (auto& [_, v] : c.values) v = v.conjugate();
    return c;
}

// ---- dump ----------------------------------------------------------------

void write_kernel(const ToroidalKernel& K, const std::string& path, bool binary) {
    nlohmann::json h;
    h["symbol"] = K.symbol_name;
    h["xi"] = K.xi;
    h["dimension"] = K.grid.d;
    h["window"] = K.window_radius;
    h["grid_n"] = K.grid.n;
    h["cutoff_N"] = K.cutoff_N;
    h["distributional"] = K.distributional;
    h["rows"] = K.K.rows();
    h["format"] = binary ? "binary" : "csv";
    h["layout"] = "row-major, (re, im) interleaved";

    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << h.dump() << '\n';
    if (binary) {
        for (Eigen::Index i = 0; i < K.K.rows(); ++i)
            for (Eigen::Index k = 0; k < K.K.cols(); ++k) {
                double re = K.K(i, k).real(), im = K.K(i, k).imag();
                out.write(reinterpret_cast<const char*>(&re), sizeof re);
                out.write(reinterpret_cast<const char*>(&im), sizeof im);
            }
        return;
    }
    for (Eigen::Index i = 0; i < K.K.rows(); ++i) {
        for (Eigen::Index k = 0; k < K.K.cols(); ++k) {
            if (k) out << ',';
            out << format_double(K.K(i, k).real()) << ',' << format_double(K.K(i, k).imag());
        }
        out << '\n';
    }
}

}  // namespace floquet
