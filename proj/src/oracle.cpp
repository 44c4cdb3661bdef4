#include "floquet/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "floquet/fiber_matrix.hpp"

namespace floquet {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

IVec unflatten(long k, int d, long side) {
    IVec m(d);
    for (int j = d - 1; j >= 0; --j) {
        m[j] = static_cast<int>(k % side);
        k /= side;
    }
    return m;
}

std::vector<Eigen::Triplet<cplx>> fd_triplets(const FourierSeries& V, const Vec& xi, int n,
                                               const VectorPotential* A) {
    const int d = V.d;
    if (d < 1 || d > 2) throw ConfigError("finite-difference oracle supports d = 1 and d = 2 only");
    if (static_cast<int>(xi.size()) != d) throw std::invalid_argument("dimension mismatch");
    if (A && (A->d != d || !A->is_periodic())) throw ConfigError("oracle potential must be periodic and match d");
    GridSpec g{d, n};
    const double h = 1.0 / n;
    const double w = 1.0 / (h * h);
    std::vector<Eigen::Triplet<cplx>> t;
    for (long p = 0; p < g.size(); ++p) {
        const Vec x = g.point(p);
        t.emplace_back(p, p, 2.0 * d * w + V.eval(x).real());
        IVec m = g.multi_index(p);
        for (int j = 0; j < d; ++j) {
            // forward neighbour along j; the backward one is the adjoint entry
            IVec q = m;
            ++q[j];
            cplx hop = -w;
            if (q[j] == n) hop *= unit_phase(kTwoPi * xi[j]);
            if (A) {
                Vec mid = x;
                mid[j] += 0.5 * h;
                hop *= unit_phase(-kTwoPi * h * A->eval(mid)[j]);
            }
            const long r = g.flat_index(q);
            t.emplace_back(p, r, hop);
            t.emplace_back(r, p, std::conj(hop));
        }
    }
    return t;
}

// number of eigenvalues below sigma, by inertia of LDL^T(H - sigma)
class InertiaCounter {
public:
    explicit InertiaCounter(const SpMat& H) : H_(H), I_(H.rows(), H.cols()) {
        I_.setIdentity();
        solver_.analyzePattern(H_);
    }
    long below(double sigma) {
        // an exactly zero pivot (sigma on a diagonal entry of a structured
        // matrix) poisons the count; nudge and retry
        for (int attempt = 0; attempt < 8; ++attempt) {
            SpMat S = H_ - sigma * I_;
            solver_.factorize(S);
            const auto D = solver_.vectorD();
            long c = 0;
            bool finite = solver_.info() == Eigen::Success;
            for (Eigen::Index i = 0; i < D.size() && finite; ++i) {
                finite = std::isfinite(D(i).real());
                if (D(i).real() < 0.0) ++c;
            }
            if (finite) return c;
            sigma += 1e-12 * std::max(1.0, std::abs(sigma));
        }
        throw std::runtime_error("inertia count failed near " + std::to_string(sigma));
    }

private:
    const SpMat& H_;
    SpMat I_;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
};

}  // namespace

CMatrix fd_bloch_matrix(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A) {
    auto t = fd_triplets(V, xi, n, A);
    const long N = ipow(n, V.d);
    SpMat S(N, N);
    S.setFromTriplets(t.begin(), t.end());
    return CMatrix(S);
}

Eigen::VectorXd fd_bloch_spectrum(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A,
                                  int k_keep) {
    auto t = fd_triplets(V, xi, n, A);
    const long N = ipow(n, V.d);
    if (k_keep < 1 || k_keep > N) throw ConfigError("k_keep out of range");
    SpMat H(N, N);
    H.setFromTriplets(t.begin(), t.end());
    H.makeCompressed();

    // Gershgorin bounds
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (long r = 0; r < N; ++r) {
        double diag = 0.0, off = 0.0;
        for (SpMat::InnerIterator it(H, r); it; ++it) {
            if (it.row() == it.col())
                diag = it.value().real();
            else
                off += std::abs(it.value());
        }
        lo = std::min(lo, diag - off);
        hi = std::max(hi, diag + off);
    }

    InertiaCounter count(H);
    Eigen::VectorXd out(k_keep);
    double a = lo - 1.0;
    for (int k = 0; k < k_keep; ++k) {
        double b = hi + 1.0;
        double left = a;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (left + b);
            if (b - left <= 1e-13 * std::max(1.0, std::abs(mid))) break;
            if (count.below(mid) > k)
                b = mid;
            else
                left = mid;
        }
        out(k) = 0.5 * (left + b);
        a = left;  // the next eigenvalue is not below this one
    }
    return out;
}

Eigen::VectorXd fd_bloch_richardson(const FourierSeries& V, const Vec& xi, int n, const VectorPotential* A,
                                    int k_keep) {
    Eigen::VectorXd c = fd_bloch_spectrum(V, xi, n, A, k_keep);
    Eigen::VectorXd f = fd_bloch_spectrum(V, xi, 2 * n, A, k_keep);
    return (4.0 * f - c) / 3.0;
}

// ---- discrete Bloch-Floquet ------------------------------------------------

long SupercellGrid::size() const { return ipow(static_cast<long>(L) * n, d); }
long SupercellGrid::cell_size() const { return ipow(n, d); }

long SupercellGrid::global_index(const IVec& gamma, const IVec& m) const {
    long k = 0;
    for (int j = 0; j < d; ++j) k = k * (static_cast<long>(L) * n) + static_cast<long>(gamma[j]) * n + m[j];
    return k;
}

Vec SupercellGrid::point(const IVec& gamma, const IVec& m) const {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = gamma[j] + static_cast<double>(m[j]) / n - 0.5;
    return x;
}

std::vector<IVec> dual_grid(const SupercellGrid& g) {
    std::vector<IVec> ks;
    for (long i = 0; i < ipow(g.L, g.d); ++i) ks.push_back(unflatten(i, g.d, g.L));
    return ks;
}

namespace {

void check_supercell(const SupercellGrid& g, const CVector& f) {
    if (g.L < 1 || g.n < 1) throw ConfigError("supercell needs L >= 1 and n >= 1");
    if (f.size() != g.size()) throw std::invalid_argument("sample count does not match the supercell grid");
}

Vec dual_point(const SupercellGrid& g, const IVec& k) {
    Vec xi(g.d);
    for (int j = 0; j < g.d; ++j) xi[j] = static_cast<double>(k[j]) / g.L;
    return xi;
}

}  // namespace

CVector discrete_bloch_floquet(const SupercellGrid& g, const CVector& f, const IVec& k) {
    check_supercell(g, f);
    const Vec xi = dual_point(g, k);
    const long C = g.cell_size();
    const long cells = ipow(g.L, g.d);
    CVector out = CVector::Zero(C);
    for (long c = 0; c < cells; ++c) {
        IVec gamma = unflatten(c, g.d, g.L);
        Vec gv(gamma.begin(), gamma.end());
        const cplx ph = unit_phase(-pairing(xi, gv));
        for (long p = 0; p < C; ++p) out(p) += ph * f(g.global_index(gamma, unflatten(p, g.d, g.n)));
    }
    return out;
}

CVector inverse_bloch_floquet(const SupercellGrid& g, const std::map<IVec, CVector>& fibers) {
    const long C = g.cell_size();
    const long cells = ipow(g.L, g.d);
    if (static_cast<long>(fibers.size()) != cells) throw std::invalid_argument("need every fiber of the dual grid");
    CVector f = CVector::Zero(g.size());
    for (const auto& [k, fib] : fibers) {
        const Vec xi = dual_point(g, k);
        for (long c = 0; c < cells; ++c) {
            IVec gamma = unflatten(c, g.d, g.L);
            Vec gv(gamma.begin(), gamma.end());
            const cplx ph = unit_phase(pairing(xi, gv));
            for (long p = 0; p < C; ++p) f(g.global_index(gamma, unflatten(p, g.d, g.n))) += ph * fib(p);
        }
    }
    return f / static_cast<double>(cells);
}

CVector discrete_bfz(const SupercellGrid& g, const CVector& f, const IVec& k) {
    check_supercell(g, f);
    const Vec xi = dual_point(g, k);
    const long C = g.cell_size();
    const long cells = ipow(g.L, g.d);
    CVector out = CVector::Zero(C);
    for (long c = 0; c < cells; ++c) {
        IVec gamma = unflatten(c, g.d, g.L);
        for (long p = 0; p < C; ++p) {
            IVec m = unflatten(p, g.d, g.n);
            out(p) += unit_phase(-pairing(xi, g.point(gamma, m))) * f(g.global_index(gamma, m));
        }
    }
    return out;
}

CVector discrete_bfz_factorized(const SupercellGrid& g, const CVector& f, const IVec& k) {
    // p*(xi): representative of k / L in the dual cell [-1/2, 1/2)
    IVec kr(g.d);
    for (int j = 0; j < g.d; ++j) {
        double r = reduce_cell(static_cast<double>(k[j]) / g.L);
        kr[j] = static_cast<int>(std::lround(r * g.L));
    }
    CVector bf = discrete_bloch_floquet(g, f, kr);
    const Vec xi = dual_point(g, k);
    const long C = g.cell_size();
    for (long p = 0; p < C; ++p) bf(p) *= unit_phase(-pairing(xi, g.point(IVec(g.d, 0), unflatten(p, g.d, g.n))));
    return bf;
}

// ---- supercell identity ------------------------------------------------------

SupercellReport supercell_identity_check(const PeriodicSymbol& F, const SupercellOptions& opt) {
    const int d = F.dimension();
    const int L = opt.L;
    const int n = opt.n;
    if (L < 1 || n < 4) throw ConfigError("supercell needs L >= 1 and n >= 4");
    const double N = opt.cutoff_N;
    const int max_freq = static_cast<int>(std::ceil(N)) + F.max_mu() + opt.window_radius + 2;
    if (n <= 2 * max_freq) throw GateError("supercell grid too coarse: need n > " + std::to_string(2 * max_freq));

    // momenta j/L - alpha of the supercell basis
    std::vector<Vec> ks;
    DualWindow w(d, opt.window_radius);
    SupercellGrid sg{d, L, n};
    const auto duals = dual_grid(sg);
    for (const auto& j : duals)
        for (const auto& a : w.indices()) {
            Vec k(d);
            for (int c = 0; c < d; ++c) k[c] = static_cast<double>(j[c]) / L - a[c];
            ks.push_back(k);
        }

    // k^_mu(v) = int exp(i 2 pi eta v) theta_N(eta) c_mu(eta) d eta, uniform rule
    const int images = static_cast<int>(std::ceil(opt.reach / L));
    const int H = 4 * L * (images + 1);
    const double h = 1.0 / H;
    const long M = static_cast<long>(std::ceil(N * H));
    const long eside = 2 * M + 1;
    const long etas = ipow(eside, d);
    const auto mus = F.support();
    std::vector<std::vector<std::pair<Vec, cplx>>> samples(mus.size());
    for (std::size_t m = 0; m < mus.size(); ++m)
        for (long e = 0; e < etas; ++e) {
            IVec q = unflatten(e, d, eside);
            Vec eta(d);
            double r2 = 0.0;
            for (int c = 0; c < d; ++c) {
                eta[c] = (q[c] - M) * h;
                r2 += eta[c] * eta[c];
            }
            double th = cutoff_theta(std::sqrt(r2) / N);
            if (th == 0.0) continue;
            samples[m].push_back({eta, th * F.fourier_coefficient(mus[m], eta)});
        }

    // lattice differences (i - j) - n L beta, tabulated per dimension offset
    const long Ln = static_cast<long>(L) * n;
    const long reachk = Ln * images + Ln;
    const long dside = 2 * reachk + 1;
    const long dtotal = ipow(dside, d);
    std::vector<std::vector<cplx>> table(mus.size(), std::vector<cplx>(dtotal));
    const double vol = std::pow(h, d);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < dtotal; ++t) {
        IVec q = unflatten(t, d, dside);
        Vec v(d);
        for (int c = 0; c < d; ++c) v[c] = static_cast<double>(q[c] - reachk) / n;
        for (std::size_t m = 0; m < mus.size(); ++m) {
            cplx s = 0.0;
            for (const auto& [eta, val] : samples[m]) s += unit_phase(pairing(eta, v)) * val;
            table[m][t] = vol * s;
        }
    }

    // periodized kernel on the supercell grid
    const long P = sg.size();
    std::vector<IVec> gidx(P);
    std::vector<Vec> gpt(P);
    for (long p = 0; p < P; ++p) {
        gidx[p] = unflatten(p, d, Ln);
        gpt[p].resize(d);
        for (int c = 0; c < d; ++c) gpt[p][c] = static_cast<double>(gidx[p][c]) / n - 0.5;
    }
    DualWindow imgs(d, images);
    CMatrix K = CMatrix::Zero(P, P);
#pragma omp parallel for schedule(static)
    for (long a = 0; a < P; ++a)
        for (long b = 0; b < P; ++b) {
            cplx s = 0.0;
            for (const auto& beta : imgs.indices()) {
                long t = 0;
                Vec sum(d);
                for (int c = 0; c < d; ++c) {
                    long q = gidx[a][c] - gidx[b][c] - Ln * beta[c];
                    t = t * dside + (q + reachk);
                    sum[c] = gpt[a][c] + gpt[b][c] + static_cast<double>(L) * beta[c];
                }
                for (std::size_t m = 0; m < mus.size(); ++m) {
                    double ph = 0.0;
                    for (int c = 0; c < d; ++c) ph += mus[m][c] * sum[c];
                    s += unit_phase(-kPi * ph) * table[m][t];
                }
            }
            K(a, b) = s;
        }

    CMatrix E(ks.size(), P);
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (long p = 0; p < P; ++p) E(i, p) = unit_phase(-pairing(ks[i], gpt[p]));
    const double scale = 1.0 / (std::pow(static_cast<double>(L), d) * std::pow(static_cast<double>(n), 2 * d));
    CMatrix S = (E * K * E.adjoint()) * scale;
    S = 0.5 * (S + S.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(S, Eigen::EigenvaluesOnly);

    // union of fiber spectra
    PeriodicSymbol Fc = apply_cutoff(F, CutoffProfile{N});
    std::vector<double> uni;
    for (const auto& j : duals) {
        Vec xi(d);
        for (int c = 0; c < d; ++c) xi[c] = static_cast<double>(j[c]) / L;
        CMatrix Mf = build_fiber_matrix(Fc, xi, w, Exec::serial).entries;
        Eigen::SelfAdjointEigenSolver<CMatrix> ef(0.5 * (Mf + Mf.adjoint()), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < ef.eigenvalues().size(); ++i) uni.push_back(ef.eigenvalues()(i));
    }
    std::sort(uni.begin(), uni.end());

    const int k = std::min<int>(opt.k_keep, static_cast<int>(uni.size()));
    SupercellReport r;
    r.supercell = es.eigenvalues().head(k);
    r.fibers = Eigen::Map<Eigen::VectorXd>(uni.data(), k);
    r.max_deviation = (r.supercell - r.fibers).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace floquet
