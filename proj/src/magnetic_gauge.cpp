#include "floquet/magnetic_gauge.hpp"

#include <algorithm>
#include <cmath>

#include <fftw3.h>

#include "floquet/csv.hpp"
#include "floquet/toroidal_kernel.hpp"

namespace floquet {

namespace {

double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

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

long flatten_mod(const IVec& m, long side) {
    long k = 0;
    for (int v : m) {
        long r = v % side;
        if (r < 0) r += side;
        k = k * side + r;
    }
    return k;
}

// c^_mu(k / n) for every lattice k, as a periodic table of length P = n H
// per dimension, from the uniform eta rule with spacing 1 / H.
struct KernelTable {
    int d = 1;
    long P = 0;
    double h = 0.0;
    std::vector<IVec> mus;
    std::vector<std::vector<cplx>> values;

    const cplx& at(std::size_t m, const IVec& k) const { return values[m][flatten_mod(k, P)]; }
};

KernelTable make_table(const PeriodicSymbol& F, const CutoffProfile& cut, int n, int H, int reach_cells, Exec exec) {
    const int d = F.dimension();
    KernelTable T;
    T.d = d;
    T.P = static_cast<long>(n) * H;
    T.h = 1.0 / H;
    T.mus = F.support();
    const long total = ipow(T.P, d);
    const long M = static_cast<long>(std::ceil(cut.N * H));
    const long side = 2 * M + 1;
    const long etas = ipow(side, d);
    const double vol = std::pow(T.h, d);

    for (const auto& mu : T.mus) {
        // samples of theta_N(eta) c_mu(eta)
        std::vector<cplx> g(etas);
        std::vector<IVec> eidx(etas);
        for (long e = 0; e < etas; ++e) {
            IVec m = unflatten(e, d, side);
            Vec eta(d);
            for (int j = 0; j < d; ++j) {
                m[j] -= static_cast<int>(M);
                eta[j] = m[j] * T.h;
            }
            eidx[e] = m;
            g[e] = cut(eta) == 0.0 ? cplx(0.0) : cut(eta) * F.fourier_coefficient(mu, eta);
        }

        std::vector<cplx> out(total, 0.0);
        if (exec == Exec::parallel) {
            fftw_complex* buf = fftw_alloc_complex(total);
            for (long q = 0; q < total; ++q) buf[q][0] = buf[q][1] = 0.0;
            for (long e = 0; e < etas; ++e) {
                long q = flatten_mod(eidx[e], T.P);
                buf[q][0] += g[e].real();
                buf[q][1] += g[e].imag();
            }
            std::vector<int> dims(d, static_cast<int>(T.P));
            fftw_plan plan;
#pragma omp critical(floquet_fftw_plan)
            plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
            fftw_execute(plan);
#pragma omp critical(floquet_fftw_plan)
            fftw_destroy_plan(plan);
            for (long q = 0; q < total; ++q) out[q] = vol * cplx(buf[q][0], buf[q][1]);
            fftw_free(buf);
        } else {
            // direct sum, only on the lattice points that can be reached
            const long reach = static_cast<long>(n) * (reach_cells + 1);
            const long rside = 2 * reach + 1;
            const long rtotal = ipow(rside, d);
            for (long r = 0; r < rtotal; ++r) {
                IVec k = unflatten(r, d, rside);
                for (auto& v : k) v -= static_cast<int>(reach);
                cplx s = 0.0;
                for (long e = 0; e < etas; ++e) {
                    if (g[e] == 0.0) continue;
                    double ph = 0.0;
                    for (int j = 0; j < d; ++j) ph += static_cast<double>(eidx[e][j]) * k[j];
                    s += g[e] * unit_phase(kTwoPi * ph / static_cast<double>(T.P));
                }
                out[flatten_mod(k, T.P)] = vol * s;
            }
        }
        T.values.push_back(std::move(out));
    }
    return T;
}

// Relative size of the table on the shells R < |v|_inf <= R + 1.
std::vector<double> shell_profile(const KernelTable& T, int n, int max_shell) {
    const int d = T.d;
    std::vector<double> shell(max_shell + 2, 0.0);
    double peak = 0.0;
    const long reach = static_cast<long>(n) * (max_shell + 1);
    const long rside = 2 * reach + 1;
    const long rtotal = ipow(rside, d);
    for (long r = 0; r < rtotal; ++r) {
        IVec k = unflatten(r, d, rside);
        long kmax = 0;
        for (auto& v : k) {
            v -= static_cast<int>(reach);
            kmax = std::max<long>(kmax, std::abs(v));
        }
        int b = static_cast<int>((kmax + n - 1) / n);  // v in (b-1, b]
        for (std::size_t m = 0; m < T.mus.size(); ++m) {
            double a = std::abs(T.at(m, k));
            peak = std::max(peak, a);
            if (b <= max_shell + 1) shell[b] = std::max(shell[b], a);
        }
    }
    if (peak > 0.0)
        for (auto& s : shell) s /= peak;
    return shell;
}

double tail_beyond(const std::vector<double>& shell, int R) {
    double t = 0.0;
    for (std::size_t b = R + 1; b < shell.size(); ++b) t = std::max(t, shell[b]);
    return t;
}

}  // namespace

// ---- potentials and fields -----------------------------------------------

VectorPotential::VectorPotential(int dim) : d(dim), periodic(dim, FourierSeries(dim)), linear(dim, Vec(dim, 0.0)) {}

VectorPotential VectorPotential::constant(const Vec& a) {
    VectorPotential A(static_cast<int>(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j) A.periodic[j].add(IVec(a.size(), 0), a[j]);
    return A;
}

bool VectorPotential::is_periodic() const {
    for (const auto& row : linear)
        for (double v : row)
            if (v != 0.0) return false;
    return true;
}

Vec VectorPotential::eval(const Vec& x) const {
    Vec a(d);
    for (int j = 0; j < d; ++j) {
        a[j] = periodic[j].eval(x).real();
        for (int k = 0; k < d; ++k) a[j] += linear[j][k] * x[k];
    }
    return a;
}

VectorPotential VectorPotential::operator+(const VectorPotential& o) const {
    if (o.d != d) throw std::invalid_argument("dimension mismatch");
    VectorPotential r = *this;
    for (int j = 0; j < d; ++j) {
        r.periodic[j] = periodic[j] + o.periodic[j];
        for (int k = 0; k < d; ++k) r.linear[j][k] += o.linear[j][k];
    }
    return r;
}

VectorPotential VectorPotential::plus_gradient(const FourierSeries& phi) const {
    VectorPotential r = *this;
    for (int j = 0; j < d; ++j) r.periodic[j] = periodic[j] + phi.derivative(j);
    return r;
}

double VectorPotential::real_defect() const {
    double w = 0.0;
    for (const auto& p : periodic) w = std::max(w, p.real_defect());
    return w;
}

MagneticField2Form curl(const VectorPotential& A) {
    MagneticField2Form B;
    B.d = A.d;
    for (int j = 0; j < A.d; ++j)
        for (int k = j + 1; k < A.d; ++k) {
            FourierSeries b = A.periodic[k].derivative(j) - A.periodic[j].derivative(k);
            const double c = A.linear[k][j] - A.linear[j][k];
            if (c != 0.0) b.add(IVec(A.d, 0), c);
            B.B[{j, k}] = b;
        }
    return B;
}

double face_flux(const MagneticField2Form& B, int j, int k) {
    if (!(j < k) || k >= B.d || j < 0) throw std::invalid_argument("face indices must satisfy j < k < d");
    auto it = B.B.find({j, k});
    if (it == B.B.end()) return 0.0;
    return it->second.coefficient(IVec(B.d, 0)).real();
}

FluxReport zero_flux_gate(const MagneticField2Form& B, double tol) {
    FluxReport r;
    for (const auto& [jk, b] : B.B) {
        r.fluxes.push_back({jk, face_flux(B, jk.first, jk.second)});
        for (const auto& [mu, a] : b.coef)
            if (mu[jk.first] == 0 && mu[jk.second] == 0) r.worst = std::max(r.worst, std::abs(a));
    }
    r.pass = r.worst <= tol;
    if (!r.pass)
        r.message = "zero-mean-face flux condition violated: face flux " + format_double(r.worst) +
                    " exceeds " + format_double(tol) + "; the field admits no periodic vector potential";
    return r;
}

double line_integral(const VectorPotential& A, const Vec& x, const Vec& y) {
    const int d = A.d;
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = x[j] - y[j];
    cplx s = 0.0;
    for (int j = 0; j < d; ++j) {
        if (v[j] == 0.0) continue;
        cplx avg = 0.0;
        for (const auto& [mu, a] : A.periodic[j].coef) {
            // mean of exp(-i<mu, y + t v>) over t in [0, 1]
            const double theta = pairing(mu, v);
            avg += a * unit_phase(-pairing(mu, y) - 0.5 * theta) * sinc(0.5 * theta);
        }
        double lin = 0.0;
        for (int k = 0; k < d; ++k) lin += A.linear[j][k] * (y[k] + 0.5 * v[k]);
        s += (avg + lin) * v[j];
    }
    return s.real();
}

cplx lambda_phase(const VectorPotential& A, const Vec& x, const Vec& y) {
    return unit_phase(kTwoPi * line_integral(A, x, y));
}

// ---- minimal coupling ----------------------------------------------------

MinimalCoupling::MinimalCoupling(PeriodicSymbol F, VectorPotential A) : F_(std::move(F)), A_(std::move(A)) {
    if (F_.dimension() != A_.d) throw std::invalid_argument("dimension mismatch");
}

cplx MinimalCoupling::eval(const Vec& x, const Vec& xi) const {
    Vec a = A_.eval(x);
    Vec k(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) k[j] = xi[j] - a[j];
    return F_.eval(x, k);
}

cplx MinimalCoupling::coefficient(const IVec& mu, const Vec& zeta, int n_quad) const {
    GridSpec g{F_.dimension(), n_quad};
    cplx s = 0.0;
    for (long k = 0; k < g.size(); ++k) {
        Vec x = g.point(k);
        s += unit_phase(pairing(mu, x)) * eval(x, zeta);
    }
    return s / static_cast<double>(g.size());
}

CoefficientSource MinimalCoupling::projection(int n_quad, int mu_max) const {
    MinimalCoupling self = *this;
    return [self, n_quad, mu_max](const IVec& mu, const Vec& zeta) -> cplx {
        if (sup_norm(mu) > mu_max) return 0.0;
        return self.coefficient(mu, zeta, n_quad);
    };
}

// ---- magnetic fiber matrix -------------------------------------------------

MagneticFiberResult magnetic_fiber_matrix(const PeriodicSymbol& F, const VectorPotential& A, const Vec& xi,
                                          const DualWindow& window, const GridSpec& grid,
                                          const CutoffProfile* cutoff, const MagneticOptions& opt, Exec exec) {
    if (!cutoff) throw GateError("magnetic fiber matrix needs a cutoff");
    const int d = F.dimension();
    if (A.d != d || grid.d != d || window.dimension() != d || static_cast<int>(xi.size()) != d)
        throw std::invalid_argument("dimension mismatch");
    auto flux = zero_flux_gate(curl(A));
    if (!flux.pass) throw GateError(flux.message);
    if (!A.is_periodic()) throw GateError("vector potential is not periodic (pure gauge linear part)");

    const int need = 2 * (window.radius() + static_cast<int>(std::ceil(cutoff->N + sup_norm(xi))) + F.max_mu()) + 1;
    if (grid.n < need) throw GateError("grid too coarse for the magnetic projection: need n >= " + std::to_string(need));

    const int n = grid.n;
    int R_search = opt.R_per > 0 ? opt.R_per : (opt.R_max > 0 ? opt.R_max : (d == 1 ? 40 : (d == 2 ? 10 : 3)));
    const int H = 4 * (R_search + 1);
    KernelTable T = make_table(F, *cutoff, n, H, opt.R_per > 0 ? 2 * R_search + 1 : R_search + 1, exec);

    const double tail_tol = opt.tail_tol > 0.0 ? opt.tail_tol : (d == 1 ? 1e-15 : 1e-8);
    MagneticFiberResult res;
    res.eta_step = 1.0 / H;
    // The far shells only hold round-off from the table; a tolerance below
    // that floor cannot be met at any radius, so it is raised to the floor.
    auto shell = shell_profile(T, n, opt.R_per > 0 ? 2 * R_search + 1 : R_search + 1);
    const double floor = *std::min_element(shell.begin() + 1, shell.end());
    const double tol = std::max(tail_tol, 10.0 * floor);
    if (opt.R_per > 0) {
        res.R_per = opt.R_per;
    } else {
        res.R_per = R_search;
        for (int R = 1; R <= R_search; ++R)
            if (tail_beyond(shell, R) <= tol) {
                res.R_per = R;
                break;
            }
    }
    res.tail = tail_beyond(shell, res.R_per);
    if (res.tail > tol)
        throw GateError("kernel tail " + format_double(res.tail) + " beyond R_per=" + std::to_string(res.R_per) +
                        " exceeds tolerance " + format_double(tol));

    const int R = res.R_per;
    const long Pg = grid.size();
    const auto pts = grid.points();
    std::vector<IVec> midx(Pg);
    for (long i = 0; i < Pg; ++i) midx[i] = grid.multi_index(i);
    DualWindow cells(d, R);

    // Everything in the inner loop is tabulated: offsets k = n (x - y - beta)
    // are integers in [-kmax, kmax] per dimension.
    const long kmax = static_cast<long>(n) * (R + 1);
    const long kside = 2 * kmax + 1;
    const auto betas = cells.indices();
    const std::size_t nm = T.mus.size();

    // e^{-i pi <mu, x>} on grid points, e^{-i pi <mu, beta>} on cells
    std::vector<cplx> ex(nm * Pg), eb(nm * betas.size());
    for (std::size_t m = 0; m < nm; ++m) {
        for (long i = 0; i < Pg; ++i) ex[m * Pg + i] = unit_phase(-0.5 * pairing(T.mus[m], pts[i]));
        for (std::size_t b = 0; b < betas.size(); ++b) {
            long s = 0;
            for (int j = 0; j < d; ++j) s += static_cast<long>(T.mus[m][j]) * betas[b][j];
            eb[m * betas.size() + b] = (s % 2 == 0) ? 1.0 : -1.0;
        }
    }
    // e^{-i 2 pi xi_j k / n}
    std::vector<std::vector<cplx>> exi(d, std::vector<cplx>(kside));
    for (int j = 0; j < d; ++j)
        for (long k = -kmax; k <= kmax; ++k) exi[j][k + kmax] = unit_phase(-kTwoPi * xi[j] * k / n);

    // Potential terms: component j, coefficient a, mode mu.
    struct PotTerm {
        int j;
        cplx a;
        IVec mu;
    };
    std::vector<PotTerm> pot;
    int amax = 0;
    for (int j = 0; j < d; ++j)
        for (const auto& [mu, a] : A.periodic[j].coef)
            if (a != 0.0) {
                pot.push_back({j, a, mu});
                amax = std::max(amax, static_cast<int>(sup_norm(mu)));
            }
    // e^{-i 2 pi <mu, y>} per term and grid point; e^{-i pi m k / n} per
    // dimension for |m| <= amax
    std::vector<cplx> ay(pot.size() * Pg);
    for (std::size_t t = 0; t < pot.size(); ++t)
        for (long i = 0; i < Pg; ++i) ay[t * Pg + i] = unit_phase(-pairing(pot[t].mu, pts[i]));
    const long mside = 2 * amax + 1;
    std::vector<cplx> half(d * mside * kside);
    for (int j = 0; j < d; ++j)
        for (long m = -amax; m <= amax; ++m)
            for (long k = -kmax; k <= kmax; ++k)
                half[(j * mside + m + amax) * kside + k + kmax] = unit_phase(-kPi * m * k / n);

    // flattened term data for the inner loop
    std::vector<int> pot_j(pot.size());
    std::vector<long> pot_mu(pot.size() * d);
    for (std::size_t t = 0; t < pot.size(); ++t) {
        pot_j[t] = pot[t].j;
        for (int j = 0; j < d; ++j) pot_mu[t * d + j] = pot[t].mu[j];
    }
    std::vector<long> beta_flat(betas.size() * d);
    for (std::size_t b = 0; b < betas.size(); ++b)
        for (int j = 0; j < d; ++j) beta_flat[b * d + j] = betas[b][j];

    // kernel table restricted to |k| <= kmax, interleaved over mu
    const long kvol = ipow(kside, d);
    std::vector<cplx> tk(kvol * nm);
    {
        IVec kk(d);
        for (long f = 0; f < kvol; ++f) {
            IVec u = unflatten(f, d, kside);
            for (int j = 0; j < d; ++j) kk[j] = u[j] - static_cast<int>(kmax);
            const long q = flatten_mod(kk, T.P);
            for (std::size_t m = 0; m < nm; ++m) tk[f * nm + m] = T.values[m][q];
        }
    }

    CMatrix K = CMatrix::Zero(Pg, Pg);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (long i = 0; i < Pg; ++i) {
        IVec k(d);
        std::vector<cplx> exy(nm), apy(pot.size());
        for (long jj = 0; jj < Pg; ++jj) {
            for (std::size_t m = 0; m < nm; ++m) exy[m] = ex[m * Pg + i] * ex[m * Pg + jj];
            for (std::size_t t = 0; t < pot.size(); ++t) apy[t] = pot[t].a * ay[t * Pg + jj];
            cplx acc = 0.0;
            for (std::size_t b = 0; b < betas.size(); ++b) {
                cplx xiph = 1.0;
                for (int j = 0; j < d; ++j) {
                    k[j] = midx[i][j] - midx[jj][j] - n * static_cast<int>(beta_flat[b * d + j]);
                    xiph *= exi[j][k[j] + kmax];
                }
                long f = 0;
                for (int j = 0; j < d; ++j) f = f * kside + k[j] + kmax;
                const cplx* tv = &tk[f * nm];
                cplx kern = 0.0;
                for (std::size_t m = 0; m < nm; ++m) kern += exy[m] * eb[m * betas.size() + b] * tv[m];
                // line integral of A from y + beta to x, per term
                // a e^{-i2pi<mu,y>} e^{-i theta/2} sinc(theta/2) v_j, theta = 2 pi <mu, v>
                double s = 0.0;
                for (std::size_t t = 0; t < pot.size(); ++t) {
                    const long kj = k[pot_j[t]];
                    if (kj == 0) continue;
                    cplx e = 1.0;
                    long mk = 0;
                    for (int j = 0; j < d; ++j) {
                        const long mu = pot_mu[t * d + j];
                        if (mu == 0) continue;
                        e *= half[(j * mside + mu + amax) * kside + k[j] + kmax];
                        mk += mu * k[j];
                    }
                    const double sn = mk == 0 ? 1.0 : -e.imag() / (kPi * static_cast<double>(mk) / n);
                    s += (apy[t] * e).real() * sn * static_cast<double>(kj) / n;
                }
                acc += unit_phase(kTwoPi * s) * xiph * kern;
            }
            K(i, jj) = acc;
        }
    }
    res.M = project_on_plane_waves(K, grid, window);
    return res;
}

}  // namespace floquet
