#include "floquet/fiber_matrix.hpp"

#include <algorithm>

namespace floquet {

namespace {

inline Vec entry_argument(const Vec& xi, const IVec& a, const IVec& b, bool mis_sign) {
    Vec z(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j)
        z[j] = mis_sign ? xi[j] - a[j] : xi[j] - 0.5 * (a[j] + b[j]);
    return z;
}

inline IVec difference(const IVec& a, const IVec& b) {
    IVec m(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) m[j] = a[j] - b[j];
    return m;
}

}  // namespace

FiberMatrix build_fiber_matrix(const CoefficientSource& src, const Vec& xi, const DualWindow& window, Exec exec,
                               const FiberOptions& opt) {
    if (window.size() == 0) throw std::invalid_argument("empty window");
    if (static_cast<int>(xi.size()) != window.dimension()) throw std::invalid_argument("dimension mismatch");
    FiberMatrix out{xi, window, CMatrix::Zero(window.size(), window.size())};
    const long W = static_cast<long>(window.size());

    if (exec == Exec::serial) {
        for (long i = 0; i < W; ++i)
            for (long k = 0; k < W; ++k) {
                const IVec& a = window[i];
                const IVec& b = window[k];
                out.entries(i, k) = src(difference(a, b), entry_argument(xi, a, b, opt.debug_mis_sign));
            }
        return out;
    }

#pragma omp parallel for collapse(2) schedule(static)
    for (long i = 0; i < W; ++i)
        for (long k = 0; k < W; ++k) {
            const IVec& a = window[i];
            const IVec& b = window[k];
            out.entries(i, k) = src(difference(a, b), entry_argument(xi, a, b, opt.debug_mis_sign));
        }
    return out;
}

FiberMatrix build_fiber_matrix(const PeriodicSymbol& F, const Vec& xi, const DualWindow& window, Exec exec,
                               const FiberOptions& opt) {
    if (F.dimension() != window.dimension()) throw std::invalid_argument("dimension mismatch");
    const int reach = F.max_mu();
    CoefficientSource src = [&F, reach](const IVec& mu, const Vec& z) -> cplx {
        // most entries are outside the Fourier support of F
        if (sup_norm(mu) > reach) return 0.0;
        return F.fourier_coefficient(mu, z);
    };
    return build_fiber_matrix(src, xi, window, exec, opt);
}

double hermiticity_defect(const CMatrix& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix not square");
    double worst = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index k = i; k < M.cols(); ++k) worst = std::max(worst, std::abs(M(i, k) - std::conj(M(k, i))));
    return worst;
}

double band_periodicity_check(const PeriodicSymbol& F, const Vec& xi, const IVec& gamma_star,
                              const DualWindow& window, int margin) {
    const int g = sup_norm(gamma_star);
    const int inner = window.radius() - margin * g;
    if (margin >= window.radius() || inner < 0)
        throw std::invalid_argument("margin too large for the window");
    Vec xs = xi;
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] += gamma_star[j];
    const auto M0 = build_fiber_matrix(F, xi, window, Exec::serial);
    const auto M1 = build_fiber_matrix(F, xs, window, Exec::serial);
    DualWindow sub(window.dimension(), inner);
    double worst = 0.0;
    for (const auto& a : sub.indices())
        for (const auto& b : sub.indices()) {
            IVec as = a, bs = b;
            for (std::size_t j = 0; j < a.size(); ++j) {
                as[j] -= gamma_star[j];
                bs[j] -= gamma_star[j];
            }
            long ia = window.index_of(as), ib = window.index_of(bs);
            if (ia < 0 || ib < 0) continue;
            // relative above 1: xi + gamma* is itself rounded
            const cplx ref = M0.entries(ia, ib);
            const double diff = std::abs(M1.entries(window.index_of(a), window.index_of(b)) - ref);
            worst = std::max(worst, diff / std::max(1.0, std::abs(ref)));
        }
    return worst;
}

}  // namespace floquet
