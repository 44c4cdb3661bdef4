#include "floquet/spectral_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "floquet/csv.hpp"

namespace floquet {

EigenResult eig_hermitian(const CMatrix& M, bool vectors, double tol) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const double defect = hermiticity_defect(M);
    if (defect > tol * scale)
        throw GateError("matrix is not Hermitian: defect " + format_double(defect));
    const CMatrix H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
    EigenResult r;
    r.values = es.eigenvalues();
    if (vectors) r.vectors = es.eigenvectors();
    return r;
}

std::vector<Vec> MomentumPath::samples() const {
    if (waypoints.empty()) throw ConfigError("momentum path needs at least one waypoint");
    if (samples_per_segment < 1) throw ConfigError("samples per segment must be >= 1");
    std::vector<Vec> out;
    if (waypoints.size() == 1) return {waypoints[0]};
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
        const Vec& a = waypoints[s];
        const Vec& b = waypoints[s + 1];
        for (int k = 0; k < samples_per_segment; ++k) {
            double t = static_cast<double>(k) / samples_per_segment;
            Vec p(a.size());
            for (std::size_t j = 0; j < a.size(); ++j) p[j] = a[j] + t * (b[j] - a[j]);
            out.push_back(p);
        }
    }
    out.push_back(waypoints.back());
    return out;
}

int default_k_keep(const DualWindow& w) { return std::max<int>(1, static_cast<int>(w.size() / 4)); }

BandStructure bands(const PeriodicSymbol& F, const MomentumPath& path, const DualWindow& window, int k_keep,
                    const MagneticSetup* magnetic, Exec exec) {
    if (k_keep <= 0) k_keep = default_k_keep(window);
    if (k_keep > static_cast<int>(window.size()))
        throw ConfigError("k_keep larger than the window");
    BandStructure B;
    B.xi = path.samples();
    B.values.resize(B.xi.size());
    B.window_radius = window.radius();
    B.k_keep = k_keep;
    B.symbol_name = F.name();
    if (magnetic) B.gauge = "periodic";
    const long S = static_cast<long>(B.xi.size());

    // one matrix per sample; nested kernels run serially inside
    std::string error;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (long s = 0; s < S; ++s) {
        try {
            CMatrix M = magnetic ? magnetic_fiber_matrix(F, magnetic->A, B.xi[s], window, magnetic->grid,
                                                         &magnetic->cutoff, magnetic->options, Exec::serial)
                                       .M
                                 : build_fiber_matrix(F, B.xi[s], window, Exec::serial).entries;
            B.values[s] = eig_hermitian(M).values.head(k_keep);
        } catch (const std::exception& e) {
#pragma omp critical(floquet_bands_error)
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw GateError(error);
    B.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& v : B.values) B.min_eigenvalue = std::min(B.min_eigenvalue, v.minCoeff());
    return B;
}

ConvergenceReport truncation_convergence(const PeriodicSymbol& F, const Vec& xi, const std::vector<int>& radii,
                                         int k_keep, double tol) {
    if (!std::is_sorted(radii.begin(), radii.end())) throw ConfigError("window radii must be ascending");
    ConvergenceReport r;
    r.radii = radii;
    for (int R : radii) {
        DualWindow w(F.dimension(), R);
        if (k_keep > static_cast<int>(w.size())) throw ConfigError("k_keep larger than the smallest window");
        r.values.push_back(eig_hermitian(build_fiber_matrix(F, xi, w).entries).values.head(k_keep));
    }
    for (std::size_t i = 0; i + 1 < r.values.size(); ++i)
        r.cauchy.push_back((r.values[i + 1] - r.values[i]).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i + 1 < r.cauchy.size(); ++i)
        if (r.cauchy[i + 1] > tol && r.cauchy[i + 1] >= r.cauchy[i]) r.stalled = true;
    return r;
}

SmoothnessReport band_smoothness_probe(const PeriodicSymbol& F, const Vec& xi, const Vec& direction,
                                       const std::vector<double>& h_list, int band, const DualWindow& window) {
    if (h_list.size() < 2) throw ConfigError("need at least two step sizes");
    auto eig_at = [&](double t) {
        Vec p = xi;
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += t * direction[j];
        return eig_hermitian(build_fiber_matrix(F, p, window).entries).values;
    };
    const Eigen::VectorXd e0 = eig_at(0.0);
    if (band < 0 || band >= e0.size()) throw ConfigError("band index out of range");
    double gap = std::numeric_limits<double>::infinity();
    if (band > 0) gap = std::min(gap, e0(band) - e0(band - 1));
    if (band + 1 < e0.size()) gap = std::min(gap, e0(band + 1) - e0(band));

    SmoothnessReport r;
    r.gap = gap;
    double hmax = *std::max_element(h_list.begin(), h_list.end());
    for (double h : h_list) {
        double p = eig_at(h)(band), m = eig_at(-h)(band);
        r.rows.push_back({h, (p - m) / (2 * h), (p - 2 * e0(band) + m) / (h * h)});
    }
    double slope = std::abs(r.rows.front().first);
    if (gap < 1e-8 || gap < 10.0 * hmax * slope)
        throw GateError("band " + std::to_string(band) + " is not simple at this momentum (gap " +
                        format_double(gap) + ")");
    // Richardson on the two smallest steps, assuming error ~ h^2
    std::vector<SmoothnessRow> sorted = r.rows;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.h < b.h; });
    const auto& s = sorted[0];
    const auto& l = sorted[1];
    const double q = (l.h / s.h) * (l.h / s.h);
    r.first_richardson = (q * s.first - l.first) / (q - 1.0);
    r.second_richardson = (q * s.second - l.second) / (q - 1.0);
    r.stabilized = std::abs(s.first - l.first) <= 1e-3 * std::max(1.0, std::abs(s.first)) &&
                   std::abs(s.second - l.second) <= 1e-2 * std::max(1.0, std::abs(s.second));
    return r;
}

void write_bands_csv(const BandStructure& B, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::size_t d = B.xi.empty() ? 0 : B.xi[0].size();
    for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << "xi_" << j + 1;
    for (int k = 0; k < B.k_keep; ++k) out << ",lambda_" << k + 1;
    out << '\n';
    for (std::size_t s = 0; s < B.xi.size(); ++s) {
        for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << format_double(B.xi[s][j]);
        for (int k = 0; k < B.k_keep; ++k) out << ',' << format_double(B.values[s](k));
        out << '\n';
    }
}

void write_bands_json(const BandStructure& B, const std::string& path, const std::string& extra_json) {
    nlohmann::json j;
    j["symbol"] = B.symbol_name;
    j["window_radius"] = B.window_radius;
    j["k_keep"] = B.k_keep;
    j["gauge"] = B.gauge;
    j["min_eigenvalue"] = B.min_eigenvalue;
    j["run"] = nlohmann::json::parse(extra_json);
    auto& s = j["samples"] = nlohmann::json::array();
    for (std::size_t i = 0; i < B.xi.size(); ++i) {
        std::vector<double> v(B.values[i].data(), B.values[i].data() + B.values[i].size());
        s.push_back({{"xi", B.xi[i]}, {"lambda", v}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace floquet
