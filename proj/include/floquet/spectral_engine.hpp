#pragma once

#include <optional>

#include "floquet/magnetic_gauge.hpp"

namespace floquet {

struct EigenResult {
    Eigen::VectorXd values;    // ascending
    CMatrix vectors;           // columns, empty unless requested
};

// Refuses input whose Hermiticity defect exceeds tol * max(1, max|M|).
EigenResult eig_hermitian(const CMatrix& M, bool vectors = false, double tol = 1e-10);

struct MomentumPath {
    std::vector<Vec> waypoints;
    int samples_per_segment = 10;

    // Waypoints joined by straight segments, endpoints included once.
    std::vector<Vec> samples() const;
};

struct MagneticSetup {
    VectorPotential A;
    GridSpec grid;
    CutoffProfile cutoff;
    MagneticOptions options;
};

struct BandStructure {
    std::vector<Vec> xi;
    std::vector<Eigen::VectorXd> values;  // lowest k_keep per sample
    int window_radius = 0;
    int k_keep = 0;
    std::string symbol_name;
    std::string gauge;  // empty without a potential
    double min_eigenvalue = 0.0;
};

int default_k_keep(const DualWindow& w);

BandStructure bands(const PeriodicSymbol& F, const MomentumPath& path, const DualWindow& window, int k_keep,
                    const MagneticSetup* magnetic = nullptr, Exec exec = Exec::parallel);

struct ConvergenceReport {
    std::vector<int> radii;
    std::vector<Eigen::VectorXd> values;
    std::vector<double> cauchy;  // max |lambda(w_{i+1}) - lambda(w_i)| over the kept values
    bool stalled = false;
};

ConvergenceReport truncation_convergence(const PeriodicSymbol& F, const Vec& xi, const std::vector<int>& radii,
                                         int k_keep, double tol = 1e-10);

struct SmoothnessRow {
    double h;
    double first;   // central first difference
    double second;  // central second difference
};

struct SmoothnessReport {
    std::vector<SmoothnessRow> rows;
    double first_richardson = 0.0;
    double second_richardson = 0.0;
    bool stabilized = false;
    double gap = 0.0;
};

// Finite differences of band `band` along `direction`. Refuses when the band
// is not simple at xi (gap below 10 h |slope| or 1e-8).
SmoothnessReport band_smoothness_probe(const PeriodicSymbol& F, const Vec& xi, const Vec& direction,
                                       const std::vector<double>& h_list, int band, const DualWindow& window);

// CSV: xi_1..xi_d, lambda_1..lambda_k.
void write_bands_csv(const BandStructure& B, const std::string& path);
void write_bands_json(const BandStructure& B, const std::string& path, const std::string& extra_json = "{}");

}  // namespace floquet
