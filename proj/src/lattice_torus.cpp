#include "floquet/lattice_torus.hpp"

#include <algorithm>
#include <cmath>

namespace floquet {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("dimension mismatch");
}

int floor_div2(int g) { return (g >= 0) ? g / 2 : -((-g + 1) / 2); }

}  // namespace

double pairing(const Vec& xi, const Vec& x) {
    require_same_dim(xi.size(), x.size());
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += xi[j] * x[j];
    return kTwoPi * s;
}

double pairing(const IVec& nu, const Vec& x) {
    require_same_dim(nu.size(), x.size());
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += nu[j] * x[j];
    return kTwoPi * s;
}

double reduce_cell(double x) {
    double r = x - std::floor(x + 0.5);
    // rounding can push r to exactly +1/2
    if (r >= 0.5) r -= 1.0;
    return r;
}

CellReduction section_s(const Vec& x) {
    CellReduction out;
    out.point.resize(x.size());
    out.gamma.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double g = std::floor(x[j] + 0.5);
        double r = x[j] - g;
        if (r >= 0.5) {
            r -= 1.0;
            g += 1.0;
        }
        out.point[j] = r;
        out.gamma[j] = static_cast<int>(g);
    }
    return out;
}

double reduce_double(double t) {
    double r = t - 2.0 * std::floor((t + 1.0) / 2.0);
    if (r >= 1.0) r -= 2.0;
    return r;
}

Vec reduce_double(const Vec& t) {
    Vec r(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) r[j] = reduce_double(t[j]);
    return r;
}

IndexDecomposition decompose_even_odd(const IVec& gamma) {
    IndexDecomposition out;
    out.even_part.resize(gamma.size());
    out.parity.resize(gamma.size());
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        out.even_part[j] = floor_div2(gamma[j]);
        out.parity[j] = gamma[j] - 2 * out.even_part[j];
    }
    return out;
}

cplx character_chi1(const IVec& nu, const Vec& z) { return unit_phase(-pairing(nu, z)); }

cplx character_chi2(const IVec& nu, const Vec& z2) { return unit_phase(-0.5 * pairing(nu, z2)); }

DoubleTorusSplit split_double(const Vec& z2) {
    DoubleTorusSplit out;
    auto red = section_s(z2);
    out.cell_point = red.point;
    out.kappa.resize(z2.size());
    for (std::size_t j = 0; j < z2.size(); ++j) {
        int g = red.gamma[j] % 2;
        out.kappa[j] = g < 0 ? g + 2 : g;
    }
    return out;
}

DualWindow::DualWindow(int dimension, int radius) : d_(dimension), radius_(radius) {
    if (dimension < 1) throw std::invalid_argument("window dimension must be >= 1");
    if (radius < 0) throw std::invalid_argument("window radius must be >= 0");
    const int side = 2 * radius + 1;
    long total = 1;
    for (int j = 0; j < d_; ++j) total *= side;
    indices_.reserve(total);
    IVec a(d_, -radius);
    for (long k = 0; k < total; ++k) {
        indices_.push_back(a);
        for (int j = d_ - 1; j >= 0; --j) {
            if (++a[j] <= radius) break;
            a[j] = -radius;
        }
    }
}

bool DualWindow::contains(const IVec& alpha) const {
    if (static_cast<int>(alpha.size()) != d_) return false;
    return std::all_of(alpha.begin(), alpha.end(), [&](int a) { return std::abs(a) <= radius_; });
}

long DualWindow::index_of(const IVec& alpha) const {
    if (!contains(alpha)) return -1;
    long k = 0;
    for (int j = 0; j < d_; ++j) k = k * (2 * radius_ + 1) + (alpha[j] + radius_);
    return k;
}

long GridSpec::size() const {
    long s = 1;
    for (int j = 0; j < d; ++j) s *= n;
    return s;
}

IVec GridSpec::multi_index(long k) const {
    IVec m(d);
    for (int j = d - 1; j >= 0; --j) {
        m[j] = static_cast<int>(k % n);
        k /= n;
    }
    return m;
}

long GridSpec::flat_index(const IVec& m) const {
    long k = 0;
    for (int j = 0; j < d; ++j) {
        int r = m[j] % n;
        if (r < 0) r += n;
        k = k * n + r;
    }
    return k;
}

Vec GridSpec::point(long k) const {
    IVec m = multi_index(k);
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = static_cast<double>(m[j]) / n - 0.5;
    return x;
}

std::vector<Vec> GridSpec::points() const {
    std::vector<Vec> out;
    out.reserve(size());
    for (long k = 0; k < size(); ++k) out.push_back(point(k));
    return out;
}

int sup_norm(const IVec& v) {
    int m = 0;
    for (int a : v) m = std::max(m, std::abs(a));
    return m;
}

double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace floquet
