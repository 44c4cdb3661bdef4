#pragma once

#include <map>

#include "floquet/types.hpp"

namespace floquet {

// Duality pairing <xi, x> = 2*pi * sum_j xi_j x_j. The only place the 2*pi
// of the duality lives; every character below goes through it.
double pairing(const Vec& xi, const Vec& x);
double pairing(const IVec& nu, const Vec& x);

struct CellReduction {
    Vec point;    // in [-1/2, 1/2)^d
    IVec gamma;   // x = point + gamma
};

// x = x_hat + gamma with x_hat = x - floor(x + 1/2), ties to the left.
CellReduction section_s(const Vec& x);
double reduce_cell(double x);

// Reduction of a double torus coordinate into [-1, 1).
double reduce_double(double t);
Vec reduce_double(const Vec& t);

struct IndexDecomposition {
    IVec even_part;
    IVec parity;  // entries in {0, 1}
};

// gamma = 2 * even_part + parity with floor division.
IndexDecomposition decompose_even_odd(const IVec& gamma);

// z^{-nu} on the torus, z a cell point.
cplx character_chi1(const IVec& nu, const Vec& z);
// Half-index character on the double torus, z2 in [-1, 1)^d.
cplx character_chi2(const IVec& nu, const Vec& z2);

struct DoubleTorusSplit {
    Vec cell_point;  // projection onto the torus
    IVec kappa;      // parity offset, z2 = cell_point + kappa (mod 2)
};

// Splits a double torus point as projected cell point plus a parity vector.
DoubleTorusSplit split_double(const Vec& z2);

// Centered sup-norm box of dual indices, lexicographically ordered with the
// first coordinate most significant.
class DualWindow {
public:
    DualWindow() = default;
    DualWindow(int dimension, int radius);

    int dimension() const { return d_; }
    int radius() const { return radius_; }
    std::size_t size() const { return indices_.size(); }
    const IVec& operator[](std::size_t k) const { return indices_[k]; }
    const std::vector<IVec>& indices() const { return indices_; }
    // -1 when alpha is outside.
    long index_of(const IVec& alpha) const;
    bool contains(const IVec& alpha) const;

private:
    int d_ = 0;
    int radius_ = 0;
    std::vector<IVec> indices_;
};

// Uniform grid on [-1/2, 1/2)^d, n points per dimension, lexicographic.
struct GridSpec {
    int d = 1;
    int n = 1;

    long size() const;
    // Multi-index of flat point k.
    IVec multi_index(long k) const;
    long flat_index(const IVec& m) const;  // m taken mod n
    Vec point(long k) const;
    std::vector<Vec> points() const;
};

int sup_norm(const IVec& v);
double sup_norm(const Vec& v);

}  // namespace floquet
