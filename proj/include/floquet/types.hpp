#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace floquet {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using IVec = std::vector<int>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Every numerical kernel with an OpenMP path also keeps a plain serial
// path. The serial one is the reference the tests compare against.
enum class Exec { serial, parallel };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical precondition or gate did not hold (aliasing, tail too large,
// flux obstruction, ...).
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline cplx unit_phase(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace floquet
