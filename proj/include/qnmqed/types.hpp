// types.hpp — shared aliases and error categories

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qnmqed {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Error categories map onto the CLI exit codes: config -> 2, physics -> 3,
// numerical -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qnmqed
