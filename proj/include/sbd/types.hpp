// types.hpp — shared aliases and density-matrix hygiene helpers
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace sbd {

using cplx = std::complex<double>;

// Density matrices and operators are plain Eigen matrices; the invariants
// (Hermiticity, unit trace) are maintained by the helpers below rather than
// by a wrapper type.
using DensityMatrix = Eigen::MatrixXcd;

// All quantities are in atomic units (hbar = 1).
inline constexpr double hbar = 1.0;

// rho <- (rho + rho†)/2, removing Hermiticity drift after arithmetic.
inline void hermitize(Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd adj = rho.adjoint();
    rho += adj;
    rho *= 0.5;
}

// Largest entrywise deviation from Hermiticity.
inline double herm_residual(const Eigen::MatrixXcd& rho) {
    return (rho - Eigen::MatrixXcd(rho.adjoint())).cwiseAbs().maxCoeff();
}

inline double trace_deviation(const Eigen::MatrixXcd& rho) {
    return std::abs(rho.trace() - cplx(1.0, 0.0));
}

}  // namespace sbd
