// model.hpp — discretized Morse-oscillator/qudit model: grid, potential,
// kinetic energy, spin matrices, total Hamiltonian and initial states
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sbd/types.hpp"

namespace sbd::model {

// Uniform position grid x_n = x0 + n*dx, n = 0..nx (nx+1 points), a.u.
struct Grid {
    double x0 = 0.0;
    double dx = 1.0;
    int n_points = 0;
    std::vector<double> points;
};

// Morse potential parameters (a.u.): U(x) = min(u_max, v_inf*(1 - e^{-a x})^2).
// The u_max cap clamps the repulsive wall.
struct MorseParams {
    double v_inf = 4.0;
    double a = 0.2;
    double u_max = 6.0;
    double mass = 1.0;
};

// Spin sector for half-integer s: identity, diagonal sigma_z with entries
// increasing from -1 to +1 in steps of 1/s, and sigma_x with unit sub- and
// super-diagonals. s = 0 degenerates to the 1x1 matrices [1], [0], [0].
struct SpinSector {
    double s = 0.0;
    int dim = 1;
    Eigen::MatrixXd sigma0;
    Eigen::MatrixXd sigmaz;
    Eigen::MatrixXd sigmax;
};

// Assembled spin-oscillator system of dimension N = (2s+1)(nx+1).
// Basis ordering is spin (x) oscillator: index = spin_idx * n_points + grid_idx.
// All blocks are real, so the Hamiltonian is real symmetric.
struct SpinOscillatorModel {
    Grid grid;
    MorseParams morse;
    SpinSector spin;
    double gap = 0.0;       // spin gap Gamma
    double coupling = 0.0;  // spin-oscillator coupling alpha
    Eigen::MatrixXd hamiltonian;  // sigma0 (x) (K + U) + (Gamma/2) sigmaz (x) 1 + alpha sigmax (x) X0
    Eigen::MatrixXd x_operator;   // sigma0 (x) X0, diagonal in the product basis
    int dim = 0;
};

Grid build_grid(double x0, double dx, int nx);

double morse_potential(double x, const MorseParams& p);

// Kinetic energy -(hbar^2/2m) d2/dx2 via the sixth-order (seven-point)
// central stencil with hard-wall boundaries (psi vanishes outside the grid).
// Requires at least 7 grid points.
Eigen::MatrixXd kinetic_matrix(const Grid& grid, double mass);

SpinSector spin_matrices(double s);

SpinOscillatorModel build_model(const Grid& grid, const MorseParams& morse, double s,
                                double gap, double alpha);

// Normalized eigenbasis weights C_k ∝ eps_k * exp(-eps_k^2 / (2 xi^2)).
// Throws if every weight vanishes.
Eigen::VectorXd initial_state_weights(const Eigen::VectorXd& energies, double xi);

// Pure initial state rho0 = |psi0><psi0| / <psi0|psi0> in the basis the
// eigenvectors are expressed in, with |psi0> = sum_k C_k |k>.
Eigen::MatrixXcd initial_state(const Eigen::VectorXd& energies, const Eigen::MatrixXcd& kets,
                               double xi);

}  // namespace sbd::model
