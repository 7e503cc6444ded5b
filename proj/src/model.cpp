// Model construction: grid, Morse potential, finite-difference kinetic
// energy, spin matrices and the assembled spin-oscillator Hamiltonian.
#include "sbd/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbd::model {

namespace {

// Seven-point second-derivative stencil coefficients (a0, a1, a2, a3).
// Row sums vanish: a0 + 2(a1 + a2 + a3) = 0.
constexpr double kStencil[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};

// Hard cap on the total dimension; dense N x N matrices beyond this are
// not something this code should silently attempt.
constexpr long kMaxDim = 4096;

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

Grid build_grid(double x0, double dx, int nx) {
    if (!(dx > 0.0)) throw std::invalid_argument("build_grid: dx must be positive");
    if (nx < 0) throw std::invalid_argument("build_grid: nx must be non-negative");
    Grid g;
    g.x0 = x0;
    g.dx = dx;
    g.n_points = nx + 1;
    g.points.resize(g.n_points);
    for (int n = 0; n <= nx; ++n) g.points[n] = x0 + n * dx;
    return g;
}

double morse_potential(double x, const MorseParams& p) {
    const double u = p.v_inf * std::pow(1.0 - std::exp(-p.a * x), 2);
    return std::min(p.u_max, u);
}

Eigen::MatrixXd kinetic_matrix(const Grid& grid, double mass) {
    const int n = grid.n_points;
    if (n < 7)
        throw std::invalid_argument("kinetic_matrix: need at least 7 grid points for the "
                                    "seven-point stencil");
    if (!(mass > 0.0)) throw std::invalid_argument("kinetic_matrix: mass must be positive");
    const double scale = -hbar * hbar / (2.0 * mass * grid.dx * grid.dx);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int m = -3; m <= 3; ++m) {
            const int j = i + m;
            if (j < 0 || j >= n) continue;  // hard wall: psi vanishes outside
            k(i, j) = scale * kStencil[std::abs(m)];
        }
    }
    return k;
}

SpinSector spin_matrices(double s) {
    const double two_s = 2.0 * s;
    if (s < 0.0 || std::abs(two_s - std::round(two_s)) > 1e-12)
        throw std::invalid_argument("spin_matrices: s must be a non-negative half-integer");
    SpinSector sec;
    sec.s = s;
    sec.dim = static_cast<int>(std::round(two_s)) + 1;
    sec.sigma0 = Eigen::MatrixXd::Identity(sec.dim, sec.dim);
    sec.sigmaz = Eigen::MatrixXd::Zero(sec.dim, sec.dim);
    sec.sigmax = Eigen::MatrixXd::Zero(sec.dim, sec.dim);
    if (sec.dim == 1) return sec;  // spinless: sigma_z = sigma_x = 0
    for (int k = 0; k < sec.dim; ++k) sec.sigmaz(k, k) = (k - s) / s;
    for (int k = 0; k + 1 < sec.dim; ++k) {
        sec.sigmax(k, k + 1) = 1.0;
        sec.sigmax(k + 1, k) = 1.0;
    }
    return sec;
}

SpinOscillatorModel build_model(const Grid& grid, const MorseParams& morse, double s,
                                double gap, double alpha) {
    if (!(morse.v_inf > 0.0 && morse.a > 0.0 && morse.u_max > 0.0 && morse.mass > 0.0))
        throw std::invalid_argument("build_model: Morse parameters must be positive");
    SpinOscillatorModel m;
    m.grid = grid;
    m.morse = morse;
    m.spin = spin_matrices(s);
    m.gap = gap;
    m.coupling = alpha;

    const long dim = static_cast<long>(m.spin.dim) * grid.n_points;
    if (dim > kMaxDim)
        throw std::invalid_argument("build_model: dimension " + std::to_string(dim) +
                                    " exceeds the supported maximum " + std::to_string(kMaxDim));
    m.dim = static_cast<int>(dim);

    const int np = grid.n_points;
    Eigen::MatrixXd h0 = kinetic_matrix(grid, morse.mass);
    Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(np, np);
    for (int n = 0; n < np; ++n) {
        h0(n, n) += morse_potential(grid.points[n], morse);
        x0(n, n) = grid.points[n];
    }

    m.hamiltonian = kron(m.spin.sigma0, h0);
    m.hamiltonian += (gap / 2.0) * kron(m.spin.sigmaz, Eigen::MatrixXd::Identity(np, np));
    m.hamiltonian += alpha * kron(m.spin.sigmax, x0);
    m.x_operator = kron(m.spin.sigma0, x0);
    return m;
}

Eigen::VectorXd initial_state_weights(const Eigen::VectorXd& energies, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("initial_state: xi must be positive");
    Eigen::VectorXd c(energies.size());
    for (Eigen::Index k = 0; k < energies.size(); ++k) {
        const double e = energies(k);
        c(k) = e * std::exp(-e * e / (2.0 * xi * xi));
    }
    const double norm = c.norm();
    if (!(norm > 0.0))
        throw std::runtime_error("initial_state: all weights vanish (degenerate zero spectrum)");
    return c / norm;
}

Eigen::MatrixXcd initial_state(const Eigen::VectorXd& energies, const Eigen::MatrixXcd& kets,
                               double xi) {
    if (kets.cols() != energies.size())
        throw std::invalid_argument("initial_state: eigensystem size mismatch");
    const Eigen::VectorXd c = initial_state_weights(energies, xi);
    const Eigen::VectorXcd psi = kets * c.cast<cplx>();
    return psi * psi.adjoint();  // already normalized through c
}

}  // namespace sbd::model
