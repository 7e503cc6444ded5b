// RK4 propagation and observable recording in the eigenbasis.
#include "sbd/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace sbd::propagator {

namespace {

bool is_integer_multiple(double value, double unit) {
    const double ratio = value / unit;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

void PropagationConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("propagation: dt must be positive");
    if (!(record_every > 0.0))
        throw std::invalid_argument("propagation: record_every must be positive");
    if (t_final < 0.0) throw std::invalid_argument("propagation: t_final must be non-negative");
    if (!is_integer_multiple(record_every, dt))
        throw std::invalid_argument("propagation: record_every must be an integer multiple of dt");
    if (t_final > 0.0 && !is_integer_multiple(t_final, record_every))
        throw std::invalid_argument(
            "propagation: t_final must be an integer multiple of record_every");
}

void lme_rhs(const Eigen::VectorXd& energies, const dissipator::Dissipator* diss,
             const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
    const Eigen::Index n = energies.size();
    if (rho.rows() != n || rho.cols() != n)
        throw std::invalid_argument("lme_rhs: dimension mismatch");
    out.resize(n, n);
    // -i (eps_n - eps_m) rho_nm, the commutator with a diagonal Hamiltonian.
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k)
            out(k, m) = cplx(0.0, energies(m) - energies(k)) * rho(k, m);
    if (diss) diss->accumulate(rho, out);
}

ObservableSet observables(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies,
                          const Eigen::MatrixXcd& x_op) {
    const Eigen::Index n = energies.size();
    if (rho.rows() != n || x_op.rows() != n)
        throw std::invalid_argument("observables: dimension mismatch");
    cplx e(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) e += energies(k) * rho(k, k);
    const cplx x = (rho * x_op).trace();
    const double purity = rho.squaredNorm();  // Tr[rho^2] for Hermitian rho
    if (std::abs(e.imag()) > 1e-10 || std::abs(x.imag()) > 1e-10)
        throw std::runtime_error("observables: imaginary residue above 1e-10 (Hermiticity drift)");
    return {e.real(), x.real(), purity};
}

ObservableSet observables(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                          const Eigen::MatrixXcd& x_op) {
    const cplx e = (rho * h).trace();
    const cplx x = (rho * x_op).trace();
    const cplx p = (rho * rho).trace();
    if (std::abs(e.imag()) > 1e-10 || std::abs(x.imag()) > 1e-10 || std::abs(p.imag()) > 1e-10)
        throw std::runtime_error("observables: imaginary residue above 1e-10 (Hermiticity drift)");
    return {e.real(), x.real(), p.real()};
}

Trajectory evolve(const Eigen::MatrixXcd& rho0, const Eigen::VectorXd& energies,
                  const dissipator::Dissipator* diss, const PropagationConfig& cfg,
                  const Eigen::MatrixXcd& x_op) {
    cfg.validate();
    const Eigen::Index n = energies.size();
    if (rho0.rows() != n || rho0.cols() != n)
        throw std::invalid_argument("evolve: rho0 dimension mismatch");

    const long n_steps = std::lround(cfg.t_final / cfg.dt);
    const long stride = std::lround(cfg.record_every / cfg.dt);
    const double purity_floor = (1.0 - 1e-6) / static_cast<double>(n);

    Trajectory traj;
    traj.times.reserve(n_steps / std::max(stride, 1L) + 1);

    const RotatingFrameRhs rhs(energies, diss);
    auto record = [&](double t, const Eigen::MatrixXcd& rho) {
        const ObservableSet obs = observables(rho, energies, x_op);
        if (obs.purity < purity_floor || obs.purity > 1.0 + 1e-6)
            throw std::runtime_error("evolve: purity " + std::to_string(obs.purity) +
                                     " outside [1/N, 1] at t = " + std::to_string(t));
        traj.times.push_back(t);
        traj.energy.push_back(obs.energy);
        traj.position.push_back(obs.position);
        traj.purity.push_back(obs.purity);
        traj.max_trace_dev = std::max(traj.max_trace_dev, trace_deviation(rho));
        if (cfg.record_rho) traj.rho_series.push_back(rho);
    };

    // The state is propagated in the interaction picture and undressed to
    // the plain eigenbasis representation whenever it is observed.
    Eigen::MatrixXcd rho_rot = rho0;
    record(0.0, rho_rot);
    for (long step = 1; step <= n_steps; ++step) {
        double herm_res = 0.0;
        try {
            rho_rot = rk4_step(rho_rot, rhs, cfg.dt, step, &herm_res, (step - 1) * cfg.dt);
        } catch (const std::runtime_error& err) {
            throw std::runtime_error(std::string(err.what()) + " (t = " +
                                     std::to_string(step * cfg.dt) + ")");
        }
        traj.max_herm_residual = std::max(traj.max_herm_residual, herm_res);
        if (step % stride == 0) record(step * cfg.dt, rhs.undress(step * cfg.dt, rho_rot));
    }
    traj.final_rho = rhs.undress(n_steps * cfg.dt, rho_rot);
    return traj;
}

}  // namespace sbd::propagator
