// propagator.hpp — fixed-step RK4 integration of the (stochastic) Lindblad
// master equation in the Hamiltonian eigenbasis, with observable recording
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbd/dissipator.hpp"
#include "sbd/types.hpp"

namespace sbd::propagator {

// Fixed-step integration plan. record_every must be an integer multiple of
// dt and t_final an integer multiple of record_every (both to 1e-9 rel).
struct PropagationConfig {
    double dt = 0.25;
    double record_every = 1.0;
    double t_final = 1000.0;
    bool record_rho = false;  // keep density-matrix snapshots at record times
    void validate() const;
};

struct ObservableSet {
    double energy = 0.0;
    double position = 0.0;
    double purity = 0.0;
};

// Time series of recorded observables (and optionally density matrices).
// max_trace_dev / max_herm_residual are integration diagnostics: the largest
// |Tr rho - 1| at record times and the largest pre-symmetrization
// Hermiticity residual of any step.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> position;
    std::vector<double> purity;
    Eigen::MatrixXcd final_rho;
    std::vector<Eigen::MatrixXcd> rho_series;
    double max_trace_dev = 0.0;
    double max_herm_residual = 0.0;
};

// out = -i[diag(energies), rho] + D rho (hbar = 1; diss may be null for
// purely unitary flow). Hermitian and traceless for Hermitian rho.
void lme_rhs(const Eigen::VectorXd& energies, const dissipator::Dissipator* diss,
             const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out);

// One classical RK4 update; the result is re-symmetrized (rho + rho^dag)/2.
// Trace is monitored upstream, never renormalized. Throws on non-finite
// results, naming the step. If herm_residual_out is given it receives the
// pre-symmetrization Hermiticity residual of the step.
template <class RhsFn>
Eigen::MatrixXcd rk4_step(const Eigen::MatrixXcd& rho, RhsFn&& rhs, double dt, long step = -1,
                          double* herm_residual_out = nullptr, double t0 = 0.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    Eigen::MatrixXcd k1(rho.rows(), rho.cols()), k2(rho.rows(), rho.cols());
    Eigen::MatrixXcd k3(rho.rows(), rho.cols()), k4(rho.rows(), rho.cols());
    Eigen::MatrixXcd tmp(rho.rows(), rho.cols());
    rhs(t0, rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    rhs(t0 + 0.5 * dt, tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    rhs(t0 + 0.5 * dt, tmp, k3);
    tmp = rho + dt * k3;
    rhs(t0 + dt, tmp, k4);
    Eigen::MatrixXcd next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite())
        throw std::runtime_error("rk4_step: non-finite density matrix at step " +
                                 (step >= 0 ? std::to_string(step) : std::string("<unknown>")));
    if (herm_residual_out) *herm_residual_out = herm_residual(next);
    hermitize(next);
    return next;
}

// Interaction-picture formulation of the LME. The secular dissipator
// commutes with the free evolution, so the commutator term drops out
// exactly: d rho~/dt = U(t)^dag D(U rho~ U^dag) U(t) with U = e^{-iHt}
// diagonal in the eigenbasis. This removes the Hamiltonian stiffness from
// the integrator (the spectral span never enters the step-size budget);
// dressing and undressing are elementwise phase products. States handed to
// callers (records, snapshots, final_rho) are always in the plain
// (Schroedinger-picture) eigenbasis representation.
class RotatingFrameRhs {
  public:
    RotatingFrameRhs(const Eigen::VectorXd& energies, const dissipator::Dissipator* diss)
        : energies_(energies), diss_(diss) {}

    // out = U^dag D(U rho~ U^dag) U at absolute time t
    void operator()(double t, const Eigen::MatrixXcd& rho_rot, Eigen::MatrixXcd& out) const {
        const Eigen::Index n = energies_.size();
        out = Eigen::MatrixXcd::Zero(n, n);
        if (!diss_) return;
        const Eigen::VectorXcd u = phases(t);
        Eigen::MatrixXcd lab(n, n);
        for (Eigen::Index b = 0; b < n; ++b)
            for (Eigen::Index a = 0; a < n; ++a)
                lab(a, b) = rho_rot(a, b) * (std::conj(u(a)) * u(b));
        Eigen::MatrixXcd dlab = Eigen::MatrixXcd::Zero(n, n);
        diss_->accumulate(lab, dlab);
        for (Eigen::Index b = 0; b < n; ++b)
            for (Eigen::Index a = 0; a < n; ++a) out(a, b) = dlab(a, b) * (u(a) * std::conj(u(b)));
    }

    // rho = U rho~ U^dag: back to the plain eigenbasis representation
    Eigen::MatrixXcd undress(double t, const Eigen::MatrixXcd& rho_rot) const {
        const Eigen::Index n = energies_.size();
        const Eigen::VectorXcd u = phases(t);
        Eigen::MatrixXcd rho(n, n);
        for (Eigen::Index b = 0; b < n; ++b)
            for (Eigen::Index a = 0; a < n; ++a)
                rho(a, b) = rho_rot(a, b) * (std::conj(u(a)) * u(b));
        return rho;
    }

  private:
    Eigen::VectorXcd phases(double t) const {  // u_a = e^{i eps_a t}
        Eigen::VectorXcd u(energies_.size());
        for (Eigen::Index a = 0; a < energies_.size(); ++a)
            u(a) = std::polar(1.0, energies_(a) * t);
        return u;
    }

    const Eigen::VectorXd& energies_;
    const dissipator::Dissipator* diss_;
};

// (Tr[rho H], Tr[rho X], Tr[rho^2]) with H = diag(energies). Imaginary
// residues above 1e-10 indicate Hermiticity drift and throw.
ObservableSet observables(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies,
                          const Eigen::MatrixXcd& x_op);
// General-matrix form for tests and small systems.
ObservableSet observables(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                          const Eigen::MatrixXcd& x_op);

// Integrate from rho0 at t=0 to t_final, recording observables at every
// multiple of record_every (t=0 included). Everything lives in the
// eigenbasis: H = diag(energies), x_op rotated once by the caller.
Trajectory evolve(const Eigen::MatrixXcd& rho0, const Eigen::VectorXd& energies,
                  const dissipator::Dissipator* diss, const PropagationConfig& cfg,
                  const Eigen::MatrixXcd& x_op);

}  // namespace sbd::propagator
