// stats.hpp — jackknife estimators, ensemble RMSE/bias/std decomposition,
// and power-law scaling fits
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbd/propagator.hpp"

namespace sbd::stats {

// Per-time RMSE/bias/std of an observable across R realizations against a
// deterministic reference:
//   bias(t) = mean_r[o_r(t)] - ref(t)
//   std(t)  = sample standard deviation across r
//   rmse(t) = sqrt(mean_r[(o_r(t) - ref(t))^2])
// so that rmse^2 = bias^2 + std^2 (R-1)/R.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> rmse;
    std::vector<double> bias;
    std::vector<double> std_dev;
    int n_realizations = 0;
    std::string observable;
};

// Least-squares power law t = a N^n in log-log space.
struct ScalingFit {
    std::vector<double> sizes;
    std::vector<double> times;
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
};

// Scalar fast path of the jackknife estimators, exact for observables
// linear in rho (energy, position). Purity is quadratic in rho and must go
// through the density-matrix forms below.
std::vector<double> jackknife1(const std::vector<double>& full, const std::vector<double>& half);
std::vector<double> jackknife2(const std::vector<double>& full, const std::vector<double>& half_a,
                               const std::vector<double>& half_b);

// Density-matrix-level jackknife: combines the recorded rho series
// (2*full - half, or 2*full - (half_a + half_b)/2) and recomputes all
// observables, including purity, from the combined matrices. Inputs must
// share time grids and carry rho series.
propagator::Trajectory jackknife1(const propagator::Trajectory& full,
                                  const propagator::Trajectory& half,
                                  const Eigen::VectorXd& energies, const Eigen::MatrixXcd& x_op);
propagator::Trajectory jackknife2(const propagator::Trajectory& full,
                                  const propagator::Trajectory& half_a,
                                  const propagator::Trajectory& half_b,
                                  const Eigen::VectorXd& energies, const Eigen::MatrixXcd& x_op);

EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& realizations,
                             const std::vector<double>& reference,
                             const std::vector<double>& times, const std::string& observable);

// Maximum RMSE and its time (earliest index on ties).
std::pair<double, double> max_rmse(const EnsembleStats& stats);

ScalingFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& times);

}  // namespace sbd::stats
