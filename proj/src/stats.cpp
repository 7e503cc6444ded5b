// Jackknife combinations, ensemble error decomposition and power-law fits.
#include "sbd/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sbd::stats {

namespace {

void check_grids(const std::vector<double>& a, const std::vector<double>& b, const char* where) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(where) + ": time grids have different lengths");
}

void check_times(const propagator::Trajectory& a, const propagator::Trajectory& b,
                 const char* where) {
    if (a.times.size() != b.times.size())
        throw std::invalid_argument(std::string(where) + ": time grids have different lengths");
    for (std::size_t i = 0; i < a.times.size(); ++i)
        if (std::abs(a.times[i] - b.times[i]) > 1e-9 * std::max(1.0, std::abs(a.times[i])))
            throw std::invalid_argument(std::string(where) + ": time grids differ at index " +
                                        std::to_string(i));
    if (a.rho_series.size() != a.times.size() || b.rho_series.size() != b.times.size())
        throw std::invalid_argument(std::string(where) +
                                    ": trajectories must carry rho series (record_rho)");
}

// Rebuild a trajectory's observables from a combined rho series.
propagator::Trajectory from_rho_series(std::vector<Eigen::MatrixXcd> rhos,
                                       const std::vector<double>& times,
                                       const Eigen::VectorXd& energies,
                                       const Eigen::MatrixXcd& x_op) {
    propagator::Trajectory out;
    out.times = times;
    out.energy.reserve(times.size());
    out.position.reserve(times.size());
    out.purity.reserve(times.size());
    for (const auto& rho : rhos) {
        const auto obs = propagator::observables(rho, energies, x_op);
        out.energy.push_back(obs.energy);
        out.position.push_back(obs.position);
        out.purity.push_back(obs.purity);
        out.max_trace_dev = std::max(out.max_trace_dev, trace_deviation(rho));
    }
    if (!rhos.empty()) out.final_rho = rhos.back();
    out.rho_series = std::move(rhos);
    return out;
}

}  // namespace

std::vector<double> jackknife1(const std::vector<double>& full, const std::vector<double>& half) {
    check_grids(full, half, "jackknife1");
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) out[i] = 2.0 * full[i] - half[i];
    return out;
}

std::vector<double> jackknife2(const std::vector<double>& full, const std::vector<double>& half_a,
                               const std::vector<double>& half_b) {
    check_grids(full, half_a, "jackknife2");
    check_grids(full, half_b, "jackknife2");
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i)
        out[i] = 2.0 * full[i] - 0.5 * (half_a[i] + half_b[i]);
    return out;
}

propagator::Trajectory jackknife1(const propagator::Trajectory& full,
                                  const propagator::Trajectory& half,
                                  const Eigen::VectorXd& energies, const Eigen::MatrixXcd& x_op) {
    check_times(full, half, "jackknife1");
    std::vector<Eigen::MatrixXcd> rhos;
    rhos.reserve(full.rho_series.size());
    for (std::size_t i = 0; i < full.rho_series.size(); ++i)
        rhos.push_back(2.0 * full.rho_series[i] - half.rho_series[i]);
    return from_rho_series(std::move(rhos), full.times, energies, x_op);
}

propagator::Trajectory jackknife2(const propagator::Trajectory& full,
                                  const propagator::Trajectory& half_a,
                                  const propagator::Trajectory& half_b,
                                  const Eigen::VectorXd& energies, const Eigen::MatrixXcd& x_op) {
    check_times(full, half_a, "jackknife2");
    check_times(full, half_b, "jackknife2");
    std::vector<Eigen::MatrixXcd> rhos;
    rhos.reserve(full.rho_series.size());
    for (std::size_t i = 0; i < full.rho_series.size(); ++i)
        rhos.push_back(2.0 * full.rho_series[i] -
                       0.5 * (half_a.rho_series[i] + half_b.rho_series[i]));
    return from_rho_series(std::move(rhos), full.times, energies, x_op);
}

EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& realizations,
                             const std::vector<double>& reference,
                             const std::vector<double>& times, const std::string& observable) {
    const std::size_t r = realizations.size();
    if (r < 2) throw std::invalid_argument("ensemble_stats: need at least 2 realizations");
    check_grids(reference, times, "ensemble_stats");
    for (const auto& seq : realizations) check_grids(seq, reference, "ensemble_stats");

    EnsembleStats s;
    s.times = times;
    s.n_realizations = static_cast<int>(r);
    s.observable = observable;
    const std::size_t nt = times.size();
    s.rmse.resize(nt);
    s.bias.resize(nt);
    s.std_dev.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        double mean = 0.0, msd = 0.0;
        for (const auto& seq : realizations) {
            mean += seq[t];
            const double d = seq[t] - reference[t];
            msd += d * d;
        }
        mean /= static_cast<double>(r);
        msd /= static_cast<double>(r);
        double var = 0.0;
        for (const auto& seq : realizations) {
            const double d = seq[t] - mean;
            var += d * d;
        }
        var /= static_cast<double>(r - 1);
        s.bias[t] = mean - reference[t];
        s.std_dev[t] = std::sqrt(var);
        s.rmse[t] = std::sqrt(msd);
    }
    return s;
}

std::pair<double, double> max_rmse(const EnsembleStats& stats) {
    if (stats.rmse.empty()) throw std::invalid_argument("max_rmse: empty stats");
    std::size_t best = 0;
    for (std::size_t i = 1; i < stats.rmse.size(); ++i)
        if (stats.rmse[i] > stats.rmse[best]) best = i;
    return {stats.rmse[best], stats.times[best]};
}

ScalingFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& times) {
    if (sizes.size() != times.size())
        throw std::invalid_argument("fit_power_law: size/time length mismatch");
    if (sizes.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    const std::size_t n = sizes.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sizes[i] > 0.0) || !(times[i] > 0.0))
            throw std::invalid_argument("fit_power_law: sizes and times must be positive");
        const double x = std::log(sizes[i]);
        const double y = std::log(times[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double dn = static_cast<double>(n);
    const double cov = sxy - sx * sy / dn;
    const double varx = sxx - sx * sx / dn;
    const double vary = syy - sy * sy / dn;
    if (!(varx > 0.0)) throw std::invalid_argument("fit_power_law: sizes must not be constant");

    ScalingFit fit;
    fit.sizes = sizes;
    fit.times = times;
    fit.exponent = cov / varx;
    fit.prefactor = std::exp((sy - fit.exponent * sx) / dn);
    fit.r_squared = vary > 0.0 ? (cov * cov) / (varx * vary) : 1.0;
    return fit;
}

}  // namespace sbd::stats
