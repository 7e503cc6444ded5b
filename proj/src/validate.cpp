// Analytic-identity self-tests behind the `validate` subcommand.
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>

#include "sbd/runner.hpp"

namespace sbd::cli {

namespace {

struct CheckTable {
    std::ostream& out;
    int failures = 0;
    void row(const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "PASS" : "FAIL") << "  " << std::left << std::setw(44) << name << detail
            << "\n";
        if (!ok) ++failures;
    }
};

std::string sci(const char* label, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%.2e", label, value);
    return buf;
}

ScenarioConfig table_config(double spin) {
    ScenarioConfig cfg;
    apply_preset(cfg, spin == 0.0 ? Scenario::cooling : Scenario::heating);
    cfg.spin = spin;
    return cfg;
}

}  // namespace

int run_validate(std::ostream& out) {
    CheckTable table{out};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    {  // seven-point stencil: zero row sum and exactness on x^2
        const auto grid = model::build_grid(-10.0, 1.0, 30);
        const auto k = model::kinetic_matrix(grid, 1.0);
        const double row_sum = k.row(15).sum();
        Eigen::VectorXd x2(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i) x2(i) = grid.points[i] * grid.points[i];
        const Eigen::VectorXd kx2 = k * x2;  // expect -(1/2m)*2 = -1 on interior points
        double max_err = 0.0;
        for (int i = 3; i < grid.n_points - 3; ++i)
            max_err = std::max(max_err, std::abs(kx2(i) + 1.0));
        table.row("kinetic stencil (zero sum, x^2 exact)",
                  std::abs(row_sum) < 1e-12 && max_err < 1e-10,
                  sci("row_sum=", row_sum) + sci("  max_err=", max_err));
    }
    {  // spin matrices at s=1/2
        const auto sec = model::spin_matrices(0.5);
        const bool ok = sec.dim == 2 && sec.sigmaz(0, 0) == -1.0 && sec.sigmaz(1, 1) == 1.0 &&
                        sec.sigmax(0, 1) == 1.0 && sec.sigmax(1, 0) == 1.0 &&
                        sec.sigmax(0, 0) == 0.0;
        table.row("spin matrices (s=1/2)", ok, "");
    }
    {  // detailed balance at both benchmark temperatures
        double worst = 0.0;
        for (double kbt : {0.25, 1.0}) {
            spectral::CouplingParams cp{0.02, std::sqrt(2.0), kbt};
            for (int i = 0; i < 100; ++i) {
                const double w = 5.0 * uni(rng);
                const double lhs = spectral::coupling_gamma(w, cp);
                const double rhs = std::exp(w / kbt) * spectral::coupling_gamma(-w, cp);
                worst = std::max(worst, std::abs(lhs - rhs) / lhs);
            }
        }
        table.row("detailed balance gamma(w)=e^{w/kT}gamma(-w)", worst <= 1e-12,
                  sci("worst rel err=", worst));
    }

    BuiltSystem sys = build_system(table_config(0.0));
    {  // Davies completeness and adjoint pairing on the spinless model
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(sys.model.dim, sys.model.dim);
        for (std::size_t i = 0; i < sys.decomp.n_bohr(); ++i) sum += sys.decomp.lindblad(i);
        const double completeness = (sum - sys.x_eig).cwiseAbs().maxCoeff();
        double pairing = 0.0;
        const auto freqs = sys.decomp.frequencies();
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            const auto match =
                std::lower_bound(freqs.begin(), freqs.end(), -freqs[i] - 1e-12);
            if (match == freqs.end()) continue;
            const std::size_t j = match - freqs.begin();
            if (std::abs(freqs[j] + freqs[i]) > 1e-9) continue;
            pairing = std::max(pairing, (sys.decomp.lindblad(j) -
                                         Eigen::MatrixXcd(sys.decomp.lindblad(i).adjoint()))
                                            .cwiseAbs()
                                            .maxCoeff());
        }
        table.row("Davies completeness sum L = X", completeness <= 1e-10,
                  sci("max err=", completeness));
        table.row("adjoint pairing L(-w) = L(w)^dag", pairing <= 1e-10,
                  sci("max err=", pairing));
    }
    {  // Gibbs state is stationary under the full dissipator
        dissipator::FullDissipator full(sys.decomp);
        const Eigen::VectorXd p = spectral::thermal_populations(sys.eig.energies, 0.25);
        Eigen::MatrixXcd rho_eq = Eigen::MatrixXcd::Zero(sys.model.dim, sys.model.dim);
        for (int i = 0; i < sys.model.dim; ++i) rho_eq(i, i) = p(i);
        const double residual = full.apply(rho_eq).cwiseAbs().maxCoeff();
        table.row("Gibbs stationarity |D rho_eq| ~ 0", residual <= 1e-8,
                  sci("max residual=", residual));
    }
    {  // bundled-dissipator collapse checks
        const auto ones = dissipator::BundledDissipator::build(
            sys.decomp, 1, dissipator::RandomVectorKind::all_ones, 7);
        Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(sys.model.dim, sys.model.dim);
        for (std::size_t i = 0; i < sys.decomp.n_bohr(); ++i)
            expected += std::sqrt(sys.decomp.bins[i].rate) * sys.decomp.lindblad(i);
        const double collapse = (ones.operators()[0] - expected).cwiseAbs().maxCoeff();

        const auto kron = dissipator::BundledDissipator::build(
            sys.decomp, static_cast<int>(sys.decomp.n_bohr()),
            dissipator::RandomVectorKind::kronecker_delta, 7);
        dissipator::FullDissipator full(sys.decomp);
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Random(sys.model.dim, sys.model.dim);
        rho = (rho + rho.adjoint()).eval();
        rho /= rho.trace();
        const double delta = (kron.apply(rho) - full.apply(rho)).cwiseAbs().maxCoeff();
        table.row("bundled collapse (all-ones M=1)", collapse <= 1e-12,
                  sci("max err=", collapse));
        table.row("bundled delta hook reproduces full", delta <= 1e-10,
                  sci("max err=", delta));
    }
    {  // RK4 order on a two-level Rabi flop
        const double omega = 1.0;
        Eigen::MatrixXcd h(2, 2);
        h << 0.0, 0.5 * omega, 0.5 * omega, 0.0;
        auto rhs = [&h](double, const Eigen::MatrixXcd& r, Eigen::MatrixXcd& o) {
            o = cplx(0.0, -1.0) * (h * r - r * h);
        };
        auto global_error = [&](double dt) {
            Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
            rho(0, 0) = 1.0;
            const long steps = std::lround(10.0 / dt);
            for (long i = 0; i < steps; ++i) rho = propagator::rk4_step(rho, rhs, dt, i);
            const double exact = std::cos(0.5 * omega * 10.0) * std::cos(0.5 * omega * 10.0);
            return std::abs(rho(0, 0).real() - exact);
        };
        const double ratio = global_error(0.1) / global_error(0.05);
        table.row("RK4 order (error ratio in [8,32])", ratio >= 8.0 && ratio <= 32.0,
                  sci("ratio=", ratio));
    }
    {  // jackknife fixed point and affine-weight identities
        const std::vector<double> seq{1.0, 2.0, 3.0};
        const auto j1 = stats::jackknife1(seq, seq);
        const auto j2 = stats::jackknife2(seq, seq, seq);
        bool ok = j1 == seq && j2 == seq;
        // pure 1/M bias law cancels exactly: full = v + b/M, half = v + 2b/M
        const double v = 5.0, b = 0.8, m = 8.0;
        const auto corrected = stats::jackknife1({v + b / m}, {v + 2.0 * b / m});
        ok = ok && std::abs(corrected[0] - v) < 1e-14;
        table.row("jackknife fixed point & bias cancellation", ok, "");
    }
    {  // MSE decomposition identity on a random ensemble
        std::vector<double> times{0.0, 1.0, 2.0};
        std::vector<double> ref{1.0, -2.0, 0.5};
        std::vector<std::vector<double>> reals(64);
        for (auto& seq : reals) {
            seq = ref;
            for (auto& x : seq) x += 0.3 * uni(rng) + 0.05;
        }
        const auto st = stats::ensemble_stats(reals, ref, times, "energy");
        double worst = 0.0;
        const double r = static_cast<double>(st.n_realizations);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double lhs = st.rmse[i] * st.rmse[i];
            const double rhs =
                st.bias[i] * st.bias[i] + st.std_dev[i] * st.std_dev[i] * (r - 1.0) / r;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        table.row("MSE = bias^2 + (R-1)/R std^2", worst <= 1e-10,
                  sci("worst=", worst));
    }
    {  // exact power-law recovery
        const std::vector<double> n{10, 20, 40, 80};
        std::vector<double> t;
        for (double x : n) t.push_back(2.0 * x * x * x);
        const auto fit = stats::fit_power_law(n, t);
        table.row("power-law fit recovers t = 2 N^3",
                  std::abs(fit.exponent - 3.0) < 1e-12 && std::abs(fit.prefactor - 2.0) < 1e-9,
                  sci("exponent=", fit.exponent));
    }

    out << (table.failures == 0 ? "all checks passed\n"
                                : std::to_string(table.failures) + " check(s) failed\n");
    return table.failures;
}

}  // namespace sbd::cli
