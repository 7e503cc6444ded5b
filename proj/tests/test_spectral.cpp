#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "sbd/model.hpp"
#include "sbd/spectral.hpp"

using namespace sbd;
using doctest::Approx;

namespace {

spectral::EigenSystem table_eigensystem(double spin, Eigen::MatrixXcd* x_out = nullptr) {
    const auto grid = model::build_grid(-10.0, 1.0, 30);
    const auto m = model::build_model(grid, model::MorseParams{}, spin, 0.1, 0.1225);
    if (x_out) *x_out = m.x_operator.cast<cplx>();
    return spectral::eigendecompose(m.hamiltonian);
}

Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = cplx(gauss(rng), gauss(rng));
    return 0.5 * (h + h.adjoint().eval());
}

}  // namespace

TEST_CASE("eigendecompose basics") {
    SUBCASE("already diagonal") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
        h(0, 0) = -1.0;
        h(1, 1) = 1.0;
        const auto eig = spectral::eigendecompose(h);
        CHECK(eig.energies(0) == Approx(-1.0));
        CHECK(eig.energies(1) == Approx(1.0));
        const Eigen::MatrixXcd hc = h.cast<cplx>();
        CHECK((hc * eig.kets - eig.kets * eig.energies.cast<cplx>().asDiagonal())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    SUBCASE("random Hermitian: reconstruction, orthonormality, order") {
        const auto h = random_hermitian(5, 11);
        const auto eig = spectral::eigendecompose(h);
        const Eigen::MatrixXcd d = eig.kets.adjoint() * h * eig.kets;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (i != j) CHECK(std::abs(d(i, j)) < 1e-10);
        CHECK((eig.kets.adjoint() * eig.kets - Eigen::MatrixXcd::Identity(5, 5))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        for (int i = 0; i + 1 < 5; ++i) CHECK(eig.energies(i) <= eig.energies(i + 1));
    }
    SUBCASE("Morse ground state near the analytic value") {
        const auto eig = table_eigensystem(0.0);
        const double w0 = 0.2 * std::sqrt(2.0 * 4.0 / 1.0);  // a sqrt(2 V_inf / m)
        const double analytic = 0.5 * w0 - std::pow(0.5 * w0, 2) / (4.0 * 4.0);
        CHECK(std::abs(eig.energies(0) - analytic) / analytic < 0.10);
        CHECK(eig.energies.size() == 31);
    }
    SUBCASE("non-Hermitian rejected") {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(4, 4);
        h(1, 2) += cplx(0.5, 0.5);
        CHECK_THROWS_AS(spectral::eigendecompose(h), std::invalid_argument);
    }
}

TEST_CASE("Bohr enumeration") {
    SUBCASE("two-level system with dense X") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
        h(1, 1) = 0.7;
        Eigen::MatrixXcd x(2, 2);
        x << 0.3, 1.0, 1.0, -0.2;
        const auto eig = spectral::eigendecompose(h);
        const auto d = spectral::enumerate_bohr(eig, x);
        REQUIRE(d.n_bohr() == 3);
        CHECK(d.bins[0].omega == Approx(-0.7));
        CHECK(d.bins[1].omega == Approx(0.0));
        CHECK(d.bins[2].omega == Approx(0.7));
        CHECK(d.bins[1].pairs.size() == 2);  // both diagonal elements
        // the +0.7 group holds the single pair (0,1)
        REQUIRE(d.bins[2].pairs.size() == 1);
        CHECK(d.bins[2].pairs[0] == std::make_pair(0, 1));
    }
    SUBCASE("partition property on the spinless benchmark model") {
        Eigen::MatrixXcd x;
        const auto eig = table_eigensystem(0.0, &x);
        const auto d = spectral::enumerate_bohr(eig, x);
        const Eigen::MatrixXcd xe = eig.kets.adjoint() * x * eig.kets;
        std::size_t above_tol = 0;
        for (int i = 0; i < xe.rows(); ++i)
            for (int j = 0; j < xe.cols(); ++j)
                if (std::abs(xe(i, j)) > d.element_drop_tol) ++above_tol;
        std::set<std::pair<int, int>> seen;
        std::size_t total = 0;
        for (const auto& bin : d.bins) {
            total += bin.pairs.size();
            for (const auto& p : bin.pairs) CHECK(seen.insert(p).second);
        }
        CHECK(total == above_tol);
        CHECK_NOTHROW(spectral::lindblad_operators(d));
    }
    SUBCASE("completeness and adjoint pairing") {
        Eigen::MatrixXcd x;
        const auto eig = table_eigensystem(0.0, &x);
        const auto d = spectral::enumerate_bohr(eig, x);
        const Eigen::MatrixXcd xe = eig.kets.adjoint() * x * eig.kets;
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d.dim, d.dim);
        for (std::size_t i = 0; i < d.n_bohr(); ++i) sum += d.lindblad(i);
        CHECK((sum - xe).cwiseAbs().maxCoeff() <= 1e-10);

        const auto freqs = d.frequencies();
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            // locate the mirrored bin
            std::size_t j = freqs.size();
            for (std::size_t k = 0; k < freqs.size(); ++k)
                if (std::abs(freqs[k] + freqs[i]) <= 1e-9) j = k;
            REQUIRE(j < freqs.size());
            CHECK((d.lindblad(j) - Eigen::MatrixXcd(d.lindblad(i).adjoint()))
                      .cwiseAbs()
                      .maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("bin count is stable under tolerance halving") {
        Eigen::MatrixXcd x;
        const auto eig = table_eigensystem(0.0, &x);
        spectral::BohrOptions opts;
        const auto d1 = spectral::enumerate_bohr(eig, x, opts);
        opts.bin_tol_rel *= 0.5;
        const auto d2 = spectral::enumerate_bohr(eig, x, opts);
        const double change = std::abs(static_cast<double>(d1.n_bohr()) -
                                       static_cast<double>(d2.n_bohr())) /
                              static_cast<double>(d1.n_bohr());
        CHECK(change < 0.02);
    }
    SUBCASE("overlapping groups rejected") {
        spectral::BohrDecomposition d;
        d.dim = 2;
        spectral::BohrBin b;
        b.pairs = {{0, 1}};
        b.values = {cplx(1.0)};
        d.bins = {b, b};
        CHECK_THROWS_AS(spectral::lindblad_operators(d), std::invalid_argument);
    }
}

TEST_CASE("coupling function") {
    const spectral::CouplingParams p{0.02, std::sqrt(2.0), 1.0};
    SUBCASE("gamma(0) = gamma_star") { CHECK(spectral::coupling_gamma(0.0, p) == Approx(0.02)); }
    SUBCASE("direct evaluation at omega = sqrt(2)") {
        const double expected = 0.02 * std::exp(-0.5) * std::exp(std::sqrt(2.0) / 2.0);
        CHECK(spectral::coupling_gamma(std::sqrt(2.0), p) == Approx(expected).epsilon(1e-14));
        CHECK(expected == Approx(0.0246).epsilon(1e-3));
    }
    SUBCASE("detailed balance at both benchmark temperatures") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(-5.0, 5.0);
        for (double kbt : {0.25, 1.0}) {
            const spectral::CouplingParams cp{0.02, std::sqrt(2.0), kbt};
            for (int i = 0; i < 100; ++i) {
                const double w = uni(rng);
                const double lhs = spectral::coupling_gamma(w, cp);
                const double rhs = std::exp(w / kbt) * spectral::coupling_gamma(-w, cp);
                CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
            }
        }
    }
}

TEST_CASE("thermal state") {
    SUBCASE("two-level Gibbs populations") {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
        h(1, 1) = 1.0;
        const auto rho = spectral::thermal_state(h, 1.0);
        const double z = 1.0 + std::exp(-1.0);
        CHECK(rho(0, 0).real() == Approx(1.0 / z).epsilon(1e-12));
        CHECK(rho(1, 1).real() == Approx(std::exp(-1.0) / z).epsilon(1e-12));
    }
    SUBCASE("infinite-temperature limit") {
        const auto h = random_hermitian(6, 5);
        const auto rho = spectral::thermal_state(h, 1e12);
        CHECK((rho - Eigen::MatrixXcd::Identity(6, 6) / 6.0).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("unit trace and positivity") {
        const auto h = random_hermitian(6, 8);
        const auto rho = spectral::thermal_state(h, 0.7);
        CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("coupled channel count lands on the benchmark values") {
    // Reported operator counts for the two benchmark scenarios; bands are
    // +-5% around 753 and 3287.
    const auto grid = model::build_grid(-10.0, 1.0, 30);
    {
        const auto m = model::build_model(grid, model::MorseParams{}, 0.0, 0.1, 0.1225);
        const auto eig = spectral::eigendecompose(m.hamiltonian);
        const auto d = spectral::davies_decomposition(eig, m.x_operator.cast<cplx>(),
                                                      {0.02, std::sqrt(2.0), 0.25});
        const auto count = spectral::coupled_count(d);
        CHECK(count >= 716);
        CHECK(count <= 790);
    }
    {
        const auto m = model::build_model(grid, model::MorseParams{}, 0.5, 0.1, 0.1225);
        const auto eig = spectral::eigendecompose(m.hamiltonian);
        const auto d = spectral::davies_decomposition(eig, m.x_operator.cast<cplx>(),
                                                      {0.02, std::sqrt(2.0), 1.0});
        const auto count = spectral::coupled_count(d);
        CHECK(count >= 3123);
        CHECK(count <= 3451);
    }
}
