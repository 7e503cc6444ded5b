#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbd/model.hpp"
#include "sbd/spectral.hpp"

using namespace sbd;
using doctest::Approx;

TEST_CASE("grid is an arithmetic progression") {
    const auto g = model::build_grid(-10.0, 1.0, 30);
    CHECK(g.n_points == 31);
    CHECK(g.points.front() == -10.0);
    CHECK(g.points.back() == 20.0);
    CHECK(g.points[5] == -5.0);

    const auto single = model::build_grid(0.0, 1.0, 0);
    CHECK(single.n_points == 1);
    CHECK(single.points[0] == 0.0);

    CHECK_THROWS_AS(model::build_grid(0.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(model::build_grid(0.0, -0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(model::build_grid(0.0, 1.0, -1), std::invalid_argument);
}

TEST_CASE("Morse potential with ceiling clamp") {
    const model::MorseParams p;  // v_inf 4, a 0.2, u_max 6
    CHECK(model::morse_potential(0.0, p) == 0.0);
    CHECK(model::morse_potential(1e6, p) == Approx(4.0));
    // raw value at the repulsive wall exceeds the cap and is clamped
    const double raw = 4.0 * std::pow(1.0 - std::exp(0.2 * 10.0), 2);
    CHECK(raw > 6.0);
    CHECK(raw == Approx(163.338).epsilon(1e-3));
    CHECK(model::morse_potential(-10.0, p) == 6.0);
}

TEST_CASE("kinetic stencil properties") {
    const auto g = model::build_grid(-10.0, 1.0, 30);
    const auto k = model::kinetic_matrix(g, 1.0);

    SUBCASE("rows sum to zero (stencil annihilates constants)") {
        for (int i = 3; i < g.n_points - 3; ++i) CHECK(std::abs(k.row(i).sum()) < 1e-12);
    }
    SUBCASE("exact second derivatives for polynomials up to degree 3") {
        Eigen::VectorXd x2(g.n_points), x3(g.n_points);
        for (int i = 0; i < g.n_points; ++i) {
            x2(i) = g.points[i] * g.points[i];
            x3(i) = std::pow(g.points[i], 3);
        }
        const Eigen::VectorXd k2 = k * x2;  // (x^2)'' = 2  ->  K x^2 = -1
        const Eigen::VectorXd k3 = k * x3;  // (x^3)'' = 6x ->  K x^3 = -3x
        for (int i = 3; i < g.n_points - 3; ++i) {
            CHECK(k2(i) == Approx(-1.0).epsilon(1e-10));
            CHECK(k3(i) == Approx(-3.0 * g.points[i]).epsilon(1e-10));
        }
    }
    SUBCASE("symmetric banded, bandwidth 3") {
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < g.n_points; ++i)
            for (int j = 0; j < g.n_points; ++j)
                if (std::abs(i - j) > 3) CHECK(k(i, j) == 0.0);
    }
    SUBCASE("rejects grids smaller than the stencil") {
        CHECK_THROWS_AS(model::kinetic_matrix(model::build_grid(0, 1, 5), 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("spin matrices") {
    SUBCASE("s = 1/2") {
        const auto s = model::spin_matrices(0.5);
        CHECK(s.dim == 2);
        CHECK(s.sigmaz(0, 0) == -1.0);
        CHECK(s.sigmaz(1, 1) == 1.0);
        CHECK(s.sigmax(0, 1) == 1.0);
        CHECK(s.sigmax(1, 0) == 1.0);
        CHECK(s.sigmax(0, 0) == 0.0);
        CHECK(s.sigma0 == Eigen::MatrixXd::Identity(2, 2));
    }
    SUBCASE("s = 0 is the spinless 1x1 sector") {
        const auto s = model::spin_matrices(0.0);
        CHECK(s.dim == 1);
        CHECK(s.sigma0(0, 0) == 1.0);
        CHECK(s.sigmaz(0, 0) == 0.0);
        CHECK(s.sigmax(0, 0) == 0.0);
    }
    SUBCASE("s = 3/2 diagonal") {
        const auto s = model::spin_matrices(1.5);
        CHECK(s.dim == 4);
        CHECK(s.sigmaz(0, 0) == Approx(-1.0));
        CHECK(s.sigmaz(1, 1) == Approx(-1.0 / 3.0));
        CHECK(s.sigmaz(2, 2) == Approx(1.0 / 3.0));
        CHECK(s.sigmaz(3, 3) == Approx(1.0));
        // strictly increasing
        for (int k = 0; k + 1 < s.dim; ++k) CHECK(s.sigmaz(k, k) < s.sigmaz(k + 1, k + 1));
    }
    SUBCASE("invalid spins rejected") {
        CHECK_THROWS_AS(model::spin_matrices(-0.5), std::invalid_argument);
        CHECK_THROWS_AS(model::spin_matrices(0.3), std::invalid_argument);
    }
}

TEST_CASE("assembled model") {
    const auto grid = model::build_grid(-10.0, 1.0, 30);
    const model::MorseParams mp;

    SUBCASE("benchmark dimensions") {
        CHECK(model::build_model(grid, mp, 0.0, 0.1, 0.1225).dim == 31);
        CHECK(model::build_model(grid, mp, 0.5, 0.1, 0.1225).dim == 62);
    }
    SUBCASE("Hermiticity") {
        const auto m = model::build_model(grid, mp, 1.0, 0.1, 0.1225);
        CHECK((m.hamiltonian - m.hamiltonian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("spinless Hamiltonian equals the bare oscillator") {
        const auto m = model::build_model(grid, mp, 0.0, 0.1, 0.1225);
        auto h0 = model::kinetic_matrix(grid, mp.mass);
        for (int i = 0; i < grid.n_points; ++i)
            h0(i, i) += model::morse_potential(grid.points[i], mp);
        CHECK((m.hamiltonian - h0).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("decoupled spin gives identical blocks") {
        const auto m = model::build_model(grid, mp, 1.0, 0.0, 0.0);
        const auto m0 = model::build_model(grid, mp, 0.0, 0.0, 0.0);
        const int np = grid.n_points;
        for (int blk = 0; blk < 3; ++blk) {
            CHECK((m.hamiltonian.block(blk * np, blk * np, np, np) - m0.hamiltonian)
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
        }
        // off-diagonal blocks vanish
        CHECK(m.hamiltonian.block(0, np, np, np).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("position operator is diagonal in the product basis") {
        const auto m = model::build_model(grid, mp, 0.5, 0.1, 0.1225);
        for (int i = 0; i < m.dim; ++i) {
            CHECK(m.x_operator(i, i) == grid.points[i % grid.n_points]);
            for (int j = 0; j < m.dim; ++j)
                if (i != j) CHECK(m.x_operator(i, j) == 0.0);
        }
    }
    SUBCASE("dimension guard") {
        CHECK_THROWS_AS(model::build_model(model::build_grid(0, 1, 9999), mp, 1.5, 0.1, 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("initial state") {
    SUBCASE("normalized pure state") {
        const auto grid = model::build_grid(-10.0, 1.0, 30);
        const auto m = model::build_model(grid, model::MorseParams{}, 0.0, 0.1, 0.1225);
        const auto eig = spectral::eigendecompose(m.hamiltonian);
        const auto rho = model::initial_state(eig.energies, eig.kets, 3.4);
        CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
        CHECK(std::abs((rho * rho).trace() - cplx(1.0)) < 1e-12);
    }
    SUBCASE("two-level amplitude ratio") {
        Eigen::VectorXd e(2);
        e << 1.0, 2.0;
        const auto w = model::initial_state_weights(e, 1.0);
        // C2/C1 = (2 e^{-2}) / (1 e^{-1/2}) = 2 e^{-3/2}
        CHECK(w(1) / w(0) == Approx(2.0 * std::exp(-1.5)).epsilon(1e-12));
    }
    SUBCASE("cold weights concentrate on low energies") {
        const auto grid = model::build_grid(-10.0, 1.0, 30);
        const auto m = model::build_model(grid, model::MorseParams{}, 0.0, 0.1, 0.1225);
        const auto eig = spectral::eigendecompose(m.hamiltonian);
        const auto cold = model::initial_state_weights(eig.energies, 0.7);
        const auto hot = model::initial_state_weights(eig.energies, 3.4);
        const int half = static_cast<int>(eig.energies.size()) / 2;
        const double cold_low = cold.head(half).squaredNorm();
        const double hot_low = hot.head(half).squaredNorm();
        CHECK(cold_low > 0.99);
        CHECK(hot_low < cold_low);
    }
    SUBCASE("degenerate zero spectrum rejected") {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        CHECK_THROWS_AS(model::initial_state_weights(e, 1.0), std::runtime_error);
    }
}
