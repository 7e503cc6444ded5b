// spectral.hpp — Hermitian eigendecomposition, Bohr-frequency binning,
// per-frequency jump operators, coupling function and thermal state
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sbd/types.hpp"

namespace sbd::spectral {

// Eigensystem of a Hermitian matrix: ascending energies and unitary kets.
// For real symmetric input the kets have exactly zero imaginary part, which
// downstream code detects to pick faster real-arithmetic paths.
struct EigenSystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXcd kets;
};

// Coupling function parameters (a.u.):
// gamma(w) = gamma_star * exp(-(w/omega_c)^2 / 2) * exp(hbar w / (2 kbt)).
struct CouplingParams {
    double gamma_star = 0.02;
    double omega_c = 1.4142135623730951;  // sqrt(2)
    double kbt = 0.25;
};

// One Bohr-frequency bin: the ordered eigenpairs (n, m) with
// eps_m - eps_n ≈ hbar*omega, their coupling-operator matrix elements
// <n|X|m>, and the rate gamma(omega).
struct BohrBin {
    double omega = 0.0;
    double rate = 0.0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<cplx> values;
};

struct BohrOptions {
    // Bin width for clustering the gap multiset, relative to the spectral
    // span; consecutive sorted gaps closer than this merge into one bin.
    double bin_tol_rel = 1e-9;
    // Matrix elements below this fraction of max|<n|X|m>| are discarded, so
    // the bin count reflects only physically coupled frequencies.
    double element_drop_tol_rel = 1e-14;
};

// Davies decomposition of a coupling operator X against an eigensystem:
// the set B of distinct Bohr frequencies (ascending), one jump operator
// per frequency (stored sparsely as pairs+values), and the rates.
struct BohrDecomposition {
    int dim = 0;
    bool values_real = false;  // true when every stored element is purely real
    double bin_tol = 0.0;
    double element_drop_tol = 0.0;
    std::vector<BohrBin> bins;

    std::size_t n_bohr() const { return bins.size(); }
    std::vector<double> frequencies() const;
    // Materializes the (unscaled) jump operator of bin i in the eigenbasis.
    Eigen::MatrixXcd lindblad(std::size_t i) const;
    // Fingerprint of the (L, gamma) set, recorded in run manifests.
    std::uint64_t source_hash() const;
};

// Dense Hermitian eigendecomposition (ascending). Throws if the input is
// not Hermitian to within 1e-9 of its largest entry.
EigenSystem eigendecompose(const Eigen::MatrixXcd& h);
EigenSystem eigendecompose(const Eigen::MatrixXd& h);  // real symmetric fast path

// Frequency bins and pair groups of X in the eigenbasis of eig (rates unset).
BohrDecomposition enumerate_bohr(const EigenSystem& eig, const Eigen::MatrixXcd& x,
                                 const BohrOptions& opts = {});

// Materialized jump operators, one per group. Throws if the groups overlap.
std::vector<Eigen::MatrixXcd> lindblad_operators(const BohrDecomposition& decomp);

double coupling_gamma(double omega, const CouplingParams& p);

// enumerate_bohr + rates gamma(omega) per bin.
BohrDecomposition davies_decomposition(const EigenSystem& eig, const Eigen::MatrixXcd& x,
                                       const CouplingParams& coupling,
                                       const BohrOptions& opts = {});

// Number of channels with non-negligible dissipative weight: the smallest
// set of bins jointly carrying at least (1 - eps_machine) of the total
// weight sum_w gamma(w)*||L_w||_F^2. Channels below double-precision
// resolution of the dissipator are not counted. This is the operator count
// reported in manifests and benchmark tables; the partition itself keeps
// every bin.
std::size_t coupled_count(const BohrDecomposition& decomp);

// Gibbs state exp(-H/kbt)/Z, computed in the eigenbasis with the spectrum
// shifted by its minimum before exponentiation.
Eigen::MatrixXcd thermal_state(const Eigen::MatrixXcd& h, double kbt);
// Same, but directly from an eigensystem (avoids re-diagonalizing).
Eigen::MatrixXcd thermal_state(const EigenSystem& eig, double kbt);
// Gibbs populations in the eigenbasis.
Eigen::VectorXd thermal_populations(const Eigen::VectorXd& energies, double kbt);

}  // namespace sbd::spectral
