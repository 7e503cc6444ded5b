// Eigendecomposition, Bohr-frequency clustering and Davies jump operators.
#include "sbd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sbd::spectral {

namespace {

struct PairGap {
    double gap;
    int n, m;
    cplx value;
};

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t fnv1a_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return fnv1a(h, &bits, sizeof(bits));
}

}  // namespace

std::vector<double> BohrDecomposition::frequencies() const {
    std::vector<double> f;
    f.reserve(bins.size());
    for (const auto& b : bins) f.push_back(b.omega);
    return f;
}

Eigen::MatrixXcd BohrDecomposition::lindblad(std::size_t i) const {
    const auto& bin = bins.at(i);
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t k = 0; k < bin.pairs.size(); ++k)
        l(bin.pairs[k].first, bin.pairs[k].second) = bin.values[k];
    return l;
}

std::uint64_t BohrDecomposition::source_hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    h = fnv1a(h, &dim, sizeof(dim));
    for (const auto& bin : bins) {
        h = fnv1a_double(h, bin.omega);
        h = fnv1a_double(h, bin.rate);
        for (std::size_t k = 0; k < bin.pairs.size(); ++k) {
            h = fnv1a(h, &bin.pairs[k], sizeof(bin.pairs[k]));
            h = fnv1a_double(h, bin.values[k].real());
            h = fnv1a_double(h, bin.values[k].imag());
        }
    }
    return h;
}

namespace {

// Eigenvector phases are a solver artifact; fix the gauge so that the first
// component of significant magnitude is real and positive ("leading lobe
// positive"). Superpositions with positive coefficients then interfere
// constructively near the inner boundary, giving localized initial packets.
void fix_gauge(Eigen::MatrixXcd& kets) {
    for (Eigen::Index k = 0; k < kets.cols(); ++k) {
        const double mx = kets.col(k).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < kets.rows(); ++i) {
            const cplx v = kets(i, k);
            if (std::abs(v) > 1e-8 * mx) {
                if (v.imag() == 0.0) {
                    if (v.real() < 0.0) kets.col(k) = -kets.col(k);
                } else {
                    kets.col(k) *= std::abs(v) / v;
                }
                break;
            }
        }
    }
}

}  // namespace

EigenSystem eigendecompose(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("eigendecompose: input is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");
    EigenSystem eig;
    eig.energies = solver.eigenvalues();
    eig.kets = solver.eigenvectors().cast<cplx>();  // imaginary parts exactly zero
    fix_gauge(eig.kets);
    return eig;
}

EigenSystem eigendecompose(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) return eigendecompose(Eigen::MatrixXd(h.real()));
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - Eigen::MatrixXcd(h.adjoint())).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("eigendecompose: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");
    EigenSystem eig;
    eig.energies = solver.eigenvalues();
    eig.kets = solver.eigenvectors();
    fix_gauge(eig.kets);
    return eig;
}

BohrDecomposition enumerate_bohr(const EigenSystem& eig, const Eigen::MatrixXcd& x,
                                 const BohrOptions& opts) {
    const int n = static_cast<int>(eig.energies.size());
    if (x.rows() != n || x.cols() != n)
        throw std::invalid_argument("enumerate_bohr: dimension mismatch between eig and X");

    // Rotate the coupling operator into the eigenbasis once.
    Eigen::MatrixXcd xe = eig.kets.adjoint() * x * eig.kets;
    // A real-symmetric model gives exactly real kets and X, but the rotation
    // can leave exact-zero imaginary parts; detect and strip them so the
    // realness flag survives.
    bool real_values = x.imag().cwiseAbs().maxCoeff() == 0.0 &&
                       eig.kets.imag().cwiseAbs().maxCoeff() == 0.0;
    if (real_values) xe.imag().setZero();

    BohrDecomposition d;
    d.dim = n;
    d.values_real = real_values;
    const double span = n > 1 ? eig.energies(n - 1) - eig.energies(0) : 1.0;
    d.bin_tol = opts.bin_tol_rel * std::max(span, 1e-300);
    d.element_drop_tol = opts.element_drop_tol_rel * xe.cwiseAbs().maxCoeff();

    std::vector<PairGap> kept;
    kept.reserve(static_cast<std::size_t>(n) * n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const cplx v = xe(row, col);
            if (std::abs(v) <= d.element_drop_tol) continue;
            // Gap of the ordered pair (n, m): hbar*omega = eps_m - eps_n.
            kept.push_back({eig.energies(col) - eig.energies(row), row, col, v});
        }
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const PairGap& a, const PairGap& b) { return a.gap < b.gap; });

    // Cluster the sorted gap multiset: a new bin starts wherever consecutive
    // gaps differ by more than bin_tol.
    for (std::size_t i = 0; i < kept.size();) {
        std::size_t j = i + 1;
        while (j < kept.size() && kept[j].gap - kept[j - 1].gap <= d.bin_tol) ++j;
        BohrBin bin;
        double sum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            sum += kept[k].gap;
            bin.pairs.emplace_back(kept[k].n, kept[k].m);
            bin.values.push_back(kept[k].value);
        }
        bin.omega = sum / static_cast<double>(j - i) / hbar;
        d.bins.push_back(std::move(bin));
        i = j;
    }
    return d;
}

std::vector<Eigen::MatrixXcd> lindblad_operators(const BohrDecomposition& decomp) {
    std::set<std::pair<int, int>> seen;
    for (const auto& bin : decomp.bins)
        for (const auto& p : bin.pairs)
            if (!seen.insert(p).second)
                throw std::invalid_argument("lindblad_operators: groups overlap at pair (" +
                                            std::to_string(p.first) + "," +
                                            std::to_string(p.second) + ")");
    std::vector<Eigen::MatrixXcd> ops;
    ops.reserve(decomp.bins.size());
    for (std::size_t i = 0; i < decomp.bins.size(); ++i) ops.push_back(decomp.lindblad(i));
    return ops;
}

double coupling_gamma(double omega, const CouplingParams& p) {
    const double u = omega / p.omega_c;
    return p.gamma_star * std::exp(-0.5 * u * u) * std::exp(0.5 * hbar * omega / p.kbt);
}

BohrDecomposition davies_decomposition(const EigenSystem& eig, const Eigen::MatrixXcd& x,
                                       const CouplingParams& coupling, const BohrOptions& opts) {
    if (!(coupling.gamma_star > 0.0 && coupling.omega_c > 0.0 && coupling.kbt > 0.0))
        throw std::invalid_argument("davies_decomposition: coupling parameters must be positive");
    BohrDecomposition d = enumerate_bohr(eig, x, opts);
    for (auto& bin : d.bins) bin.rate = coupling_gamma(bin.omega, coupling);
    return d;
}

std::size_t coupled_count(const BohrDecomposition& decomp) {
    std::vector<double> weights;
    weights.reserve(decomp.bins.size());
    double total = 0.0;
    for (const auto& bin : decomp.bins) {
        double f2 = 0.0;
        for (const auto& v : bin.values) f2 += std::norm(v);
        weights.push_back(bin.rate * f2);
        total += weights.back();
    }
    std::sort(weights.begin(), weights.end());
    const double budget = std::numeric_limits<double>::epsilon() * total;
    double tail = 0.0;
    std::size_t dropped = 0;
    while (dropped < weights.size() && tail + weights[dropped] <= budget)
        tail += weights[dropped], ++dropped;
    return weights.size() - dropped;
}

Eigen::VectorXd thermal_populations(const Eigen::VectorXd& energies, double kbt) {
    if (!(kbt > 0.0)) throw std::invalid_argument("thermal_state: kbt must be positive");
    const double emin = energies.minCoeff();
    Eigen::VectorXd p = ((energies.array() - emin) * (-1.0 / kbt)).exp();
    return p / p.sum();
}

Eigen::MatrixXcd thermal_state(const EigenSystem& eig, double kbt) {
    const Eigen::VectorXd p = thermal_populations(eig.energies, kbt);
    return eig.kets * p.cast<cplx>().asDiagonal() * eig.kets.adjoint();
}

Eigen::MatrixXcd thermal_state(const Eigen::MatrixXcd& h, double kbt) {
    return thermal_state(eigendecompose(h), kbt);
}

}  // namespace sbd::spectral
