// dissipator.hpp — deterministic Davies dissipator and stochastically
// bundled dissipators built from random vectors
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sbd/rng.hpp"
#include "sbd/spectral.hpp"
#include "sbd/types.hpp"

namespace sbd::dissipator {

// Coefficient distributions for the random vectors r (zero mean, E|r|^2 = 1).
// all_ones and kronecker_delta are deterministic verification hooks.
enum class RandomVectorKind {
    unit_circle,      // e^{i theta}, theta uniform on [0, 2pi)
    rademacher,       // +-1 equiprobable
    all_ones,         // r = 1 (collapses the random sum)
    kronecker_delta,  // r_m^w = sqrt(M) delta_{m,w}; requires M = #bins
};

const char* to_string(RandomVectorKind kind);
RandomVectorKind random_vector_kind_from_string(const std::string& name);

// One i.i.d. random vector of length n (one entry per Bohr frequency).
Eigen::VectorXcd sample_random_vector(int n, RandomVectorKind kind, rng::Engine& eng);

// Interface shared by the deterministic and bundled dissipators.
// accumulate() adds D(rho) into drho; implementations are immutable after
// construction and safe to call concurrently.
class Dissipator {
  public:
    virtual ~Dissipator() = default;
    virtual int dim() const = 0;
    virtual void accumulate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const = 0;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
};

// Full Davies dissipator
//   D(rho) = sum_w gamma(w) (L_w rho L_w^dag - 1/2 {L_w^dag L_w, rho}).
// Stores sqrt(gamma)-scaled dense operators; the anticommutator kernel
// sum gamma L^dag L is precomputed once. Purely real operator sets use a
// real-arithmetic split of rho (about 2x faster at benchmark sizes).
class FullDissipator : public Dissipator {
  public:
    explicit FullDissipator(const spectral::BohrDecomposition& decomp);
    // Explicit (L, gamma) list, for small hand-built instances.
    FullDissipator(int dim, const std::vector<std::pair<Eigen::MatrixXcd, double>>& ops_and_rates);

    int dim() const override { return dim_; }
    std::size_t n_operators() const { return real_ ? ops_re_.size() : ops_cx_.size(); }
    void accumulate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const override;

  private:
    void finalize(std::vector<Eigen::MatrixXcd> scaled_ops);

    int dim_ = 0;
    bool real_ = false;
    std::vector<Eigen::MatrixXd> ops_re_;
    std::vector<Eigen::MatrixXcd> ops_cx_;
    Eigen::MatrixXd ksum_re_;
    Eigen::MatrixXcd ksum_cx_;
};

struct SeedRecord {
    RandomVectorKind kind = RandomVectorKind::unit_circle;
    std::uint64_t stream_seed = 0;  // seed of the per-realization stream
    int bundle_begin = 0;           // operators [begin, end) of the draw
    int bundle_end = 0;
};

// Stochastically bundled dissipator of size M:
//   R_m = sum_w (r_m^w / sqrt(M)) sqrt(gamma(w)) L_w,
//   D(rho) = sum_m (R_m rho R_m^dag - 1/2 {R_m^dag R_m, rho}).
// Bundle m draws its coefficients from the sub-stream
// sub_seed(stream_seed, m), so bundles are reproducible in isolation.
class BundledDissipator : public Dissipator {
  public:
    static BundledDissipator build(const spectral::BohrDecomposition& decomp, int m,
                                   RandomVectorKind kind, std::uint64_t stream_seed);

    // Dissipator over bundles [begin, end) of the same draw, renormalized to
    // its own size (operators scale by sqrt(m/(end-begin))). This is the
    // half-set construction the jackknife estimators evolve.
    BundledDissipator subrange(int begin, int end) const;

    int dim() const override { return dim_; }
    int bundle_count() const { return static_cast<int>(ops_.size()); }
    const std::vector<Eigen::MatrixXcd>& operators() const { return ops_; }
    const SeedRecord& seed_record() const { return seed_; }
    std::uint64_t source_hash() const { return source_hash_; }
    void accumulate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const override;

  private:
    BundledDissipator() = default;
    void finalize();

    int dim_ = 0;
    bool real_ = false;
    std::vector<Eigen::MatrixXcd> ops_;   // R_m, 1/sqrt(M) included
    std::vector<Eigen::MatrixXd> ops_re_; // real mirror when every R_m is real
    Eigen::MatrixXcd ksum_cx_;            // sum_m R_m^dag R_m
    Eigen::MatrixXd ksum_re_;
    SeedRecord seed_;
    std::uint64_t source_hash_ = 0;
};

}  // namespace sbd::dissipator
