// Deterministic and stochastically bundled dissipator application.
#include "sbd/dissipator.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <stdexcept>

namespace sbd::dissipator {

namespace {

// acc += op * rho * op^dag
void sandwich(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& acc,
              Eigen::MatrixXcd& tmp) {
    tmp.noalias() = op * rho;
    acc.noalias() += tmp * op.adjoint();
}

void sandwich(const Eigen::MatrixXd& op, const Eigen::MatrixXd& part, Eigen::MatrixXd& acc,
              Eigen::MatrixXd& tmp) {
    tmp.noalias() = op * part;
    acc.noalias() += tmp * op.transpose();
}

}  // namespace

const char* to_string(RandomVectorKind kind) {
    switch (kind) {
        case RandomVectorKind::unit_circle: return "unit_circle";
        case RandomVectorKind::rademacher: return "rademacher";
        case RandomVectorKind::all_ones: return "all_ones";
        case RandomVectorKind::kronecker_delta: return "kronecker_delta";
    }
    return "unknown";
}

RandomVectorKind random_vector_kind_from_string(const std::string& name) {
    if (name == "unit_circle") return RandomVectorKind::unit_circle;
    if (name == "rademacher") return RandomVectorKind::rademacher;
    if (name == "all_ones") return RandomVectorKind::all_ones;
    if (name == "kronecker_delta") return RandomVectorKind::kronecker_delta;
    throw std::invalid_argument("unknown random vector kind: " + name);
}

Eigen::VectorXcd sample_random_vector(int n, RandomVectorKind kind, rng::Engine& eng) {
    if (n < 1) throw std::invalid_argument("sample_random_vector: n must be >= 1");
    Eigen::VectorXcd r(n);
    switch (kind) {
        case RandomVectorKind::unit_circle:
            for (int i = 0; i < n; ++i) {
                const double theta = 2.0 * std::numbers::pi * rng::uniform01(eng);
                r(i) = cplx(std::cos(theta), std::sin(theta));
            }
            break;
        case RandomVectorKind::rademacher:
            for (int i = 0; i < n; ++i) r(i) = (eng() >> 63) ? 1.0 : -1.0;
            break;
        case RandomVectorKind::all_ones:
            r.setOnes();
            break;
        case RandomVectorKind::kronecker_delta:
            throw std::invalid_argument(
                "sample_random_vector: kronecker_delta is only meaningful inside "
                "BundledDissipator::build");
    }
    return r;
}

Eigen::MatrixXcd Dissipator::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    accumulate(rho, out);
    return out;
}

FullDissipator::FullDissipator(const spectral::BohrDecomposition& decomp) {
    dim_ = decomp.dim;
    // Operators are built in their final storage form straight from the
    // sparse bins; at benchmark sizes the dense set runs to gigabytes and a
    // complex intermediate would not fit.
    real_ = decomp.values_real;
    if (real_) {
        ops_re_.reserve(decomp.bins.size());
        ksum_re_ = Eigen::MatrixXd::Zero(dim_, dim_);
    } else {
        ops_cx_.reserve(decomp.bins.size());
        ksum_cx_ = Eigen::MatrixXcd::Zero(dim_, dim_);
    }
    for (const auto& bin : decomp.bins) {
        if (bin.rate < 0.0)
            throw std::invalid_argument("FullDissipator: negative rate (decomposition without "
                                        "rates?)");
        const double w = std::sqrt(bin.rate);
        if (real_) {
            Eigen::MatrixXd l = Eigen::MatrixXd::Zero(dim_, dim_);
            for (std::size_t k = 0; k < bin.pairs.size(); ++k)
                l(bin.pairs[k].first, bin.pairs[k].second) = w * bin.values[k].real();
            ops_re_.push_back(std::move(l));
        } else {
            Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim_, dim_);
            for (std::size_t k = 0; k < bin.pairs.size(); ++k)
                l(bin.pairs[k].first, bin.pairs[k].second) = w * bin.values[k];
            ops_cx_.push_back(std::move(l));
        }
        // K += rate L^dag L accumulated from the sparse entries: pairs
        // (n,k),(n,l) sharing their row contribute conj(v) w to (k,l).
        for (std::size_t i = 0; i < bin.pairs.size(); ++i)
            for (std::size_t j = 0; j < bin.pairs.size(); ++j) {
                if (bin.pairs[i].first != bin.pairs[j].first) continue;
                const cplx term = bin.rate * std::conj(bin.values[i]) * bin.values[j];
                if (real_)
                    ksum_re_(bin.pairs[i].second, bin.pairs[j].second) += term.real();
                else
                    ksum_cx_(bin.pairs[i].second, bin.pairs[j].second) += term;
            }
    }
}

FullDissipator::FullDissipator(int dim,
                               const std::vector<std::pair<Eigen::MatrixXcd, double>>& ops_and_rates) {
    dim_ = dim;
    std::vector<Eigen::MatrixXcd> scaled;
    scaled.reserve(ops_and_rates.size());
    for (const auto& [op, rate] : ops_and_rates) {
        if (op.rows() != dim || op.cols() != dim)
            throw std::invalid_argument("FullDissipator: operator dimension mismatch");
        if (rate < 0.0) throw std::invalid_argument("FullDissipator: rates must be non-negative");
        scaled.push_back(std::sqrt(rate) * op);
    }
    finalize(std::move(scaled));
}

void FullDissipator::finalize(std::vector<Eigen::MatrixXcd> scaled_ops) {
    real_ = true;
    for (const auto& op : scaled_ops)
        if (op.imag().cwiseAbs().maxCoeff() != 0.0) {
            real_ = false;
            break;
        }
    if (real_) {
        ops_re_.reserve(scaled_ops.size());
        ksum_re_ = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const auto& op : scaled_ops) {
            ops_re_.push_back(op.real());
            ksum_re_.noalias() += ops_re_.back().transpose() * ops_re_.back();
        }
    } else {
        ksum_cx_ = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (const auto& op : scaled_ops) ksum_cx_.noalias() += op.adjoint() * op;
        ops_cx_ = std::move(scaled_ops);
    }
}

void FullDissipator::accumulate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_ || drho.rows() != dim_ || drho.cols() != dim_)
        throw std::invalid_argument("FullDissipator: dimension mismatch");
    if (real_) {
        // L real: L rho L^T splits into independent real products on
        // Re(rho) and Im(rho).
        const Eigen::MatrixXd a = rho.real();
        const Eigen::MatrixXd b = rho.imag();
        Eigen::MatrixXd sa = Eigen::MatrixXd::Zero(dim_, dim_);
        Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(dim_, dim_);
        Eigen::MatrixXd tmp(dim_, dim_);
        for (const auto& op : ops_re_) {
            sandwich(op, a, sa, tmp);
            sandwich(op, b, sb, tmp);
        }
        sa.noalias() -= 0.5 * (ksum_re_ * a + a * ksum_re_);
        sb.noalias() -= 0.5 * (ksum_re_ * b + b * ksum_re_);
        drho.real() += sa;
        drho.imag() += sb;
    } else {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim_, dim_);
        Eigen::MatrixXcd tmp(dim_, dim_);
        for (const auto& op : ops_cx_) sandwich(op, rho, s, tmp);
        s.noalias() -= 0.5 * (ksum_cx_ * rho + rho * ksum_cx_);
        drho += s;
    }
}

BundledDissipator BundledDissipator::build(const spectral::BohrDecomposition& decomp, int m,
                                           RandomVectorKind kind, std::uint64_t stream_seed) {
    if (m < 1) throw std::invalid_argument("BundledDissipator: bundle count must be >= 1");
    if (decomp.bins.empty())
        throw std::invalid_argument("BundledDissipator: decomposition has no frequency bins");
    const int n_bins = static_cast<int>(decomp.bins.size());
    if (kind == RandomVectorKind::kronecker_delta && m != n_bins)
        throw std::invalid_argument(
            "BundledDissipator: kronecker_delta requires bundle count == bin count");

    BundledDissipator bd;
    bd.dim_ = decomp.dim;
    bd.seed_ = SeedRecord{kind, stream_seed, 0, m};
    bd.source_hash_ = decomp.source_hash();
    bd.ops_.reserve(m);

    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> sqrt_rate(n_bins);
    for (int w = 0; w < n_bins; ++w) sqrt_rate[w] = std::sqrt(decomp.bins[w].rate);

    for (int bundle = 0; bundle < m; ++bundle) {
        Eigen::VectorXcd r;
        if (kind == RandomVectorKind::kronecker_delta) {
            r = Eigen::VectorXcd::Zero(n_bins);
            r(bundle) = std::sqrt(static_cast<double>(m));
        } else {
            rng::Engine eng = rng::make_engine(rng::sub_seed(stream_seed, bundle));
            r = sample_random_vector(n_bins, kind, eng);
        }
        Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(bd.dim_, bd.dim_);
        for (int w = 0; w < n_bins; ++w) {
            const cplx c = r(w) * inv_sqrt_m * sqrt_rate[w];
            if (c == cplx(0.0, 0.0)) continue;
            const auto& bin = decomp.bins[w];
            for (std::size_t k = 0; k < bin.pairs.size(); ++k)
                op(bin.pairs[k].first, bin.pairs[k].second) += c * bin.values[k];
        }
        bd.ops_.push_back(std::move(op));
    }
    bd.finalize();
    return bd;
}

BundledDissipator BundledDissipator::subrange(int begin, int end) const {
    if (begin < 0 || end > bundle_count() || begin >= end)
        throw std::invalid_argument("BundledDissipator::subrange: invalid bundle range");
    BundledDissipator bd;
    bd.dim_ = dim_;
    bd.seed_ = seed_;
    bd.seed_.bundle_begin = seed_.bundle_begin + begin;
    bd.seed_.bundle_end = seed_.bundle_begin + end;
    bd.source_hash_ = source_hash_;
    // Renormalize 1/sqrt(M) -> 1/sqrt(M') for the smaller set.
    const double rescale = std::sqrt(static_cast<double>(bundle_count()) / (end - begin));
    bd.ops_.reserve(end - begin);
    for (int i = begin; i < end; ++i) bd.ops_.push_back(rescale * ops_[i]);
    bd.finalize();
    return bd;
}

void BundledDissipator::finalize() {
    real_ = true;
    for (const auto& op : ops_)
        if (op.imag().cwiseAbs().maxCoeff() != 0.0) {
            real_ = false;
            break;
        }
    ksum_cx_ = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (const auto& op : ops_) ksum_cx_.noalias() += op.adjoint() * op;
    if (real_) {
        ops_re_.clear();
        ops_re_.reserve(ops_.size());
        for (const auto& op : ops_) ops_re_.push_back(op.real());
        ksum_re_ = ksum_cx_.real();
    }
}

void BundledDissipator::accumulate(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_ || drho.rows() != dim_ || drho.cols() != dim_)
        throw std::invalid_argument("BundledDissipator: dimension mismatch");
    if (real_) {
        const Eigen::MatrixXd a = rho.real();
        const Eigen::MatrixXd b = rho.imag();
        Eigen::MatrixXd sa = Eigen::MatrixXd::Zero(dim_, dim_);
        Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(dim_, dim_);
        Eigen::MatrixXd tmp(dim_, dim_);
        for (const auto& op : ops_re_) {
            sandwich(op, a, sa, tmp);
            sandwich(op, b, sb, tmp);
        }
        sa.noalias() -= 0.5 * (ksum_re_ * a + a * ksum_re_);
        sb.noalias() -= 0.5 * (ksum_re_ * b + b * ksum_re_);
        drho.real() += sa;
        drho.imag() += sb;
    } else {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim_, dim_);
        Eigen::MatrixXcd tmp(dim_, dim_);
        for (const auto& op : ops_) sandwich(op, rho, s, tmp);
        s.noalias() -= 0.5 * (ksum_cx_ * rho + rho * ksum_cx_);
        drho += s;
    }
}

}  // namespace sbd::dissipator
