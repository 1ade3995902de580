#ifndef RANKAD_SYNTH_HPP
#define RANKAD_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"

namespace rankad {

struct GaussianComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Finite Gaussian mixture with precomputed Cholesky factors.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("mixture needs at least one component");
    dim_ = static_cast<std::size_t>(components_.front().mean.size());
    if (dim_ == 0) throw InvalidArgument("mixture dimension must be positive");
    double total = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0)) throw InvalidArgument("mixture weights must be positive");
      if (static_cast<std::size_t>(c.mean.size()) != dim_ || static_cast<std::size_t>(c.cov.rows()) != dim_ ||
          static_cast<std::size_t>(c.cov.cols()) != dim_)
        throw DimensionMismatch(dim_, static_cast<std::size_t>(c.mean.size()));
      if (!c.cov.isApprox(c.cov.transpose(), 1e-12)) throw InvalidArgument("covariance is not symmetric");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");

    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (const auto& c : components_) {
      Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
      if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
      Eigen::MatrixXd L = llt.matrixL();
      if ((L.diagonal().array() <= 0.0).any()) throw InvalidArgument("covariance is not positive definite");
      double logdet = 2.0 * L.diagonal().array().log().sum();
      chol_.push_back(L);
      log_norm_.push_back(std::log(c.weight) - 0.5 * (static_cast<double>(dim_) * log2pi + logdet));
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }

  /// log f(x), combined across components with log-sum-exp.
  double log_density(Point x) const {
    if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(dim_));
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) {
      Eigen::VectorXd z = chol_[c].triangularView<Eigen::Lower>().solve(v - components_[c].mean);
      terms[c] = log_norm_[c] - 0.5 * z.squaredNorm();
      best = std::max(best, terms[c]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - best);
    return best + std::log(sum);
  }

  double density(Point x) const { return std::exp(log_density(x)); }

  /// n iid draws: component by weight, then mean + L z with z standard normal.
  Dataset sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw InvalidArgument("sample size must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset out(dim_);
    out.reserve(n);
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < n; ++i) {
      double u = unit(rng);
      std::size_t c = 0;
      for (double acc = components_[0].weight; c + 1 < components_.size() && u >= acc;)
        acc += components_[++c].weight;
      for (auto& zi : z) zi = normal(rng);
      Eigen::VectorXd x = components_[c].mean + chol_[c] * z;
      out.add(std::span<const double>(x.data(), dim_));
    }
    return out;
  }

 private:
  std::vector<GaussianComponent> components_;
  std::vector<Eigen::MatrixXd> chol_;
  std::vector<double> log_norm_;
  std::size_t dim_ = 0;
};

/// Axis-aligned box [lo_a, hi_a] per axis.
struct BoxSpec {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
};

inline Dataset sample_uniform_box(const BoxSpec& box, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
  if (box.lo.empty() || box.lo.size() != box.hi.size()) throw InvalidArgument("box bounds are malformed");
  for (std::size_t a = 0; a < box.lo.size(); ++a)
    if (!(box.lo[a] < box.hi[a])) throw InvalidArgument("degenerate box (lo >= hi)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset out(box.dim());
  out.reserve(n);
  std::vector<double> p(box.dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p.size(); ++a) p[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * unit(rng);
    out.add(p);
  }
  return out;
}

inline GaussianComponent make_component(double weight, std::vector<double> mean, std::vector<double> cov_rowmajor) {
  const auto d = static_cast<Eigen::Index>(mean.size());
  GaussianComponent c;
  c.weight = weight;
  c.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), d);
  if (cov_rowmajor.size() != mean.size() * mean.size()) throw InvalidArgument("covariance has wrong size");
  c.cov = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(cov_rowmajor.data(), d, d);
  return c;
}

/// 0.5 N([4, 1], 0.5 I) + 0.5 N([4, -1], 0.5 I): the two-bump level-curve toy.
inline GaussianMixture twin_mixture() {
  return GaussianMixture({make_component(0.5, {4.0, 1.0}, {0.5, 0.0, 0.0, 0.5}),
                          make_component(0.5, {4.0, -1.0}, {0.5, 0.0, 0.0, 0.5})});
}

/// 0.2 N([5, 0], diag(1, 9)) + 0.8 N([-5, 0], diag(9, 1)).
inline GaussianMixture cross_mixture() {
  return GaussianMixture({make_component(0.2, {5.0, 0.0}, {1.0, 0.0, 0.0, 9.0}),
                          make_component(0.8, {-5.0, 0.0}, {9.0, 0.0, 0.0, 1.0})});
}

/// Uniform anomaly support [-18, 18]^2.
inline BoxSpec cross_anomaly_box() { return {{-18.0, -18.0}, {18.0, 18.0}}; }

inline GaussianMixture standard_normal(std::size_t dim) {
  std::vector<double> cov(dim * dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) cov[a * dim + a] = 1.0;
  return GaussianMixture({make_component(1.0, std::vector<double>(dim, 0.0), cov)});
}

inline GaussianMixture named_mixture(const std::string& name) {
  if (name == "toy-twin") return twin_mixture();
  if (name == "toy-cross") return cross_mixture();
  if (name == "gauss2d") return standard_normal(2);
  throw InvalidArgument("unknown density '" + name + "' (expected toy-twin, toy-cross or gauss2d)");
}

/// Monte-Carlo p-value under a uniform alternative: P0{x : f0(x) <= f0(eta)}.
///
/// Draws the reference sample once and keeps its sorted log-densities, so each
/// query is a density evaluation plus a binary search. Standard error is at
/// most 1/(2 sqrt(mc_samples)).
class PValueOracle {
 public:
  static constexpr std::size_t min_samples = 10000;

  PValueOracle(const GaussianMixture& mixture, std::size_t mc_samples, std::uint64_t seed) : mixture_(&mixture) {
    if (mc_samples < min_samples) throw InvalidArgument("true p-value needs at least 10^4 Monte-Carlo samples");
    auto draws = mixture.sample(mc_samples, seed);
    log_dens_.resize(mc_samples);
    for (std::size_t i = 0; i < mc_samples; ++i) log_dens_[i] = mixture.log_density(draws.point(i));
    std::sort(log_dens_.begin(), log_dens_.end());
  }

  double operator()(Point eta) const {
    const double ld = mixture_->log_density(eta);
    auto it = std::upper_bound(log_dens_.begin(), log_dens_.end(), ld);
    return static_cast<double>(it - log_dens_.begin()) / static_cast<double>(log_dens_.size());
  }

 private:
  const GaussianMixture* mixture_;
  std::vector<double> log_dens_;
};

inline double true_pvalue(const GaussianMixture& mixture, Point eta, std::size_t mc_samples, std::uint64_t seed) {
  return PValueOracle(mixture, mc_samples, seed)(eta);
}

}  // namespace rankad

#endif  // RANKAD_SYNTH_HPP
