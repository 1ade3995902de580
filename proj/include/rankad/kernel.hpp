#ifndef RANKAD_KERNEL_HPP
#define RANKAD_KERNEL_HPP

#include <cmath>
#include <span>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"
#include "rankad/knn.hpp"

namespace rankad {

struct KernelConfig {
  double sigma = 1.0;
};

/// Gaussian RBF kernel exp(-|x - y|^2 / sigma^2).
class RbfKernel {
 public:
  explicit RbfKernel(KernelConfig config) : config_(config) {
    if (!(config.sigma > 0.0) || !std::isfinite(config.sigma))
      throw InvalidArgument("kernel bandwidth sigma must be positive");
    inv_sigma2_ = 1.0 / (config.sigma * config.sigma);
  }

  double operator()(Point x, Point y) const {
    if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
    return std::exp(-squared_distance(x, y) * inv_sigma2_);
  }

  /// Unchecked variant for hot loops.
  double eval(const double* x, const double* y, std::size_t dim) const {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      double t = x[c] - y[c];
      s += t * t;
    }
    return std::exp(-s * inv_sigma2_);
  }

  double sigma() const noexcept { return config_.sigma; }
  const KernelConfig& config() const noexcept { return config_; }

 private:
  KernelConfig config_;
  double inv_sigma2_;
};

inline double rbf_kernel(Point x, Point y, double sigma) { return RbfKernel({sigma})(x, y); }

/// Kernel rows over a fixed point set. Holds the full Gram matrix when the set
/// has at most `cache_limit` points; otherwise each row is recomputed on demand.
class GramRows {
 public:
  static constexpr std::size_t default_cache_limit = 4000;

  GramRows(const Dataset& points, const RbfKernel& kernel, std::size_t cache_limit = default_cache_limit)
      : points_(&points), kernel_(kernel), n_(points.size()), cached_(points.size() <= cache_limit) {
    if (cached_) {
      gram_.resize(n_ * n_);
      const std::size_t d = points.dim();
      const double* base = points.coords().data();
      for (std::size_t i = 0; i < n_; ++i) {
        gram_[i * n_ + i] = 1.0;
        for (std::size_t j = i + 1; j < n_; ++j) {
          double v = kernel_.eval(base + i * d, base + j * d, d);
          gram_[i * n_ + j] = v;
          gram_[j * n_ + i] = v;
        }
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  bool cached() const noexcept { return cached_; }

  /// Row i of the Gram matrix; `buffer` backs the result in streaming mode.
  std::span<const double> row(std::size_t i, std::vector<double>& buffer) const {
    if (cached_) return {gram_.data() + i * n_, n_};
    buffer.resize(n_);
    const std::size_t d = points_->dim();
    const double* base = points_->coords().data();
    for (std::size_t j = 0; j < n_; ++j)
      buffer[j] = (i == j) ? 1.0 : kernel_.eval(base + i * d, base + j * d, d);
    return buffer;
  }

  double at(std::size_t i, std::size_t j) const {
    if (cached_) return gram_[i * n_ + j];
    if (i == j) return 1.0;
    const std::size_t d = points_->dim();
    const double* base = points_->coords().data();
    // Same argument order as the cached fill so both modes agree bit-for-bit.
    return i < j ? kernel_.eval(base + i * d, base + j * d, d) : kernel_.eval(base + j * d, base + i * d, d);
  }

 private:
  const Dataset* points_;
  RbfKernel kernel_;
  std::size_t n_;
  bool cached_;
  std::vector<double> gram_;
};

}  // namespace rankad

#endif  // RANKAD_KERNEL_HPP
