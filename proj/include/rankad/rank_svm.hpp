#ifndef RANKAD_RANK_SVM_HPP
#define RANKAD_RANK_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"
#include "rankad/kernel.hpp"
#include "rankad/knn.hpp"

namespace rankad {

// ---------------------------------------------------------------------------
// Quantization and preference pairs

/// Uniform m-level bins of the estimated p-values. Level 1 holds the smallest
/// p̂ (most anomalous), level m the largest.
struct QuantizedRanks {
  std::vector<int> levels;
  int m = 0;
};

inline QuantizedRanks quantize(std::span<const double> p_hat, int m) {
  if (m < 2) throw InvalidArgument("quantization needs at least 2 levels");
  QuantizedRanks out;
  out.m = m;
  out.levels.reserve(p_hat.size());
  for (double p : p_hat) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p-value outside [0, 1]");
    int level = 1 + static_cast<int>(std::floor(p * m));
    out.levels.push_back(std::min(m, level));
  }
  return out;
}

inline QuantizedRanks quantize(const NominalScoreTable& table, int m) { return quantize(table.p_hat, m); }

/// `first` must receive a larger decision value than `second`.
struct PreferencePair {
  std::uint32_t first;
  std::uint32_t second;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
  friend auto operator<=>(const PreferencePair&, const PreferencePair&) = default;
};

struct PreferencePairSet {
  std::vector<PreferencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
  /// Uniform pair weight 1/|P|.
  double weight() const noexcept { return pairs.empty() ? 0.0 : 1.0 / static_cast<double>(pairs.size()); }
};

inline std::size_t default_pair_cap(std::size_t n) { return 200 * n; }

/// Emits (i, j) for every i, j with level(i) < level(j): the lower-p̂, more
/// anomalous point is ranked above, so the trained scorer grows with the
/// neighbor-distance statistic.
///
/// With a cap smaller than the full pair count, each level-pair stratum
/// (a, b) keeps a share of the cap proportional to its size (largest
/// remainder), drawn without replacement under `seed`. The result is sorted
/// by (first, second).
inline PreferencePairSet generate_pairs(const QuantizedRanks& ranks, std::optional<std::size_t> cap = std::nullopt,
                                        std::uint64_t seed = 42) {
  const int m = ranks.m;
  std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(m) + 1);
  for (std::size_t i = 0; i < ranks.levels.size(); ++i) {
    int level = ranks.levels[i];
    if (level < 1 || level > m) throw InvalidArgument("quantized level out of range");
    members[static_cast<std::size_t>(level)].push_back(static_cast<std::uint32_t>(i));
  }

  struct Stratum {
    int a, b;
    std::size_t count;
  };
  std::vector<Stratum> strata;
  std::size_t total = 0;
  for (int a = 1; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      std::size_t count = members[a].size() * members[b].size();
      if (count == 0) continue;
      strata.push_back({a, b, count});
      total += count;
    }
  if (total == 0) throw DegenerateError("degenerate ranking: all points share one quantization level");

  PreferencePairSet out;
  if (!cap || *cap >= total) {
    out.pairs.reserve(total);
    for (const auto& s : strata)
      for (auto i : members[s.a])
        for (auto j : members[s.b]) out.pairs.push_back({i, j});
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
  }
  if (*cap == 0) throw InvalidArgument("pair cap must be positive");

  // Largest-remainder allocation of the cap across strata.
  std::vector<std::size_t> quota(strata.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    double exact = static_cast<double>(*cap) * static_cast<double>(strata[s].count) / static_cast<double>(total);
    quota[s] = std::min(strata[s].count, static_cast<std::size_t>(std::floor(exact)));
    assigned += quota[s];
    remainders.emplace_back(exact - std::floor(exact), s);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t r = 0; assigned < *cap; r = (r + 1) % remainders.size()) {
    std::size_t s = remainders[r].second;
    if (quota[s] < strata[s].count) {
      ++quota[s];
      ++assigned;
    }
  }

  std::mt19937_64 rng(seed);
  out.pairs.reserve(*cap);
  std::vector<std::size_t> chosen;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const auto& A = members[strata[s].a];
    const auto& B = members[strata[s].b];
    chosen.clear();
    // Selection sampling: keeps ascending order, O(count).
    std::size_t needed = quota[s];
    std::size_t left = strata[s].count;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = 0; t < strata[s].count && needed > 0; ++t, --left) {
      if (unit(rng) * static_cast<double>(left) < static_cast<double>(needed)) {
        chosen.push_back(t);
        --needed;
      }
    }
    for (std::size_t t : chosen) out.pairs.push_back({A[t / B.size()], B[t % B.size()]});
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

// ---------------------------------------------------------------------------
// Model

struct SupportPair {
  std::vector<double> first;
  std::vector<double> second;
  double alpha = 0.0;
};

/// Kernel ranker g(x) = sum_p alpha_p (k(x_first, x) - k(x_second, x)).
///
/// Support pairs are folded into a per-center expansion (identical coordinates
/// share one center) so evaluation costs one kernel call per distinct support
/// point. The fold is a pure function of the pair list, so a model rebuilt from
/// the same pairs evaluates bit-identically.
class RankModel {
 public:
  RankModel(KernelConfig kernel, double cost, std::vector<SupportPair> pairs)
      : kernel_(kernel), cost_(cost), pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw InvalidArgument("a rank model needs at least one support pair");
    dim_ = pairs_.front().first.size();
    std::map<std::vector<double>, std::size_t> index;
    auto center_of = [&](const std::vector<double>& x) {
      if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
      auto [it, inserted] = index.try_emplace(x, coef_.size());
      if (inserted) {
        centers_.insert(centers_.end(), x.begin(), x.end());
        coef_.push_back(0.0);
      }
      return it->second;
    };
    for (const auto& p : pairs_) {
      if (!(p.alpha > 0.0)) throw InvalidArgument("support pair coefficients must be positive");
      coef_[center_of(p.first)] += p.alpha;
      coef_[center_of(p.second)] -= p.alpha;
    }
  }

  double decision_value(Point x) const {
    if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
    double g = 0.0;
    const double* c = centers_.data();
    for (std::size_t t = 0; t < coef_.size(); ++t, c += dim_) g += coef_[t] * kernel_.eval(c, x.data(), dim_);
    return g;
  }

  std::vector<double> decision_values(const Dataset& data) const {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = decision_value(data.point(i));
    return out;
  }

  const KernelConfig& kernel() const noexcept { return kernel_.config(); }
  double cost() const noexcept { return cost_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<SupportPair>& support_pairs() const noexcept { return pairs_; }
  /// Distinct support points: the per-query kernel evaluation count.
  std::size_t support_points() const noexcept { return coef_.size(); }

 private:
  RbfKernel kernel_;
  double cost_;
  std::size_t dim_ = 0;
  std::vector<SupportPair> pairs_;
  std::vector<double> centers_;
  std::vector<double> coef_;
};

// ---------------------------------------------------------------------------
// Solver

struct SolverOptions {
  double cost = 1.0;
  double tol = 1e-4;
  std::size_t max_passes = 1000;
  std::uint64_t seed = 42;
};

inline constexpr double support_threshold = 1e-12;

struct TrainResult {
  RankModel model;
  std::vector<double> alpha;    // per input pair, before pruning; 0 for dropped pairs
  std::vector<double> margins;  // g(x_first) - g(x_second) per input pair
  std::vector<std::size_t> dropped_pairs;
  bool converged = false;
  std::size_t passes = 0;
  double worst_residual = 0.0;
  double dual_objective = 0.0;
  double primal_objective = 0.0;
};

/// KKT violation of one dual coordinate.
inline double kkt_residual(double alpha, double margin, double cost) {
  const double grad = 1.0 - margin;
  if (alpha <= 0.0) return std::max(0.0, grad);
  if (alpha >= cost) return std::max(0.0, -grad);
  return std::abs(grad);
}

/// Dual of the pairwise max-margin ranking problem
///
///   min 1/2 |g|^2 + C sum_p xi_p   s.t.  <g, phi(x_i) - phi(x_j)> >= 1 - xi_p,  xi_p >= 0
///
/// over the points touched by a pair set. Builds the kernel rows once so the
/// same problem can be solved for several costs.
class RankSvmProblem {
 public:
  RankSvmProblem(const Dataset& data, const PreferencePairSet& pairs, KernelConfig kernel,
                 std::size_t cache_limit = GramRows::default_cache_limit)
      : data_(&data), kernel_(kernel), pairs_(pairs.pairs) {
    if (pairs_.empty()) throw InvalidArgument("preference pair set is empty");
    std::vector<std::size_t> used;
    used.reserve(2 * pairs_.size());
    for (const auto& p : pairs_) {
      if (p.first >= data.size() || p.second >= data.size())
        throw InvalidArgument("preference pair index out of range");
      used.push_back(p.first);
      used.push_back(p.second);
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<std::uint32_t> to_local(data.size(), 0);
    for (std::size_t t = 0; t < used.size(); ++t) to_local[used[t]] = static_cast<std::uint32_t>(t);
    local_points_ = data.unlabeled().subset(used);
    gram_.emplace(local_points_, kernel_, cache_limit);

    local_pairs_.reserve(pairs_.size());
    qdiag_.reserve(pairs_.size());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      PreferencePair lp{to_local[pairs_[p].first], to_local[pairs_[p].second]};
      local_pairs_.push_back(lp);
      double q = 2.0 - 2.0 * gram_->at(lp.first, lp.second);
      qdiag_.push_back(q);
      if (q <= 1e-14) dropped_.push_back(p);
    }
    if (dropped_.size() == pairs_.size())
      throw DegenerateError("every preference pair joins two identical points");
  }

  RankSvmProblem(const RankSvmProblem&) = delete;
  RankSvmProblem& operator=(const RankSvmProblem&) = delete;

  std::size_t size() const noexcept { return pairs_.size(); }
  std::size_t local_size() const noexcept { return local_points_.size(); }
  const std::vector<std::size_t>& dropped_pairs() const noexcept { return dropped_; }

  TrainResult solve(const SolverOptions& opts) const {
    if (!(opts.cost > 0.0)) throw InvalidArgument("cost C must be positive");
    if (!(opts.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const double C = opts.cost;
    const std::size_t np = pairs_.size();
    const std::size_t nl = local_points_.size();

    std::vector<double> alpha(np, 0.0);
    std::vector<double> g(nl, 0.0);  // decision values at the local points
    std::vector<std::size_t> order;
    order.reserve(np);
    {
      std::size_t d = 0;
      for (std::size_t p = 0; p < np; ++p) {
        if (d < dropped_.size() && dropped_[d] == p) {
          ++d;
          continue;
        }
        order.push_back(p);
      }
    }

    std::mt19937_64 rng(opts.seed);
    std::vector<double> buf_i, buf_j;
    bool converged = false;
    std::size_t pass = 0;
    while (pass < opts.max_passes) {
      ++pass;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t p : order) {
        const auto [i, j] = local_pairs_[p];
        const double grad = 1.0 - (g[i] - g[j]);
        const double updated = std::clamp(alpha[p] + grad / qdiag_[p], 0.0, C);
        const double delta = updated - alpha[p];
        if (delta == 0.0) continue;
        alpha[p] = updated;
        auto ri = gram_->row(i, buf_i);
        auto rj = gram_->row(j, buf_j);
        for (std::size_t t = 0; t < nl; ++t) g[t] += delta * (ri[t] - rj[t]);
      }
      double worst = 0.0;
      for (std::size_t p : order) {
        const auto [i, j] = local_pairs_[p];
        worst = std::max(worst, kkt_residual(alpha[p], g[i] - g[j], C));
      }
      if (worst <= opts.tol) {
        converged = true;
        break;
      }
    }

    // Recompute decision values from scratch to shed accumulated update drift.
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t p : order) {
      if (alpha[p] == 0.0) continue;
      const auto [i, j] = local_pairs_[p];
      auto ri = gram_->row(i, buf_i);
      auto rj = gram_->row(j, buf_j);
      for (std::size_t t = 0; t < nl; ++t) g[t] += alpha[p] * (ri[t] - rj[t]);
    }

    std::vector<double> margins(np, 0.0);
    double worst = 0.0, sum_alpha = 0.0, norm2 = 0.0, hinge = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      const auto [i, j] = local_pairs_[p];
      margins[p] = g[i] - g[j];
      sum_alpha += alpha[p];
      norm2 += alpha[p] * margins[p];
      hinge += std::max(0.0, 1.0 - margins[p]);
    }
    for (std::size_t p : order) worst = std::max(worst, kkt_residual(alpha[p], margins[p], C));

    // Support pairs keep input order; it fixes the model's evaluation order.
    std::vector<SupportPair> support;
    for (std::size_t p = 0; p < np; ++p) {
      if (alpha[p] <= support_threshold) continue;
      auto a = data_->point(pairs_[p].first);
      auto b = data_->point(pairs_[p].second);
      support.push_back({{a.begin(), a.end()}, {b.begin(), b.end()}, alpha[p]});
    }
    if (support.empty()) throw DegenerateError("training produced no support pairs");

    return TrainResult{RankModel(kernel_.config(), C, std::move(support)),
                       std::move(alpha),
                       std::move(margins),
                       dropped_,
                       converged,
                       pass,
                       worst,
                       sum_alpha - 0.5 * norm2,
                       0.5 * norm2 + C * hinge};
  }

 private:
  const Dataset* data_;
  RbfKernel kernel_;
  std::vector<PreferencePair> pairs_;
  std::vector<PreferencePair> local_pairs_;
  std::vector<double> qdiag_;
  std::vector<std::size_t> dropped_;
  Dataset local_points_;
  std::optional<GramRows> gram_;
};

inline TrainResult train_rank_svm(const Dataset& data, const PreferencePairSet& pairs, KernelConfig kernel,
                                  const SolverOptions& opts = {}) {
  return RankSvmProblem(data, pairs, kernel).solve(opts);
}

}  // namespace rankad

#endif  // RANKAD_RANK_SVM_HPP
