#ifndef RANKAD_KNN_HPP
#define RANKAD_KNN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"

namespace rankad {

enum class StatisticMode { kth_distance, mean_first_k, eps_count };

inline std::string to_string(StatisticMode mode) {
  switch (mode) {
    case StatisticMode::kth_distance: return "kth_distance";
    case StatisticMode::mean_first_k: return "mean_first_k";
    case StatisticMode::eps_count: return "eps_count";
  }
  return "unknown";
}

inline StatisticMode parse_statistic_mode(const std::string& s) {
  if (s == "kth_distance" || s == "kth") return StatisticMode::kth_distance;
  if (s == "mean_first_k" || s == "mean") return StatisticMode::mean_first_k;
  if (s == "eps_count" || s == "eps") return StatisticMode::eps_count;
  throw InvalidArgument("unknown statistic mode '" + s + "'");
}

struct NeighborConfig {
  std::size_t k = 20;
  StatisticMode mode = StatisticMode::mean_first_k;
  double eps = 0.0;  // eps_count only
};

/// Per-point neighbor statistic and estimated p-value of a nominal sample.
struct NominalScoreTable {
  std::vector<double> r_values;
  std::vector<double> p_hat;
  std::size_t rounds = 0;  // 0: single leave-one-out pass, no resampling
};

/// Neighbor count growing as n^{2/5}, the rate used for consistency runs.
inline std::size_t k_for_size(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.4)));
}

inline double squared_distance(Point a, Point b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    double t = a[c] - b[c];
    s += t * t;
  }
  return s;
}

namespace detail {

inline void check_config(const NeighborConfig& config) {
  if (config.mode == StatisticMode::eps_count) {
    if (!(config.eps > 0.0)) throw InvalidArgument("eps must be positive");
  } else if (config.k == 0) {
    throw InvalidArgument("k must be positive");
  }
}

/// Statistic from the squared distances to every reference point. Reorders `sq`.
inline double statistic_from_squared(std::vector<double>& sq, const NeighborConfig& config) {
  if (config.mode == StatisticMode::eps_count) {
    const double eps2 = config.eps * config.eps;
    return static_cast<double>(std::count_if(sq.begin(), sq.end(), [&](double d) { return d <= eps2; }));
  }
  if (config.k > sq.size())
    throw InvalidArgument("k = " + std::to_string(config.k) + " exceeds reference size " +
                          std::to_string(sq.size()));
  auto kth = sq.begin() + static_cast<std::ptrdiff_t>(config.k - 1);
  std::nth_element(sq.begin(), kth, sq.end());
  if (config.mode == StatisticMode::kth_distance) return std::sqrt(*kth);
  std::sort(sq.begin(), kth + 1);
  double sum = 0.0;
  for (auto it = sq.begin(); it != kth + 1; ++it) sum += std::sqrt(*it);
  return sum / static_cast<double>(config.k);
}

/// Statistic of `query` against the reference points listed in `refs`,
/// skipping index `exclude` if present.
inline double statistic_over(Point query, const Dataset& reference, std::span<const std::size_t> refs,
                             std::optional<std::size_t> exclude, const NeighborConfig& config,
                             std::vector<double>& scratch) {
  scratch.clear();
  for (std::size_t j : refs) {
    if (exclude && j == *exclude) continue;
    scratch.push_back(squared_distance(query, reference.point(j)));
  }
  return statistic_from_squared(scratch, config);
}

/// Larger statistic means more anomalous, except for eps counts.
inline bool larger_is_anomalous(const NeighborConfig& config) {
  return config.mode != StatisticMode::eps_count;
}

/// Fraction of `sorted_ref` at least as anomalous as `value`.
inline double rank_fraction(double value, const std::vector<double>& sorted_ref, bool larger_is_anomalous) {
  const auto n = static_cast<double>(sorted_ref.size());
  if (larger_is_anomalous) {
    // #{r : value <= r}
    auto it = std::lower_bound(sorted_ref.begin(), sorted_ref.end(), value);
    return static_cast<double>(sorted_ref.end() - it) / n;
  }
  // #{r : value >= r}
  auto it = std::upper_bound(sorted_ref.begin(), sorted_ref.end(), value);
  return static_cast<double>(it - sorted_ref.begin()) / n;
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace detail

/// R_S(query) against the whole reference set. The caller is responsible for
/// removing the query from `reference` when scoring a training point.
inline double knn_statistic(Point query, const Dataset& reference, const NeighborConfig& config) {
  detail::check_config(config);
  if (query.size() != reference.dim()) throw DimensionMismatch(reference.dim(), query.size());
  std::vector<double> scratch;
  auto refs = detail::iota_indices(reference.size());
  return detail::statistic_over(query, reference, refs, std::nullopt, config, scratch);
}

/// Leave-one-out statistics R_S(x_i) computed against S \ {x_i}.
inline std::vector<double> loo_statistics(const Dataset& data, const NeighborConfig& config) {
  detail::check_config(config);
  std::vector<double> out(data.size());
  std::vector<double> scratch;
  auto refs = detail::iota_indices(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out[i] = detail::statistic_over(data.point(i), data, refs, i, config, scratch);
  return out;
}

/// p-value estimator built from the K-NN graph of a nominal sample.
///
/// The leave-one-out statistics of the training points are computed once; a
/// query then costs one neighbor scan plus a binary search. Distance modes give
/// the fraction of training points whose statistic is >= that of the query; the
/// eps-count mode gives the fraction whose ball count is <= that of the query.
class KnnScorer {
 public:
  KnnScorer(const Dataset& data, const NeighborConfig& config) : data_(&data), config_(config) {
    detail::check_config(config);
    if (config.mode != StatisticMode::eps_count && data.size() < config.k + 1)
      throw InvalidArgument("need at least k + 1 training points");
    sorted_ = loo_statistics(data, config);
    std::sort(sorted_.begin(), sorted_.end());
  }

  double statistic(Point eta) const { return knn_statistic(eta, *data_, config_); }

  double score(Point eta) const {
    return detail::rank_fraction(statistic(eta), sorted_, detail::larger_is_anomalous(config_));
  }

  const std::vector<double>& sorted_statistics() const noexcept { return sorted_; }

 private:
  const Dataset* data_;
  NeighborConfig config_;
  std::vector<double> sorted_;
};

/// p̂_K(eta) = (1/n) sum_i 1{R_S(eta) <= R_S(x_i)}.
inline double score_pk(Point eta, const Dataset& data, const NeighborConfig& config) {
  return KnnScorer(data, config).score(eta);
}

/// p̂_eps(eta) = (1/n) sum_i 1{N_S(eta) >= N_S(x_i)}.
inline double score_peps(Point eta, const Dataset& data, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  return KnnScorer(data, {1, StatisticMode::eps_count, eps}).score(eta);
}

/// Single leave-one-out pass over the whole sample.
inline NominalScoreTable loo_nominal_scores(const Dataset& data, const NeighborConfig& config) {
  NominalScoreTable table;
  table.r_values = loo_statistics(data, config);
  std::vector<double> sorted = table.r_values;
  std::sort(sorted.begin(), sorted.end());
  table.p_hat.reserve(data.size());
  for (double r : table.r_values)
    table.p_hat.push_back(detail::rank_fraction(r, sorted, detail::larger_is_anomalous(config)));
  table.rounds = 0;
  return table;
}

/// Split-half resampled nominal scores.
///
/// Each round draws a seeded random equipartition S = S1 ∪ S2 (S1 gets the
/// extra point when n is odd). Every point of S1 takes its statistic against
/// S2 and is ranked among the other points of S1; S2 is treated symmetrically.
/// `p_hat` and `r_values` are averages over rounds.
inline NominalScoreTable resampled_nominal_scores(const Dataset& data, const NeighborConfig& config,
                                                  std::size_t rounds, std::uint64_t seed) {
  detail::check_config(config);
  if (rounds == 0) throw InvalidArgument("rounds must be positive");
  const std::size_t n = data.size();
  if (config.mode != StatisticMode::eps_count && n < 2 * (config.k + 1))
    throw InvalidArgument("dataset too small for a split: need at least 2(k + 1) = " +
                          std::to_string(2 * (config.k + 1)) + " points, have " + std::to_string(n));
  if (n < 2) throw InvalidArgument("dataset too small for a split");

  NominalScoreTable table;
  table.r_values.assign(n, 0.0);
  table.p_hat.assign(n, 0.0);
  table.rounds = rounds;

  std::mt19937_64 rng(seed);
  auto perm = detail::iota_indices(n);
  std::vector<double> scratch;
  const std::size_t first_size = (n + 1) / 2;
  const bool larger_anom = detail::larger_is_anomalous(config);

  for (std::size_t round = 0; round < rounds; ++round) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::span<const std::size_t> halves[2] = {std::span(perm).first(first_size),
                                              std::span(perm).subspan(first_size)};
    for (int h = 0; h < 2; ++h) {
      auto own = halves[h];
      auto other = halves[1 - h];
      std::vector<double> stats(own.size());
      for (std::size_t t = 0; t < own.size(); ++t)
        stats[t] = detail::statistic_over(data.point(own[t]), data, other, std::nullopt, config, scratch);
      std::vector<double> sorted = stats;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t t = 0; t < own.size(); ++t) {
        table.r_values[own[t]] += stats[t];
        table.p_hat[own[t]] += detail::rank_fraction(stats[t], sorted, larger_anom);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rounds);
  for (std::size_t i = 0; i < n; ++i) {
    table.r_values[i] *= inv;
    table.p_hat[i] *= inv;
  }
  return table;
}

/// Mean over the sample of the leave-one-out average distance to the first k neighbors.
inline double mean_knn_distance(const Dataset& data, std::size_t k) {
  auto stats = loo_statistics(data, {k, StatisticMode::mean_first_k, 0.0});
  return std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(stats.size());
}

}  // namespace rankad

#endif  // RANKAD_KNN_HPP
