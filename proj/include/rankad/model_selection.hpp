#ifndef RANKAD_MODEL_SELECTION_HPP
#define RANKAD_MODEL_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"
#include "rankad/knn.hpp"
#include "rankad/rank_svm.hpp"

namespace rankad {

/// Fraction of pairs whose order the values reverse: #{(i, j) : g_i < g_j} / |P|.
inline double wpdl(std::span<const double> g, const PreferencePairSet& pairs) {
  if (pairs.empty()) throw InvalidArgument("held-out pair set is empty");
  std::size_t wrong = 0;
  for (const auto& p : pairs.pairs) {
    if (p.first >= g.size() || p.second >= g.size()) throw InvalidArgument("pair index out of range");
    if (g[p.first] < g[p.second]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(pairs.size());
}

inline double wpdl(const RankModel& model, const Dataset& data, const PreferencePairSet& pairs) {
  auto g = model.decision_values(data);
  return wpdl(g, pairs);
}

/// {0.001, 0.003, 0.01, ..., 300, 1000}.
inline std::vector<double> default_cost_grid() {
  return {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
}

/// {2^i D : i = -10..10} where D is the mean leave-one-out average k-NN distance.
inline std::vector<double> default_sigma_grid(const Dataset& data, std::size_t k) {
  if (data.size() <= k) throw InvalidArgument("sigma grid needs more than k points");
  const double base = mean_knn_distance(data, k);
  if (!(base > 0.0)) throw DegenerateError("degenerate data: mean k-NN distance is zero");
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(std::ldexp(base, i));
  return grid;
}

struct CvGrid {
  std::vector<double> c_values = default_cost_grid();
  std::vector<double> sigma_values;
  std::size_t folds = 4;
};

/// Solver budget per grid cell. 13 x 21 cells x 4 folds makes full-precision
/// solves impractical, so cells use a looser tolerance, fewer sweeps and a
/// smaller pair sample than final training.
struct CvOptions {
  double tol = 1e-3;
  std::size_t max_passes = 50;
  /// Pair cap per training part; nullopt means 10 * (training part size).
  std::optional<std::size_t> pair_cap;
  std::function<void(const std::string&)> warn;
};

struct CvCell {
  double cost = 0.0;
  double sigma = 0.0;
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> fold_losses;  // NaN where the fold was unusable
  bool skipped = false;
};

struct CvReport {
  std::vector<CvCell> cells;  // cost-major: cells[ci * |sigma| + si]
  double best_cost = 0.0;
  double best_sigma = 0.0;
  double best_loss = 0.0;
  std::vector<int> fold_of;  // fold index per point
};

inline constexpr double constant_ranker_range = 1e-10;

inline std::size_t default_cv_pair_cap(std::size_t n_train) { return 10 * n_train; }

/// Seeded fold assignment: a shuffled round-robin over points.
inline std::vector<int> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(n);
  for (std::size_t t = 0; t < n; ++t) fold_of[perm[t]] = static_cast<int>(t % folds);
  return fold_of;
}

/// K-fold selection of (C, sigma) under the pairwise disagreement loss.
///
/// Folds partition the points. For each fold the pairs come from the quantized
/// ranks of the remaining points; the loss is measured on pairs with both
/// endpoints inside the fold. A model whose held-out decision values span less
/// than 1e-10 scores loss 1. Folds that yield no training or no held-out pairs
/// are left out of every cell's average.
inline CvReport cross_validate(const Dataset& data, const NominalScoreTable& table, const CvGrid& grid, int m,
                               std::uint64_t seed, const CvOptions& opts = {}) {
  if (grid.folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (grid.c_values.empty() || grid.sigma_values.empty()) throw InvalidArgument("empty parameter grid");
  for (double c : grid.c_values)
    if (!(c > 0.0)) throw InvalidArgument("grid costs must be positive");
  for (double s : grid.sigma_values)
    if (!(s > 0.0)) throw InvalidArgument("grid bandwidths must be positive");
  if (table.p_hat.size() != data.size()) throw InvalidArgument("score table size differs from dataset size");
  if (data.size() < grid.folds) throw InvalidArgument("fewer points than folds");

  const auto levels = quantize(table, m);
  CvReport report;
  report.fold_of = assign_folds(data.size(), grid.folds, seed);

  const std::size_t ns = grid.sigma_values.size();
  const std::size_t nc = grid.c_values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.cells.resize(nc * ns);
  for (std::size_t ci = 0; ci < nc; ++ci)
    for (std::size_t si = 0; si < ns; ++si) {
      auto& cell = report.cells[ci * ns + si];
      cell.cost = grid.c_values[ci];
      cell.sigma = grid.sigma_values[si];
      cell.fold_losses.assign(grid.folds, nan);
    }

  auto warn = [&](const std::string& msg) {
    if (opts.warn) opts.warn(msg);
  };

  for (std::size_t f = 0; f < grid.folds; ++f) {
    std::vector<std::size_t> train_idx, held_idx;
    for (std::size_t i = 0; i < data.size(); ++i)
      (report.fold_of[i] == static_cast<int>(f) ? held_idx : train_idx).push_back(i);

    QuantizedRanks train_ranks{{}, m}, held_ranks{{}, m};
    for (auto i : train_idx) train_ranks.levels.push_back(levels.levels[i]);
    for (auto i : held_idx) held_ranks.levels.push_back(levels.levels[i]);

    PreferencePairSet train_pairs, held_pairs;
    try {
      train_pairs = generate_pairs(train_ranks, opts.pair_cap.value_or(default_cv_pair_cap(train_idx.size())),
                                   seed + 1 + f);
      held_pairs = generate_pairs(held_ranks);
    } catch (const DegenerateError&) {
      warn("fold " + std::to_string(f) + " has a single quantization level; skipped");
      continue;
    }
    const Dataset train = data.subset(train_idx);
    const Dataset held = data.subset(held_idx);

    for (std::size_t si = 0; si < ns; ++si) {
      std::optional<RankSvmProblem> problem;
      try {
        problem.emplace(train, train_pairs, KernelConfig{grid.sigma_values[si]});
      } catch (const DegenerateError& e) {
        warn(std::string("fold ") + std::to_string(f) + ": " + e.what());
        continue;
      }
      for (std::size_t ci = 0; ci < nc; ++ci) {
        SolverOptions so;
        so.cost = grid.c_values[ci];
        so.tol = opts.tol;
        so.max_passes = opts.max_passes;
        so.seed = seed;
        try {
          auto result = problem->solve(so);
          auto g = result.model.decision_values(held);
          auto [lo, hi] = std::minmax_element(g.begin(), g.end());
          const double loss = (*hi - *lo) < constant_ranker_range ? 1.0 : wpdl(g, held_pairs);
          report.cells[ci * ns + si].fold_losses[f] = loss;
        } catch (const DegenerateError& e) {
          warn("cell (C=" + std::to_string(so.cost) + ", sigma=" + std::to_string(grid.sigma_values[si]) +
               ") fold " + std::to_string(f) + ": " + e.what());
        }
      }
    }
  }

  bool any = false;
  for (auto& cell : report.cells) {
    double sum = 0.0;
    std::size_t used = 0;
    for (double l : cell.fold_losses)
      if (!std::isnan(l)) {
        sum += l;
        ++used;
      }
    if (used == 0) {
      cell.skipped = true;
      continue;
    }
    cell.mean_loss = sum / static_cast<double>(used);
    // Ties go to the smaller C, then the smaller sigma.
    if (!any || cell.mean_loss < report.best_loss ||
        (cell.mean_loss == report.best_loss &&
         (cell.cost < report.best_cost || (cell.cost == report.best_cost && cell.sigma < report.best_sigma)))) {
      report.best_loss = cell.mean_loss;
      report.best_cost = cell.cost;
      report.best_sigma = cell.sigma;
      any = true;
    }
  }
  if (!any) throw DegenerateError("cross-validation skipped every grid cell");
  return report;
}

}  // namespace rankad

#endif  // RANKAD_MODEL_SELECTION_HPP
