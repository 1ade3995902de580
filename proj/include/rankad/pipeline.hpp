#ifndef RANKAD_PIPELINE_HPP
#define RANKAD_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "rankad/dataset.hpp"
#include "rankad/detector.hpp"
#include "rankad/error.hpp"
#include "rankad/knn.hpp"
#include "rankad/model_io.hpp"
#include "rankad/model_selection.hpp"
#include "rankad/rank_svm.hpp"

namespace rankad {

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

template <class F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

struct TrainConfig {
  NeighborConfig neighbors{};
  int m = 3;
  std::size_t rounds = 20;
  std::uint64_t seed = 42;
  /// Unset values are chosen by cross-validation when `cross_validate` is set;
  /// otherwise C defaults to 1 and sigma to the mean k-NN distance.
  std::optional<double> cost;
  std::optional<double> sigma;
  std::optional<std::size_t> pair_cap;  // default 200 n
  double tol = 1e-4;
  std::size_t max_passes = 1000;
  bool cross_validate = false;
  CvGrid cv_grid{};  // empty sigma list: default grid around the mean k-NN distance
  CvOptions cv_options{};
};

struct TrainOutcome {
  ModelArchive archive;
  NominalScoreTable table;
  std::size_t pair_count = 0;
  std::size_t support_pairs = 0;
  std::size_t dropped_pairs = 0;
  bool converged = false;
  std::size_t passes = 0;
  double worst_residual = 0.0;
  std::optional<CvReport> cv;
};

/// Nominal scores -> quantized ranks -> preference pairs -> ranking SVM ->
/// calibrated detector.
inline TrainOutcome train_detector(const Dataset& data, const TrainConfig& config) {
  auto table = run_stage("knn_stats", [&] {
    return resampled_nominal_scores(data, config.neighbors, config.rounds, config.seed);
  });

  double cost = config.cost.value_or(1.0);
  double sigma = 0.0;
  std::optional<CvReport> cv;
  if (config.cross_validate && !(config.cost && config.sigma)) {
    cv = run_stage("model_selection", [&] {
      CvGrid grid = config.cv_grid;
      if (config.cost) grid.c_values = {*config.cost};
      if (config.sigma)
        grid.sigma_values = {*config.sigma};
      else if (grid.sigma_values.empty())
        grid.sigma_values = default_sigma_grid(data, config.neighbors.k);
      CvOptions opts = config.cv_options;
      return cross_validate(data, table, grid, config.m, config.seed, opts);
    });
    cost = cv->best_cost;
    sigma = cv->best_sigma;
  } else {
    sigma = config.sigma ? *config.sigma
                         : run_stage("model_selection", [&] { return mean_knn_distance(data, config.neighbors.k); });
    if (!(sigma > 0.0)) throw StageError("model_selection", "degenerate data: mean k-NN distance is zero");
  }

  auto pairs = run_stage("rank_trainer", [&] {
    auto ranks = quantize(table, config.m);
    return generate_pairs(ranks, config.pair_cap.value_or(default_pair_cap(data.size())), config.seed);
  });

  auto result = run_stage("rank_trainer", [&] {
    SolverOptions so;
    so.cost = cost;
    so.tol = config.tol;
    so.max_passes = config.max_passes;
    so.seed = config.seed;
    return train_rank_svm(data, pairs, KernelConfig{sigma}, so);
  });

  auto detector = run_stage("detector", [&] { return Detector::fit(result.model, data); });

  TrainingMetadata meta;
  meta.k = config.neighbors.k;
  meta.m = config.m;
  meta.n = data.size();
  meta.rounds = config.rounds;
  meta.seed = config.seed;
  meta.stat_mode = to_string(config.neighbors.mode);
  meta.pairs = pairs.size();
  meta.converged = result.converged;
  meta.passes = result.passes;

  TrainOutcome out{ModelArchive{std::move(detector), meta}, std::move(table), 0, 0, 0, false, 0, 0.0, std::nullopt};
  out.pair_count = pairs.size();
  out.support_pairs = result.model.support_pairs().size();
  out.dropped_pairs = result.dropped_pairs.size();
  out.converged = result.converged;
  out.passes = result.passes;
  out.worst_residual = result.worst_residual;
  out.cv = std::move(cv);
  return out;
}

}  // namespace rankad

#endif  // RANKAD_PIPELINE_HPP
