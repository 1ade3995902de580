#ifndef RANKAD_DETECTOR_HPP
#define RANKAD_DETECTOR_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/error.hpp"
#include "rankad/rank_svm.hpp"

namespace rankad {

enum class Verdict { nominal, anomalous };

inline std::string to_string(Verdict v) { return v == Verdict::anomalous ? "anomalous" : "nominal"; }

struct DetectionResult {
  double g_value = 0.0;
  double score = 0.0;  // fraction of reference points ranked strictly above
  double alpha = 0.0;
  Verdict verdict = Verdict::nominal;
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in the open interval (0, 1)");
}

/// A rank model calibrated against the sorted decision values of a reference
/// sample. Immutable once built; all queries are const.
class Detector {
 public:
  Detector(RankModel model, std::vector<double> sorted_g) : model_(std::move(model)), sorted_g_(std::move(sorted_g)) {
    if (sorted_g_.empty()) throw InvalidArgument("detector needs at least one reference value");
    if (!std::is_sorted(sorted_g_.begin(), sorted_g_.end()))
      throw IntegrityError("reference decision values are not sorted ascending");
  }

  /// Evaluates the model on every point of `reference` and sorts the values.
  static Detector fit(RankModel model, const Dataset& reference) {
    if (reference.empty()) throw InvalidArgument("cannot fit a detector on an empty sample");
    auto g = model.decision_values(reference);
    std::sort(g.begin(), g.end());
    return Detector(std::move(model), std::move(g));
  }

  double decision_value(Point eta) const { return model_.decision_value(eta); }

  /// (1/n) #{i : g < g(x_i)} by binary search; ties do not count.
  double score_from_value(double g) const {
    auto above = sorted_g_.end() - std::upper_bound(sorted_g_.begin(), sorted_g_.end(), g);
    return static_cast<double>(above) / static_cast<double>(sorted_g_.size());
  }

  double score(Point eta) const { return score_from_value(decision_value(eta)); }

  /// Anomalous iff score <= alpha.
  DetectionResult classify(Point eta, double alpha) const {
    check_alpha(alpha);
    DetectionResult r;
    r.g_value = decision_value(eta);
    r.score = score_from_value(r.g_value);
    r.alpha = alpha;
    r.verdict = r.score <= alpha ? Verdict::anomalous : Verdict::nominal;
    return r;
  }

  /// 1-based order-statistic index floor(n - alpha n + 1).
  std::size_t threshold_index(double alpha) const {
    check_alpha(alpha);
    const double n = static_cast<double>(sorted_g_.size());
    // The 1e-9 guard keeps exact products such as 0.05 * 100 from rounding down.
    const double idx = std::floor(n - alpha * n + 1.0 + 1e-9);
    if (idx < 1.0 || idx > n)
      throw InvalidArgument("alpha too small for n = " + std::to_string(sorted_g_.size()) +
                            ": order-statistic index exceeds n");
    return static_cast<std::size_t>(idx);
  }

  /// g^(floor(n - alpha n + 1)) + 2 gamma. Points with g >= the threshold form
  /// the anomaly region. With gamma = 0 this agrees with classify() except when
  /// the test value ties a reference value.
  double threshold_for_alpha(double alpha, double gamma = 0.0) const {
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
    return sorted_g_[threshold_index(alpha) - 1] + 2.0 * gamma;
  }

  const RankModel& model() const noexcept { return model_; }
  const std::vector<double>& sorted_g() const noexcept { return sorted_g_; }
  std::size_t size() const noexcept { return sorted_g_.size(); }
  std::size_t dim() const noexcept { return model_.dim(); }

 private:
  RankModel model_;
  std::vector<double> sorted_g_;
};

}  // namespace rankad

#endif  // RANKAD_DETECTOR_HPP
