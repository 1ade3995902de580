#ifndef RANKAD_METRICS_HPP
#define RANKAD_METRICS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rankad/dataset.hpp"
#include "rankad/detector.hpp"
#include "rankad/error.hpp"
#include "rankad/synth.hpp"

namespace rankad {

/// Mann-Whitney AUC with the anomalous sample as the positive class: the
/// probability that an anomalous statistic exceeds a nominal one, ties
/// counting one half. Exact, via midranks of the pooled sample.
inline double auc_from_statistics(std::span<const double> nominal, std::span<const double> anomalous) {
  if (nominal.empty() || anomalous.empty()) throw InvalidArgument("AUC needs both classes to be nonempty");
  struct Item {
    double value;
    bool positive;
  };
  std::vector<Item> pooled;
  pooled.reserve(nominal.size() + anomalous.size());
  for (double v : nominal) pooled.push_back({v, false});
  for (double v : anomalous) pooled.push_back({v, true});
  std::sort(pooled.begin(), pooled.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

  // Twice the rank sum keeps midranks integral.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t start = 0; start < pooled.size();) {
    std::size_t end = start;
    while (end < pooled.size() && pooled[end].value == pooled[start].value) ++end;
    const std::uint64_t twice_mid = static_cast<std::uint64_t>(start + 1 + end);  // 2 * average of ranks start+1..end
    for (std::size_t t = start; t < end; ++t)
      if (pooled[t].positive) twice_rank_sum += twice_mid;
    start = end;
  }
  const double np = static_cast<double>(anomalous.size());
  const double nn = static_cast<double>(nominal.size());
  const double u = 0.5 * static_cast<double>(twice_rank_sum) - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

/// AUC of detector scores where LOWER score means more anomalous.
inline double auc(std::span<const double> scores_nominal, std::span<const double> scores_anomalous) {
  std::vector<double> nom(scores_nominal.begin(), scores_nominal.end());
  std::vector<double> anom(scores_anomalous.begin(), scores_anomalous.end());
  for (double& v : nom) v = -v;
  for (double& v : anom) v = -v;
  return auc_from_statistics(nom, anom);
}

/// Likelihood-ratio oracle against a uniform alternative: points are ranked
/// by nominal log-density, lower density meaning more anomalous.
inline double bayes_auc(const GaussianMixture& nominal, const Dataset& nominal_test, const Dataset& anomalous_test) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < nominal_test.size(); ++i) a.push_back(-nominal.log_density(nominal_test.point(i)));
  for (std::size_t i = 0; i < anomalous_test.size(); ++i) b.push_back(-nominal.log_density(anomalous_test.point(i)));
  return auc_from_statistics(a, b);
}

/// Samples n_nom nominal draws (seed) and n_anom box draws (seed + 1).
inline double bayes_auc(const GaussianMixture& nominal, const BoxSpec& anomaly, std::size_t n_nom, std::size_t n_anom,
                        std::uint64_t seed) {
  return bayes_auc(nominal, nominal.sample(n_nom, seed), sample_uniform_box(anomaly, n_anom, seed + 1));
}

/// Fraction of `nominal_test` flagged anomalous at each level.
inline std::vector<double> empirical_false_alarm(const Detector& detector, const Dataset& nominal_test,
                                                 std::span<const double> alphas) {
  if (nominal_test.empty()) throw InvalidArgument("false-alarm estimate needs a nonempty test set");
  for (double a : alphas) check_alpha(a);
  std::vector<double> scores(nominal_test.size());
  for (std::size_t i = 0; i < nominal_test.size(); ++i) scores[i] = detector.score(nominal_test.point(i));
  std::vector<double> rates;
  for (double a : alphas) {
    auto flagged = std::count_if(scores.begin(), scores.end(), [a](double s) { return s <= a; });
    rates.push_back(static_cast<double>(flagged) / static_cast<double>(scores.size()));
  }
  return rates;
}

/// Kolmogorov-Smirnov distance sup |F_N(t) - t| to the U[0,1] CDF.
inline double uniformity_ks(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("KS statistic needs at least one score");
  std::vector<double> s(scores.begin(), scores.end());
  for (double v : s)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("score outside [0, 1]");
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - s[i]);
    d = std::max(d, s[i] - static_cast<double>(i) / n);
  }
  return d;
}

/// Asymptotic one-sample KS p-value, Q_KS((sqrt(N) + 0.12 + 0.11/sqrt(N)) D).
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct MetricReport {
  double auc = 0.0;
  std::vector<double> alphas;
  std::vector<double> false_alarm;
  double ks_statistic = 0.0;
  double ks_pvalue = 0.0;
  double seconds_per_point = 0.0;
  std::size_t n_nominal = 0;
  std::size_t n_anomalous = 0;
};

/// Flat `key=value` lines, one metric per line.
inline void write_report(std::ostream& out, const MetricReport& r) {
  out << "auc=" << detail::format_double(r.auc) << '\n';
  for (std::size_t i = 0; i < r.alphas.size(); ++i)
    out << "false_alarm@" << detail::format_double(r.alphas[i]) << '=' << detail::format_double(r.false_alarm[i])
        << '\n';
  out << "ks_statistic=" << detail::format_double(r.ks_statistic) << '\n';
  out << "ks_pvalue=" << detail::format_double(r.ks_pvalue) << '\n';
  out << "seconds_per_point=" << detail::format_double(r.seconds_per_point) << '\n';
  out << "n_nominal=" << r.n_nominal << '\n';
  out << "n_anomalous=" << r.n_anomalous << '\n';
}

/// Scores a labeled test set: AUC, per-level false alarms on its nominal part,
/// KS distance of the nominal scores to U[0,1], and mean scoring wall time.
inline MetricReport evaluate(const Detector& detector, const Dataset& test, std::span<const double> alphas) {
  if (!test.has_labels()) throw InvalidArgument("evaluation needs a labeled test set");
  std::vector<double> nominal, anomalous;
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> scores(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) scores[i] = detector.score(test.point(i));
  const auto stop = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < test.size(); ++i)
    (test.label(i) == Label::anomalous ? anomalous : nominal).push_back(scores[i]);
  if (anomalous.empty()) throw InvalidArgument("no positive class: test set has no anomalous points");
  if (nominal.empty()) throw InvalidArgument("no negative class: test set has no nominal points");

  MetricReport r;
  r.auc = auc(nominal, anomalous);
  r.alphas.assign(alphas.begin(), alphas.end());
  for (double a : alphas) {
    check_alpha(a);
    auto flagged = std::count_if(nominal.begin(), nominal.end(), [a](double s) { return s <= a; });
    r.false_alarm.push_back(static_cast<double>(flagged) / static_cast<double>(nominal.size()));
  }
  r.ks_statistic = uniformity_ks(nominal);
  r.ks_pvalue = ks_pvalue(r.ks_statistic, nominal.size());
  const double secs = std::chrono::duration<double>(stop - start).count();
  r.seconds_per_point = secs / static_cast<double>(test.size());
  r.n_nominal = nominal.size();
  r.n_anomalous = anomalous.size();
  return r;
}

}  // namespace rankad

#endif  // RANKAD_METRICS_HPP
