#include <rankad/metrics.hpp>
#include <rankad/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace rankad;

namespace {

double pairwise_auc(const std::vector<double>& nom, const std::vector<double>& anom) {
  double wins = 0.0;
  for (double a : anom)
    for (double b : nom) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / static_cast<double>(nom.size() * anom.size());
}

}  // namespace

TEST(Mixture, Validation) {
  EXPECT_THROW(GaussianMixture({make_component(0.5, {0.0}, {1.0})}), InvalidArgument);
  EXPECT_THROW(GaussianMixture({make_component(1.0, {0.0, 0.0}, {1.0, 2.0, 2.0, 1.0})}), InvalidArgument);
  EXPECT_THROW(GaussianMixture({make_component(1.0, {0.0, 0.0}, {1.0, 0.5, 0.0, 1.0})}), InvalidArgument);
  EXPECT_THROW(GaussianMixture({}), InvalidArgument);
  EXPECT_THROW(named_mixture("nope"), InvalidArgument);
  EXPECT_NO_THROW(named_mixture("toy-twin"));
}

TEST(Mixture, SampleMeanMatchesWeights) {
  const auto mix = cross_mixture();
  const auto s = mix.sample(100000, 1);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    mx += s[i][0];
    my += s[i][1];
  }
  EXPECT_NEAR(mx / 1e5, -3.0, 0.1);
  EXPECT_NEAR(my / 1e5, 0.0, 0.1);
}

TEST(Mixture, SingleDrawIsMeanPlusCholeskyTimesNormal) {
  const auto mix = GaussianMixture({make_component(1.0, {1.0, -2.0}, {4.0, 0.0, 0.0, 9.0})});
  const auto s = mix.sample(1, 5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  unit(rng);
  const double z0 = normal(rng), z1 = normal(rng);
  EXPECT_DOUBLE_EQ(s[0][0], 1.0 + 2.0 * z0);
  EXPECT_DOUBLE_EQ(s[0][1], -2.0 + 3.0 * z1);
  EXPECT_EQ(mix.sample(10, 5).coords()[0], s[0][0]);
}

TEST(Mixture, LogDensityStableAtBoxCorner) {
  const auto mix = cross_mixture();
  const double corner[] = {18.0, 18.0};
  const double ld = mix.log_density(corner);
  EXPECT_TRUE(std::isfinite(ld));
  // Dominant term: 0.2 N([5,0], diag(1,9)).
  const double expect = std::log(0.2) - std::log(2.0 * M_PI * 3.0) - 0.5 * (13.0 * 13.0 + 18.0 * 18.0 / 9.0);
  EXPECT_NEAR(ld, expect, 1e-9);
  const double origin[] = {0.0, 0.0};
  const auto g = standard_normal(2);
  EXPECT_NEAR(g.density(origin), 1.0 / (2.0 * M_PI), 1e-15);
}

TEST(Box, SupportAndMean) {
  const auto b = sample_uniform_box(cross_anomaly_box(), 100000, 3);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    ASSERT_GE(b[i][0], -18.0);
    ASSERT_LE(b[i][0], 18.0);
    mx += b[i][0];
    my += b[i][1];
  }
  EXPECT_NEAR(mx / 1e5, 0.0, 0.2);
  EXPECT_NEAR(my / 1e5, 0.0, 0.2);
  EXPECT_EQ(sample_uniform_box({{0.0}, {1.0}}, 1, 9)[0][0], sample_uniform_box({{0.0}, {1.0}}, 1, 9)[0][0]);
  EXPECT_THROW(sample_uniform_box({{1.0}, {1.0}}, 1, 9), InvalidArgument);
}

TEST(TruePvalue, ClosedFormsAndMonotone) {
  const auto g1 = standard_normal(1);
  const double tail[] = {1.959964}, mode[] = {0.0};
  EXPECT_NEAR(true_pvalue(g1, tail, 200000, 1), 0.05, 3.0 * 0.5 / std::sqrt(200000.0));
  EXPECT_NEAR(true_pvalue(g1, mode, 10000, 1), 1.0, 1e-12);
  EXPECT_THROW(true_pvalue(g1, mode, 100, 1), InvalidArgument);

  const auto g2 = standard_normal(2);
  const PValueOracle oracle(g2, 100000, 2);
  double prev = 1.1;
  for (double r : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double x[] = {r / std::sqrt(2.0), r / std::sqrt(2.0)};
    const double p = oracle(x);
    EXPECT_LE(p, prev);
    // In 2-D, P(|X|^2 >= r^2) = exp(-r^2 / 2).
    EXPECT_NEAR(p, std::exp(-r * r / 2.0), 0.01);
    prev = p;
  }
}

TEST(Auc, HandCasesAndOracle) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.3, 0.3, 0.7}, std::vector<double>{0.3, 0.3, 0.7}), 0.5);
  EXPECT_THROW(auc(std::vector<double>{}, std::vector<double>{1.0}), InvalidArgument);

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 20);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(50), b(50);
    for (auto& v : a) v = coarse(rng);
    for (auto& v : b) v = coarse(rng) + 3;
    EXPECT_NEAR(auc_from_statistics(a, b), pairwise_auc(a, b), 1e-12);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(40), b(30);
  for (auto& v : a) v = normal(rng);
  for (auto& v : b) v = normal(rng);
  EXPECT_NEAR(auc_from_statistics(a, b) + auc_from_statistics(b, a), 1.0, 1e-12);
}

TEST(BayesAuc, Extremes) {
  const auto tight = GaussianMixture({make_component(1.0, {0.0, 0.0}, {0.01, 0.0, 0.0, 0.01})});
  EXPECT_GT(bayes_auc(tight, {{50.0, 50.0}, {60.0, 60.0}}, 200, 200, 1), 0.999);
  const auto g = standard_normal(2);
  const double near_half = bayes_auc(g, g.sample(3000, 1), g.sample(3000, 2));
  EXPECT_NEAR(near_half, 0.5, 0.03);
}

TEST(Uniformity, KsCases) {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  EXPECT_NEAR(uniformity_ks(grid), 1.0 / 100.0, 1e-12);
  EXPECT_DOUBLE_EQ(uniformity_ks(std::vector<double>(10, 0.5)), 0.5);
  EXPECT_THROW(uniformity_ks(std::vector<double>{1.5}), InvalidArgument);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> draws(10000);
  for (auto& v : draws) v = u(rng);
  EXPECT_LT(uniformity_ks(draws), 0.02);
  EXPECT_GT(ks_pvalue(uniformity_ks(draws), draws.size()), 0.01);
  EXPECT_LT(ks_pvalue(0.05, 10000), 1e-10);
}

TEST(Report, KeyValueFormat) {
  MetricReport r;
  r.auc = 0.5;
  r.alphas = {0.05};
  r.false_alarm = {0.04};
  r.ks_statistic = 0.01;
  r.ks_pvalue = 0.9;
  r.seconds_per_point = 1e-6;
  r.n_nominal = 2;
  r.n_anomalous = 3;
  std::ostringstream out;
  write_report(out, r);
  EXPECT_EQ(out.str(),
            "auc=0.5\nfalse_alarm@0.05=0.04\nks_statistic=0.01\nks_pvalue=0.9\nseconds_per_point=1e-06\n"
            "n_nominal=2\nn_anomalous=3\n");
}
