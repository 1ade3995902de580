// Train on the two-bump toy density, then score a few points.
#include <rankad/rankad.hpp>

#include <cstdio>

int main() {
  using namespace rankad;
  const auto nominal = twin_mixture().sample(400, 1);

  TrainConfig cfg;
  cfg.seed = 1;
  const auto out = train_detector(nominal, cfg);
  const auto& det = out.archive.detector;
  std::printf("%zu pairs, %zu support pairs, converged=%d\n", out.pair_count, out.support_pairs, out.converged);

  const double probes[][2] = {{4.0, 1.0}, {4.0, 0.0}, {6.0, 3.0}, {0.0, 0.0}};
  for (const auto& p : probes) {
    const auto r = det.classify(p, 0.05);
    std::printf("(%4.1f, %4.1f)  g=%8.4f  score=%.4f  %s\n", p[0], p[1], r.g_value, r.score, to_string(r.verdict).c_str());
  }
}
