// rankad command-line front end.
#include <rankad/rankad.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using namespace rankad;

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string model;
  std::size_t k = 20;
  int levels = 3;
  std::optional<double> cost;
  std::optional<double> sigma;
  std::size_t rounds = 20;
  std::uint64_t seed = 42;
  std::optional<std::size_t> cap;
  std::string stat_mode = "mean_first_k";
  double eps = 0.0;
  double tol = 1e-4;
  std::size_t max_passes = 1000;
  bool cv = false;
  double alpha = 0.05;
  std::vector<double> alphas{0.05, 0.1, 0.2};
  std::vector<double> bounds;
  std::size_t resolution = 100;
  std::string density = "toy-cross";
  std::size_t n = 600;
  std::size_t anomalies = 0;
  std::vector<double> box{-18.0, 18.0};
};

// Writes to `path`, or stdout when it is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error("cannot write '" + path + "'");
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

const auto open_unit = CLI::Validator(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0 && v < 1.0)) return "alpha must lie in the open interval (0, 1)";
      return {};
    },
    "(0,1)", "open unit interval");

NeighborConfig neighbors(const Options& o) {
  return run_stage("knn_stats", [&] { return NeighborConfig{o.k, parse_statistic_mode(o.stat_mode), o.eps}; });
}

Dataset read_points(const std::string& path) {
  return run_stage("dataset_io", [&] { return load_csv(path); });
}

// Labeled files carry the label in the last column.
Dataset read_labeled(const std::string& path) {
  return run_stage("dataset_io", [&] {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    const auto cols = detail::split_commas(header).size();
    if (cols < 2) throw InvalidArgument("labeled file needs at least one coordinate and a label column");
    CsvOptions opts;
    opts.label_column = cols - 1;
    return load_csv(path, opts);
  });
}

TrainConfig train_config(const Options& o) {
  TrainConfig cfg;
  cfg.neighbors = neighbors(o);
  cfg.m = o.levels;
  cfg.rounds = o.rounds;
  cfg.seed = o.seed;
  cfg.cost = o.cost;
  cfg.sigma = o.sigma;
  cfg.pair_cap = o.cap;
  cfg.tol = o.tol;
  cfg.max_passes = o.max_passes;
  cfg.cross_validate = o.cv;
  cfg.cv_options.warn = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return cfg;
}

void cmd_train(const Options& o) {
  const auto data = read_points(o.input);
  auto out = train_detector(data, train_config(o));
  run_stage("dataset_io", [&] { save_model(out.archive, o.output); });
  std::cout << "n=" << data.size() << '\n'
            << "pairs=" << out.pair_count << '\n'
            << "support_pairs=" << out.support_pairs << '\n'
            << "cost=" << detail::format_double(out.archive.detector.model().cost()) << '\n'
            << "sigma=" << detail::format_double(out.archive.detector.model().kernel().sigma) << '\n'
            << "converged=" << (out.converged ? "true" : "false") << '\n'
            << "passes=" << out.passes << '\n';
  if (out.dropped_pairs > 0) std::cerr << "warning: dropped " << out.dropped_pairs << " pairs joining identical points\n";
  if (!out.converged)
    std::cerr << "warning: solver stopped after " << out.passes << " passes, worst KKT residual "
              << out.worst_residual << '\n';
}

ModelArchive read_archive(const std::string& path) {
  return run_stage("dataset_io", [&] { return load_model(path); });
}

void cmd_score(const Options& o) {
  const auto archive = read_archive(o.model);
  const auto data = run_stage("dataset_io", [&] {
    CsvOptions opts;
    opts.allow_empty = true;
    return load_csv(o.input, opts);
  });
  const auto& det = archive.detector;
  if (!data.empty() && data.dim() != det.dim())
    throw StageError("detector", DimensionMismatch(det.dim(), data.dim()).what());
  Sink sink(o.output);
  auto& out = sink.get();
  out << "g,score,verdict\n";
  run_stage("detector", [&] {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto r = det.classify(data.point(i), o.alpha);
      out << detail::format_double(r.g_value) << ',' << detail::format_double(r.score) << ',' << to_string(r.verdict)
          << '\n';
    }
  });
}

void cmd_eval(const Options& o) {
  const auto archive = read_archive(o.model);
  const auto test = read_labeled(o.input);
  if (test.dim() != archive.detector.dim())
    throw StageError("synth_eval", DimensionMismatch(archive.detector.dim(), test.dim()).what());
  const auto report = run_stage("synth_eval", [&] { return evaluate(archive.detector, test, o.alphas); });
  Sink sink(o.output);
  write_report(sink.get(), report);
}

void cmd_cv(const Options& o) {
  const auto data = read_points(o.input);
  const auto cfg = neighbors(o);
  const auto table = run_stage("knn_stats", [&] { return resampled_nominal_scores(data, cfg, o.rounds, o.seed); });
  const auto report = run_stage("model_selection", [&] {
    CvGrid grid;
    grid.sigma_values = o.sigma ? std::vector<double>{*o.sigma} : default_sigma_grid(data, o.k);
    if (o.cost) grid.c_values = {*o.cost};
    CvOptions opts;
    opts.pair_cap = o.cap;
    opts.warn = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return cross_validate(data, table, grid, o.levels, o.seed, opts);
  });
  Sink sink(o.output);
  auto& out = sink.get();
  const std::size_t folds = report.cells.front().fold_losses.size();
  out << "cost,sigma,mean_loss";
  for (std::size_t f = 0; f < folds; ++f) out << ",fold" << f;
  out << '\n';
  for (const auto& cell : report.cells) {
    out << detail::format_double(cell.cost) << ',' << detail::format_double(cell.sigma) << ','
        << (cell.skipped ? "nan" : detail::format_double(cell.mean_loss));
    for (double l : cell.fold_losses) out << ',' << (std::isnan(l) ? "nan" : detail::format_double(l));
    out << '\n';
  }
  std::cerr << "best cost=" << detail::format_double(report.best_cost)
            << " sigma=" << detail::format_double(report.best_sigma)
            << " loss=" << detail::format_double(report.best_loss) << '\n';
}

void cmd_synth(const Options& o) {
  const auto data = run_stage("synth_eval", [&] {
    const auto mix = named_mixture(o.density);
    auto nominal = mix.sample(o.n, o.seed);
    if (o.anomalies == 0) return nominal;
    BoxSpec box{std::vector<double>(mix.dim(), o.box[0]), std::vector<double>(mix.dim(), o.box[1])};
    const auto anomalous = sample_uniform_box(box, o.anomalies, o.seed + 1);
    Dataset out(mix.dim());
    for (std::size_t i = 0; i < nominal.size(); ++i) out.add(nominal.point(i), Label::nominal);
    for (std::size_t i = 0; i < anomalous.size(); ++i) out.add(anomalous.point(i), Label::anomalous);
    return out;
  });
  Sink sink(o.output);
  run_stage("dataset_io", [&] { write_csv(sink.get(), data); });
}

void cmd_grid(const Options& o) {
  const auto archive = read_archive(o.model);
  GridBounds b{{o.bounds[0], o.bounds[2]}, {o.bounds[1], o.bounds[3]}};
  run_stage("detector", [&] { detail::check_grid(archive.detector, b, o.resolution); });
  Sink sink(o.output);
  run_stage("detector", [&] { write_grid(sink.get(), archive.detector, b, o.resolution); });
}

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.k, "neighbors for the nominal scores")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--levels", o.levels, "quantization levels m")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  sub->add_option("--cost", o.cost, "margin-violation cost C")->check(CLI::PositiveNumber);
  sub->add_option("--sigma", o.sigma, "RBF bandwidth")->check(CLI::PositiveNumber);
  sub->add_option("--rounds", o.rounds, "resampling rounds")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--cap", o.cap, "maximum preference pairs")->check(CLI::PositiveNumber);
  sub->add_option("--stat-mode", o.stat_mode, "kth_distance, mean_first_k or eps_count")->capture_default_str();
  sub->add_option("--eps", o.eps, "ball radius for eps_count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranking-based anomaly detection"};
  app.set_config("--config", "", "TOML or INI file with option defaults; flags override");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();

  auto* train = app.add_subcommand("train", "fit a detector on nominal data");
  train->add_option("input", o.input, "training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--output", o.output, "model archive")->required();
  add_model_flags(train, o);
  train->add_option("--tol", o.tol, "KKT tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--max-passes", o.max_passes, "solver sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_flag("--cv", o.cv, "choose unset cost and sigma by cross-validation");

  auto* score = app.add_subcommand("score", "score test points");
  score->add_option("input", o.input, "test CSV")->required()->check(CLI::ExistingFile);
  score->add_option("-m,--model", o.model, "model archive")->required()->check(CLI::ExistingFile);
  score->add_option("-o,--output", o.output, "scores CSV (default stdout)");
  score->add_option("--alpha", o.alpha, "significance level")->check(open_unit)->capture_default_str();

  auto* eval = app.add_subcommand("eval", "evaluate on a labeled test file (label in the last column)");
  eval->add_option("input", o.input, "labeled test CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("-m,--model", o.model, "model archive")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--output", o.output, "report file (default stdout)");
  eval->add_option("--alpha", o.alphas, "false-alarm levels")->check(open_unit)->capture_default_str();

  auto* cv = app.add_subcommand("cv", "cross-validate cost and sigma");
  cv->add_option("input", o.input, "training CSV")->required()->check(CLI::ExistingFile);
  cv->add_option("-o,--output", o.output, "per-cell report CSV (default stdout)");
  add_model_flags(cv, o);

  auto* synth = app.add_subcommand("synth", "sample a built-in density");
  synth->add_option("--density", o.density, "toy-twin, toy-cross or gauss2d")->capture_default_str();
  synth->add_option("--n", o.n, "nominal points")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--anomalies", o.anomalies, "uniform box points; adds a label column");
  synth->add_option("--box", o.box, "anomaly box lo,hi per axis")->expected(2)->delimiter(',')->capture_default_str();
  synth->add_option("-o,--output", o.output, "CSV (default stdout)");

  auto* grid = app.add_subcommand("grid", "export decision values over a planar grid");
  grid->add_option("-m,--model", o.model, "model archive")->required()->check(CLI::ExistingFile);
  grid->add_option("--bounds", o.bounds, "xmin,xmax,ymin,ymax")->required()->expected(4)->delimiter(',');
  grid->add_option("--resolution", o.resolution, "points per axis")->capture_default_str();
  grid->add_option("-o,--output", o.output, "grid CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) cmd_train(o);
    else if (*score) cmd_score(o);
    else if (*eval) cmd_eval(o);
    else if (*cv) cmd_cv(o);
    else if (*synth) cmd_synth(o);
    else if (*grid) cmd_grid(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
