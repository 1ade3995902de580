#ifndef RANKAD_MODEL_IO_HPP
#define RANKAD_MODEL_IO_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankad/dataset.hpp"
#include "rankad/detector.hpp"
#include "rankad/error.hpp"
#include "rankad/rank_svm.hpp"

namespace rankad {

inline constexpr int model_format_version = 1;
inline constexpr const char* model_format_name = "rankad-model";

/// How a model was produced. Informational; scoring never reads it.
struct TrainingMetadata {
  std::size_t k = 20;
  int m = 3;
  std::size_t n = 0;
  std::size_t rounds = 20;
  std::uint64_t seed = 42;
  std::string stat_mode = "mean_first_k";
  std::size_t pairs = 0;
  bool converged = true;
  std::size_t passes = 0;
};

/// Self-contained detector file: kernel, support-pair coordinates with their
/// coefficients, and the sorted reference decision values.
struct ModelArchive {
  Detector detector;
  TrainingMetadata meta;
};

inline void write_model(std::ostream& out, const ModelArchive& archive) {
  using nlohmann::json;
  const auto& model = archive.detector.model();
  json j;
  j["format"] = model_format_name;
  j["version"] = model_format_version;
  j["dim"] = model.dim();
  j["kernel"] = {{"type", "rbf"}, {"sigma", model.kernel().sigma}};
  j["cost"] = model.cost();
  json pairs = json::array();
  for (const auto& p : model.support_pairs())
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"alpha", p.alpha}});
  j["support_pairs"] = std::move(pairs);
  j["decision_values"] = archive.detector.sorted_g();
  const auto& m = archive.meta;
  j["training"] = {{"k", m.k},         {"m", m.m},           {"n", m.n},
                   {"rounds", m.rounds}, {"seed", m.seed},   {"stat_mode", m.stat_mode},
                   {"pairs", m.pairs}, {"converged", m.converged}, {"passes", m.passes}};
  out << j.dump(1) << '\n';
}

inline ModelArchive read_model(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("corrupt model archive: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string{}) != model_format_name)
      throw IntegrityError("not a rankad model archive");
    const int version = j.at("version").get<int>();
    if (version != model_format_version)
      throw VersionError("unsupported model archive version " + std::to_string(version) + " (expected " +
                         std::to_string(model_format_version) + ")");
    if (j.at("kernel").at("type").get<std::string>() != "rbf") throw IntegrityError("unknown kernel type");
    const std::size_t dim = j.at("dim").get<std::size_t>();
    KernelConfig kernel{j.at("kernel").at("sigma").get<double>()};
    const double cost = j.at("cost").get<double>();

    std::vector<SupportPair> pairs;
    for (const auto& p : j.at("support_pairs")) {
      SupportPair sp{p.at("first").get<std::vector<double>>(), p.at("second").get<std::vector<double>>(),
                     p.at("alpha").get<double>()};
      if (sp.first.size() != dim || sp.second.size() != dim)
        throw IntegrityError("support pair dimension disagrees with archive dimension");
      if (!(sp.alpha > 0.0)) throw IntegrityError("non-positive support pair coefficient");
      pairs.push_back(std::move(sp));
    }
    if (pairs.empty()) throw IntegrityError("archive holds no support pairs");
    auto values = j.at("decision_values").get<std::vector<double>>();
    if (values.empty()) throw IntegrityError("archive holds no decision values");
    if (!std::is_sorted(values.begin(), values.end()))
      throw IntegrityError("decision values are not sorted ascending");

    TrainingMetadata meta;
    if (j.contains("training")) {
      const auto& t = j.at("training");
      meta.k = t.value("k", meta.k);
      meta.m = t.value("m", meta.m);
      meta.n = t.value("n", meta.n);
      meta.rounds = t.value("rounds", meta.rounds);
      meta.seed = t.value("seed", meta.seed);
      meta.stat_mode = t.value("stat_mode", meta.stat_mode);
      meta.pairs = t.value("pairs", meta.pairs);
      meta.converged = t.value("converged", meta.converged);
      meta.passes = t.value("passes", meta.passes);
    }
    return ModelArchive{Detector(RankModel(kernel, cost, std::move(pairs)), std::move(values)), meta};
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("corrupt model archive: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IntegrityError(std::string("corrupt model archive: ") + e.what());
  }
}

inline void save_model(const ModelArchive& archive, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_model(out, archive);
  if (!out) throw Error("write to '" + path + "' failed");
}

inline ModelArchive load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_model(in);
}

struct GridBounds {
  std::array<double, 2> lo;
  std::array<double, 2> hi;
};

namespace detail {

inline void check_grid(const Detector& detector, const GridBounds& bounds, std::size_t resolution) {
  if (detector.dim() != 2) throw InvalidArgument("grid export needs a 2-dimensional model");
  if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
  for (int a = 0; a < 2; ++a)
    if (!(bounds.lo[a] < bounds.hi[a])) throw InvalidArgument("degenerate grid bounds (lo >= hi)");
}

}  // namespace detail

/// Row-major planar grid of (x, y, g, score) rows under header `x,y,g,score`.
/// Row r * resolution + c holds x = lo_x + c * step_x, y = lo_y + r * step_y.
inline void write_grid(std::ostream& out, const Detector& detector, const GridBounds& bounds,
                       std::size_t resolution) {
  detail::check_grid(detector, bounds, resolution);
  const double steps = static_cast<double>(resolution - 1);
  out << "x,y,g,score\n";
  std::array<double, 2> p;
  for (std::size_t r = 0; r < resolution; ++r) {
    p[1] = bounds.lo[1] + (bounds.hi[1] - bounds.lo[1]) * static_cast<double>(r) / steps;
    for (std::size_t c = 0; c < resolution; ++c) {
      p[0] = bounds.lo[0] + (bounds.hi[0] - bounds.lo[0]) * static_cast<double>(c) / steps;
      const double g = detector.decision_value(p);
      out << detail::format_double(p[0]) << ',' << detail::format_double(p[1]) << ','
          << detail::format_double(g) << ',' << detail::format_double(detector.score_from_value(g)) << '\n';
    }
  }
}

inline void export_grid(const Detector& detector, const GridBounds& bounds, std::size_t resolution,
                        const std::string& path) {
  detail::check_grid(detector, bounds, resolution);
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_grid(out, detector, bounds, resolution);
}

}  // namespace rankad

#endif  // RANKAD_MODEL_IO_HPP
