#ifndef RANKAD_DATASET_HPP
#define RANKAD_DATASET_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rankad/error.hpp"

namespace rankad {

using Point = std::span<const double>;

enum class Label : std::uint8_t { nominal = 0, anomalous = 1 };

/// n points in R^d stored row-major, with optional per-point labels.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  Point point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  Point operator[](std::size_t i) const { return point(i); }

  std::span<const double> coords() const noexcept { return coords_; }

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  Label label(std::size_t i) const { return labels_.at(i); }

  void add(Point p) {
    check_point(p);
    if (has_labels()) throw InvalidArgument("dataset is labeled; a label is required");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  void add(Point p, Label label) {
    check_point(p);
    if (!empty() && !has_labels())
      throw InvalidArgument("dataset is unlabeled; cannot add a labeled point");
    coords_.insert(coords_.end(), p.begin(), p.end());
    labels_.push_back(label);
  }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  /// Points with the given indices, in that order (labels carried along).
  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out(dim_);
    out.reserve(indices.size());
    for (std::size_t i : indices) {
      if (has_labels())
        out.add(point(i), labels_[i]);
      else
        out.add(point(i));
    }
    return out;
  }

  /// Points carrying the given label.
  Dataset filter(Label label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) idx.push_back(i);
    return subset(idx);
  }

  /// Copy with labels removed.
  Dataset unlabeled() const {
    Dataset out(dim_);
    out.coords_ = coords_;
    return out;
  }

 private:
  void check_point(Point p) const {
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be positive");
    if (p.size() != dim_) throw DimensionMismatch(dim_, p.size());
    for (double v : p)
      if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
  }

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<Label> labels_;
};

struct CsvOptions {
  bool has_header = true;
  /// 0-based column holding a {0,1} label; excluded from the coordinates.
  std::optional<std::size_t> label_column;
  /// Accept a file with no data rows (returns an empty Dataset).
  bool allow_empty = false;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in, const CsvOptions& opts = {}) {
  std::string line;
  std::size_t row = 0;
  std::size_t arity = 0;
  Dataset data;
  std::vector<double> coords;
  bool first = true;

  if (opts.has_header) {
    if (std::getline(in, line)) {
      ++row;
      auto cells = detail::split_commas(line);
      arity = cells.size();
    }
  }

  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    if (first) {
      if (arity != 0 && cells.size() != arity)
        throw ParseError("row arity differs from header", row, cells.size());
      arity = cells.size();
      if (opts.label_column && *opts.label_column >= arity)
        throw ParseError("label column out of range", row, *opts.label_column + 1);
      std::size_t dim = arity - (opts.label_column ? 1 : 0);
      if (dim == 0) throw ParseError("no coordinate columns", row, 1);
      data = Dataset(dim);
      first = false;
    } else if (cells.size() != arity) {
      throw ParseError("ragged row: expected " + std::to_string(arity) + " cells, got " +
                           std::to_string(cells.size()),
                       row, std::min(cells.size(), arity) + 1);
    }
    coords.clear();
    std::optional<Label> label;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (opts.label_column && c == *opts.label_column) {
        auto cell = detail::trim(cells[c]);
        if (cell == "0")
          label = Label::nominal;
        else if (cell == "1")
          label = Label::anomalous;
        else
          throw ParseError("label must be 0 or 1, got '" + std::string(cell) + "'", row, c + 1);
        continue;
      }
      auto v = detail::parse_double(cells[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError("non-numeric cell '" + std::string(detail::trim(cells[c])) + "'", row,
                         c + 1);
      coords.push_back(*v);
    }
    if (label)
      data.add(coords, *label);
    else
      data.add(coords);
  }

  if (first) {
    if (!opts.allow_empty) throw ParseError("empty file");
    std::size_t dim = arity > 0 ? arity - (opts.label_column ? 1 : 0) : 0;
    return Dataset(dim);
  }
  return data;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_csv(in, opts);
}

/// Writes coordinates (and a trailing `label` column when labeled) with an
/// `x0,x1,...` header. Values round-trip exactly through load_csv.
inline void write_csv(std::ostream& out, const Dataset& data, bool header = true) {
  if (header) {
    for (std::size_t c = 0; c < data.dim(); ++c) out << (c ? "," : "") << 'x' << c;
    if (data.has_labels()) out << ",label";
    out << '\n';
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto p = data.point(i);
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? "," : "") << detail::format_double(p[c]);
    if (data.has_labels()) out << ',' << static_cast<int>(data.label(i));
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& data, bool header = true) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_csv(out, data, header);
}

}  // namespace rankad

#endif  // RANKAD_DATASET_HPP
