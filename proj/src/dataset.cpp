#include "sarah/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

#include "sarah/errors.hpp"
#include "sarah/rng.hpp"

namespace sarah {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && is_space(line[k])) ++k;
    const std::size_t start = k;
    while (k < line.size() && !is_space(line[k])) ++k;
    if (k > start) tokens.push_back(line.substr(start, k - start));
  }
  return tokens;
}

// Accepts an optional leading '+' and the UTF-8 minus sign U+2212.
std::optional<double> parse_real(std::string_view tok) {
  std::string buf;
  if (tok.starts_with("\xE2\x88\x92")) {
    buf = "-";
    buf.append(tok.substr(3));
    tok = buf;
  } else if (tok.starts_with('+')) {
    tok.remove_prefix(1);
  }
  if (tok.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::size_t> parse_index(std::string_view tok) {
  std::size_t value = 0;
  if (tok.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Which canonical binary pair a label set belongs to; returns false if none.
bool binary_pair(const std::vector<double>& distinct, double& low, double& high) {
  static constexpr double kPairs[3][2] = {{-1.0, 1.0}, {0.0, 1.0}, {1.0, 2.0}};
  for (const auto& pair : kPairs) {
    const bool inside = std::all_of(distinct.begin(), distinct.end(),
                                    [&](double y) { return y == pair[0] || y == pair[1]; });
    if (inside) {
      low = pair[0];
      high = pair[1];
      return true;
    }
  }
  return false;
}

double map_binary(double y, const std::vector<double>& distinct, double low, double high) {
  if (distinct.size() == 2) return y == low ? -1.0 : 1.0;
  // A single class: nonpositive labels are the negative class.
  (void)high;
  return y <= 0.0 ? -1.0 : 1.0;
}

Dataset synth_planted(std::size_t n, std::size_t d, std::uint64_t seed, bool classify) {
  if (n == 0 || d == 0) throw ConfigError("synthetic dataset needs n >= 1 and d >= 1");
  CounterRng rng = CounterRng(seed).split(stream::kSynthetic);
  DenseVector w_true(d);
  for (std::size_t j = 0; j < d; ++j) w_true[j] = rng.normal();

  std::vector<SparseRow> rows;
  std::vector<double> labels;
  rows.reserve(n);
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dense(d);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dense[j] = rng.normal();
      sq += dense[j] * dense[j];
    }
    const double noise = rng.normal();
    if (sq == 0.0) dense[0] = sq = 1.0;
    const double norm = std::sqrt(sq);
    std::vector<std::size_t> idx;
    std::vector<double> val;
    double margin = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double x = dense[j] / norm;
      if (x == 0.0) continue;
      idx.push_back(j);
      val.push_back(x);
      margin += x * w_true[j];
    }
    rows.emplace_back(std::move(idx), std::move(val));
    if (classify) {
      labels.push_back(margin + 0.5 * noise >= 0.0 ? 1.0 : -1.0);
    } else {
      labels.push_back(margin + 0.1 * noise);
    }
  }
  return Dataset(std::move(rows), std::move(labels), d);
}

}  // namespace

Dataset::Dataset(std::vector<SparseRow> rows, std::vector<double> labels, std::size_t dim)
    : rows_(std::move(rows)), labels_(std::move(labels)), dim_(dim) {
  if (rows_.empty()) throw DataError("dataset has no rows");
  if (rows_.size() != labels_.size()) throw DataError("row and label counts differ");
  if (dim_ == 0) throw DataError("dataset dimension must be >= 1");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].min_dim() > dim_) {
      throw DataError("row " + std::to_string(i) + " has an index beyond dimension " +
                      std::to_string(dim_));
    }
    if (!std::isfinite(labels_[i])) throw DataError("label " + std::to_string(i) + " not finite");
  }
}

bool Dataset::has_binary_labels() const noexcept {
  return std::all_of(labels_.begin(), labels_.end(),
                     [](double y) { return y == 1.0 || y == -1.0; });
}

Dataset parse_libsvm(std::istream& in, const ParseOptions& options) {
  std::vector<SparseRow> rows;
  std::vector<double> labels;
  std::vector<std::size_t> label_lines;
  std::vector<double> distinct;
  std::size_t max_index = 0;
  std::size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const auto tokens = split_ws(view);
    if (tokens.empty()) continue;

    const auto label = parse_real(tokens[0]);
    if (!label) throw ParseError(line_no, "label '" + std::string(tokens[0]) + "' is not a number");
    if (options.labels == LabelMode::kBinary &&
        std::find(distinct.begin(), distinct.end(), *label) == distinct.end()) {
      distinct.push_back(*label);
      double low = 0.0, high = 0.0;
      if (distinct.size() > 2 || !binary_pair(distinct, low, high)) {
        throw ParseError(line_no, "label " + fmt17(*label) +
                                      " does not fit a binary label set {0,1}, {-1,+1} or {1,2}");
      }
    }

    std::vector<std::size_t> idx;
    std::vector<double> val;
    std::size_t prev = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto tok = tokens[k];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "feature '" + std::string(tok) + "' is not index:value");
      }
      const auto index = parse_index(tok.substr(0, colon));
      if (!index) throw ParseError(line_no, "feature index in '" + std::string(tok) + "' is invalid");
      if (*index == 0) throw ParseError(line_no, "feature indices are 1-based; got 0");
      if (*index <= prev) {
        throw ParseError(line_no, "feature index " + std::to_string(*index) +
                                      (*index == prev ? " is duplicated" : " is not increasing"));
      }
      const auto value = parse_real(tok.substr(colon + 1));
      if (!value) throw ParseError(line_no, "feature value in '" + std::string(tok) + "' is invalid");
      prev = *index;
      max_index = std::max(max_index, *index);
      if (*value == 0.0) continue;
      idx.push_back(*index - 1);
      val.push_back(*value);
    }
    rows.emplace_back(std::move(idx), std::move(val));
    labels.push_back(*label);
    label_lines.push_back(line_no);
  }
  if (in.bad()) throw DataError("read error");
  if (rows.empty()) throw ParseError(line_no, "no data lines");

  if (options.labels == LabelMode::kBinary) {
    double low = 0.0, high = 0.0;
    binary_pair(distinct, low, high);
    for (double& y : labels) y = map_binary(y, distinct, low, high);
  }

  std::size_t dim = std::max<std::size_t>(max_index, 1);
  if (options.dim) {
    if (*options.dim < max_index) {
      throw ParseError(line_no, "declared dimension " + std::to_string(*options.dim) +
                                    " is smaller than max index " + std::to_string(max_index));
    }
    dim = *options.dim;
  }
  return Dataset(std::move(rows), std::move(labels), dim);
}

Dataset parse_libsvm_string(const std::string& text, const ParseOptions& options) {
  std::istringstream in(text);
  return parse_libsvm(in, options);
}

Dataset load_libsvm(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return parse_libsvm(in, options);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << fmt17(ds.label(i));
    const auto& row = ds.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      out << ' ' << (row.indices()[k] + 1) << ':' << fmt17(row.values()[k]);
    }
    out << '\n';
  }
}

std::string to_libsvm_string(const Dataset& ds) {
  std::ostringstream out;
  write_libsvm(out, ds);
  return out.str();
}

Dataset normalize_rows(const Dataset& ds) {
  std::vector<SparseRow> rows;
  rows.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto& row = ds.row(i);
    const double norm = std::sqrt(norm_sq(row));
    if (norm == 0.0) throw DataError("cannot normalize zero row " + std::to_string(i));
    std::vector<std::size_t> idx(row.indices().begin(), row.indices().end());
    std::vector<double> val;
    val.reserve(row.nnz());
    for (double v : row.values()) val.push_back(v / norm);
    rows.emplace_back(std::move(idx), std::move(val));
  }
  return Dataset(std::move(rows), ds.labels(), ds.dim());
}

Dataset synth_ridge(std::size_t n, std::size_t d, std::uint64_t seed) {
  return synth_planted(n, d, seed, false);
}

Dataset synth_classification(std::size_t n, std::size_t d, std::uint64_t seed) {
  return synth_planted(n, d, seed, true);
}

std::uint64_t checksum(const Dataset& ds) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : to_libsvm_string(ds)) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace sarah
