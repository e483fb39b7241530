#include "sarah/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sarah/errors.hpp"

namespace sarah {
namespace {

void put_real(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out << buf;
}

void put_optional(std::ostream& out, const std::optional<double>& x) {
  if (x) put_real(out, *x);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  bool with_subopt = !trace.records.empty();
  for (const auto& r : trace.records) with_subopt = with_subopt && r.subopt.has_value();

  out << "grad_evals,epoch,outer_s,inner_t,f_val";
  if (with_subopt) out << ",subopt";
  out << ",grad_norm_sq,v_norm_sq,eta_used\n";
  for (const auto& r : trace.records) {
    out << r.grad_evals << ',';
    put_real(out, r.epoch);
    out << ',' << r.outer_s << ',' << r.inner_t << ',';
    put_real(out, r.f_val);
    if (with_subopt) {
      out << ',';
      put_real(out, *r.subopt);
    }
    out << ',';
    put_optional(out, r.grad_norm_sq);
    out << ',';
    put_optional(out, r.v_norm_sq);
    out << ',';
    put_real(out, r.eta_used);
    out << '\n';
  }
  if (trace.algo == Algorithm::kSarahPlus || trace.algo == Algorithm::kSarahPlusPlus ||
      trace.algo == Algorithm::kSarahAdaptive) {
    out << "# Ts=";
    for (std::size_t k = 0; k < trace.realized_Ts.size(); ++k) {
      if (k > 0) out << ',';
      out << trace.realized_Ts[k];
    }
    out << "\n# S=" << trace.realized_S << '\n';
  }
}

std::string trace_csv_string(const RunTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

void save_trace_csv(const std::string& path, const RunTrace& trace) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_trace_csv(out, trace);
  if (!out) throw DataError("write failed: " + path);
}

TraceSeries read_trace_csv(std::istream& in, const std::string& source) {
  TraceSeries series;
  series.label = std::filesystem::path(source).stem().string();
  std::string line;
  std::size_t line_no = 0;
  std::size_t epoch_col = 0, subopt_col = 0, width = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (!have_header) {
      bool found_epoch = false, found_subopt = false;
      for (std::size_t k = 0; k < fields.size(); ++k) {
        if (fields[k] == "epoch") epoch_col = k, found_epoch = true;
        if (fields[k] == "subopt") subopt_col = k, found_subopt = true;
      }
      if (!found_epoch) throw ParseError(line_no, "no epoch column", source);
      if (!found_subopt) {
        throw DataError(source + ": trace has no subopt column (run with --ref)");
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields", source);
    }
    auto number = [&](const std::string& text) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(line_no, "bad number '" + text + "'", source);
      }
      return x;
    };
    series.epoch.push_back(number(fields[epoch_col]));
    series.subopt.push_back(number(fields[subopt_col]));
  }
  if (!have_header) throw DataError(source + ": empty trace");
  return series;
}

TraceSeries load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_trace_csv(in, path);
}

}  // namespace sarah
