#include "sarah/reference.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sarah/errors.hpp"
#include "sarah/problem.hpp"

namespace sarah {
namespace {

constexpr const char* kMagic = "# sarah-reference v1";

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw DataError("reference: bad value for '" + key + "'");
  return value;
}

}  // namespace

void write_reference(std::ostream& out, const ReferenceSolution& ref, const Problem& p) {
  out << kMagic << '\n';
  out << "kind " << to_string(p.kind()) << '\n';
  out << "lambda " << fmt17(p.lambda()) << '\n';
  out << "n " << p.n() << '\n';
  out << "d " << p.dim() << '\n';
  out << "f_star " << fmt17(ref.f_star) << '\n';
  out << "grad_norm_sq " << fmt17(ref.grad_norm_sq) << '\n';
  out << "tol " << fmt17(ref.tol) << '\n';
  out << "iterations " << ref.iterations << '\n';
  out << 'w';
  for (double x : ref.w_star.values()) out << ' ' << fmt17(x);
  out << '\n';
}

void save_reference(const std::string& path, const ReferenceSolution& ref, const Problem& p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_reference(out, ref, p);
  if (!out) throw DataError("write to '" + path + "' failed");
}

ReferenceSolution read_reference(std::istream& in, const Problem& p) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError("reference: missing header '" + std::string(kMagic) + "'");
  }
  std::map<std::string, std::string> fields;
  std::vector<double> w;
  bool have_w = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "w") {
      std::string tok;
      while (ls >> tok) w.push_back(to_real("w", tok));
      have_w = true;
    } else {
      std::string value;
      ls >> value;
      fields[key] = value;
    }
  }
  for (const char* key : {"kind", "lambda", "n", "d", "f_star", "grad_norm_sq", "tol", "iterations"}) {
    if (!fields.count(key)) throw DataError(std::string("reference: missing '") + key + "'");
  }
  if (!have_w) throw DataError("reference: missing 'w'");
  if (fields["kind"] != to_string(p.kind()) || to_real("lambda", fields["lambda"]) != p.lambda() ||
      fields["n"] != std::to_string(p.n()) || fields["d"] != std::to_string(p.dim())) {
    throw DataError("reference was solved for a different problem (kind " + fields["kind"] +
                    ", lambda " + fields["lambda"] + ", n " + fields["n"] + ", d " + fields["d"] +
                    ")");
  }
  if (w.size() != p.dim()) throw DataError("reference: w has wrong length");
  ReferenceSolution ref;
  ref.w_star = DenseVector(std::move(w));
  ref.f_star = to_real("f_star", fields["f_star"]);
  ref.grad_norm_sq = to_real("grad_norm_sq", fields["grad_norm_sq"]);
  ref.tol = to_real("tol", fields["tol"]);
  ref.iterations = static_cast<std::size_t>(to_real("iterations", fields["iterations"]));
  return ref;
}

ReferenceSolution load_reference(const std::string& path, const Problem& p) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open reference '" + path + "'");
  return read_reference(in, p);
}

}  // namespace sarah
