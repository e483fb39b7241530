#include "sarah/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "sarah/errors.hpp"
#include "sarah/reference.hpp"
#include "sarah/rng.hpp"
#include "sarah/trace_io.hpp"

namespace sarah {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") return out = true, true;
  if (text == "false" || text == "0" || text == "no") return out = false, true;
  return false;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& text) {
  SynthSpec spec;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.size() != 3 || !parse_number(parts[0], spec.n) || !parse_number(parts[1], spec.d) ||
      !parse_number(parts[2], spec.seed) || spec.n == 0 || spec.d == 0) {
    throw ConfigError("synthetic spec must be n,d,seed with n, d >= 1, got '" + text + "'");
  }
  return spec;
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "zero") return InitMode::kZero;
  if (name == "seeded-gaussian") return InitMode::kSeededGaussian;
  throw ConfigError("unknown init '" + name + "' (expected zero or seeded-gaussian)");
}

DenseVector make_init(InitMode mode, std::size_t d, std::uint64_t seed) {
  DenseVector w(d);
  if (mode == InitMode::kSeededGaussian) {
    CounterRng rng = CounterRng(seed).split(stream::kInit);
    for (std::size_t j = 0; j < d; ++j) w[j] = rng.normal();
  }
  return w;
}

Problem build_problem(const ProblemSetup& setup) {
  if (setup.data_path.has_value() == setup.synth.has_value()) {
    throw ConfigError("give exactly one of a data file or a synthetic spec");
  }
  const bool ridge = setup.kind == ProblemKind::kRidge;
  Dataset data = [&] {
    if (setup.synth) {
      const auto& s = *setup.synth;
      return ridge ? synth_ridge(s.n, s.d, s.seed) : synth_classification(s.n, s.d, s.seed);
    }
    ParseOptions opts;
    opts.labels = ridge ? LabelMode::kRaw : LabelMode::kBinary;
    return load_libsvm(*setup.data_path, opts);
  }();
  if (setup.normalize) data = normalize_rows(data);
  const double lambda = setup.lambda.value_or(1.0 / static_cast<double>(data.n()));
  return Problem(std::move(data), setup.kind, lambda);
}

std::size_t CountExpr::resolve(std::size_t n) const {
  const double x = times_n ? value * static_cast<double>(n) : value;
  return static_cast<std::size_t>(std::llround(x));
}

CountExpr parse_count_expr(const std::string& text) {
  CountExpr e;
  std::string body = trim(text);
  if (!body.empty() && body.back() == 'n') {
    e.times_n = true;
    body.pop_back();
    if (body.empty()) body = "1";
  }
  if (!parse_number(body, e.value) || !(e.value >= 0.0) || !std::isfinite(e.value)) {
    throw ConfigError("bad count '" + text + "' (expected an integer or a multiple like 2n)");
  }
  if (!e.times_n && e.value != std::floor(e.value)) {
    throw ConfigError("count '" + text + "' must be an integer");
  }
  return e;
}

ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& source,
                                     const std::string& base_dir) {
  ExperimentSpec spec;
  std::string line;
  std::size_t line_no = 0;
  SweepMember* cur = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) { throw ParseError(line_no, what, source); };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner.rfind("run ", 0) != 0 || trim(inner.substr(4)).empty()) {
        fail("section must be [run <name>]");
      }
      spec.runs.push_back(SweepMember{});
      cur = &spec.runs.back();
      cur->name = trim(inner.substr(4));
      cur->out = resolve_path(base_dir, cur->name + ".csv");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (!cur) {
        auto& p = spec.problem;
        if (key == "data") {
          p.data_path = resolve_path(base_dir, value);
        } else if (key == "synth") {
          p.synth = parse_synth_spec(value);
        } else if (key == "kind") {
          p.kind = parse_problem_kind(value);
        } else if (key == "lambda") {
          double x;
          if (!parse_number(value, x)) fail("bad lambda '" + value + "'");
          p.lambda = x;
        } else if (key == "normalize") {
          if (!parse_bool(value, p.normalize)) fail("bad boolean '" + value + "'");
        } else if (key == "ref") {
          spec.ref_path = resolve_path(base_dir, value);
        } else if (key == "init") {
          spec.init = parse_init_mode(value);
        } else if (key == "checkpoint_every") {
          std::size_t k;
          if (!parse_number(value, k) || k == 0) fail("bad checkpoint_every '" + value + "'");
          spec.checkpoint_every = k;
        } else {
          fail("unknown key '" + key + "'");
        }
        continue;
      }
      auto& c = cur->config;
      auto real = [&] {
        double x;
        if (!parse_number(value, x)) fail("bad number '" + value + "' for " + key);
        return x;
      };
      auto count = [&] {
        std::size_t k;
        if (!parse_number(value, k)) fail("bad count '" + value + "' for " + key);
        return k;
      };
      if (key == "algo") {
        c.algo = parse_algorithm(value);
      } else if (key == "eta") {
        c.eta = real();
      } else if (key == "m") {
        cur->m = parse_count_expr(value);
      } else if (key == "S") {
        c.S = count();
      } else if (key == "batch") {
        c.b = count();
      } else if (key == "gamma") {
        c.gamma = real();
      } else if (key == "T") {
        c.T = count();
      } else if (key == "seed") {
        std::uint64_t s;
        if (!parse_number(value, s)) fail("bad seed '" + value + "'");
        c.seed = s;
      } else if (key == "theorem_mode") {
        if (!parse_bool(value, c.theorem_mode)) fail("bad boolean '" + value + "'");
      } else if (key == "max_epochs") {
        c.max_epochs = real();
      } else if (key == "output") {
        if (value == "last") {
          c.output = OutputMode::kLastIterate;
        } else if (value == "uniform") {
          c.output = OutputMode::kUniformIterate;
        } else {
          fail("output must be last or uniform");
        }
      } else if (key == "out") {
        cur->out = resolve_path(base_dir, value);
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what(), source);
    }
  }
  if (spec.runs.empty()) throw ParseError(line_no, "no [run ...] sections", source);
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_experiment_spec(in, path, std::filesystem::path(path).parent_path().string());
}

std::vector<SweepResult> run_sweep(const ExperimentSpec& spec, std::size_t jobs) {
  const Problem problem = build_problem(spec.problem);
  std::optional<ReferenceSolution> ref;
  if (spec.ref_path) ref = load_reference(*spec.ref_path, problem);

  std::vector<SweepResult> results(spec.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < spec.runs.size(); k = next++) {
      const SweepMember& member = spec.runs[k];
      SweepResult& res = results[k];
      res.name = member.name;
      res.out = member.out;
      try {
        OptimizerConfig cfg = member.config;
        if (member.m) cfg.m = member.m->resolve(problem.n());
        if (!cfg.init) cfg.init = make_init(spec.init, problem.dim(), cfg.seed);
        if (spec.checkpoint_every && !cfg.checkpoint_every) {
          cfg.checkpoint_every = spec.checkpoint_every;
        }
        save_trace_csv(member.out, run(problem, cfg, ref ? &*ref : nullptr));
        res.ok = true;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, spec.runs.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace sarah
