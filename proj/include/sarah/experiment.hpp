#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sarah/dataset.hpp"
#include "sarah/optimizer.hpp"
#include "sarah/problem.hpp"

namespace sarah {

struct SynthSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

// "n,d,seed"; throws ConfigError.
SynthSpec parse_synth_spec(const std::string& text);

enum class InitMode { kZero, kSeededGaussian };

InitMode parse_init_mode(const std::string& name);

// Zero vector, or d standard normals from the seed's init stream.
DenseVector make_init(InitMode mode, std::size_t d, std::uint64_t seed);

struct ProblemSetup {
  std::optional<std::string> data_path;
  std::optional<SynthSpec> synth;
  ProblemKind kind = ProblemKind::kLogisticL2;
  // 1/n when unset.
  std::optional<double> lambda;
  bool normalize = false;
};

// Ridge keeps raw labels; the logistic kinds map binary labels to {-1,+1}.
// Synthetic data is synth_ridge for ridge and synth_classification otherwise.
Problem build_problem(const ProblemSetup& setup);

// An inner-loop size given either as a count or as a multiple of n ("2n", "0.5n").
struct CountExpr {
  double value = 0.0;
  bool times_n = false;

  std::size_t resolve(std::size_t n) const;
};

CountExpr parse_count_expr(const std::string& text);

struct SweepMember {
  std::string name;
  OptimizerConfig config;
  std::optional<CountExpr> m;
  std::string out;
};

struct ExperimentSpec {
  ProblemSetup problem;
  std::optional<std::string> ref_path;
  InitMode init = InitMode::kZero;
  std::optional<std::size_t> checkpoint_every;
  std::vector<SweepMember> runs;
};

// Line-oriented sweep file. Global "key = value" lines come first, then one
// "[run <name>]" section per configuration. '#' starts a comment.
//   global keys: data, synth, kind, lambda, normalize, ref, init, checkpoint_every
//   run keys:    algo, eta, m, S, batch, gamma, T, seed, theorem_mode,
//                max_epochs, output, out
// Relative paths are resolved against base_dir. Throws ParseError.
ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& source,
                                     const std::string& base_dir = "");
ExperimentSpec load_experiment_spec(const std::string& path);

struct SweepResult {
  std::string name;
  std::string out;
  bool ok = false;
  std::string error;
};

// Runs every member, up to `jobs` at a time, each writing its own trace CSV.
// Config errors are caught per member and reported in the result.
std::vector<SweepResult> run_sweep(const ExperimentSpec& spec, std::size_t jobs);

}  // namespace sarah
