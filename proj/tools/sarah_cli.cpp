// Command-line front end: estimate-l, solve-ref, run, sweep, verify, plot.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sarah/errors.hpp"
#include "sarah/experiment.hpp"
#include "sarah/oracle.hpp"
#include "sarah/reference.hpp"
#include "sarah/svg_plot.hpp"
#include "sarah/trace_io.hpp"
#include "sarah/verify_suites.hpp"

namespace {

using namespace sarah;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct ProblemFlags {
  std::string data;
  std::string synth;
  std::string kind = "logistic-l2";
  double lambda = 0.0;
  bool normalize = false;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* data_opt = nullptr;
  CLI::Option* synth_opt = nullptr;

  void attach(CLI::App* app) {
    data_opt = app->add_option("--data", data, "LIBSVM data file");
    synth_opt = app->add_option("--synth", synth, "synthetic data n,d,seed")->excludes(data_opt);
    app->add_option("--kind", kind, "logistic-l2 | ridge | logistic-nonconvex-reg")
        ->capture_default_str();
    lambda_opt = app->add_option("--lambda", lambda, "regularization (default 1/n)");
    app->add_flag("--normalize", normalize, "scale rows to unit norm");
  }

  ProblemSetup setup() const {
    ProblemSetup s;
    if (data_opt->count() > 0) s.data_path = data;
    if (synth_opt->count() > 0) s.synth = parse_synth_spec(synth);
    if (!s.data_path && !s.synth) throw ConfigError("one of --data or --synth is required");
    s.kind = parse_problem_kind(kind);
    if (lambda_opt->count() > 0) s.lambda = lambda;
    s.normalize = normalize;
    return s;
  }
};

// Writes to `path`, or to stdout when it is empty or "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write(out);
  if (!out) throw DataError("write failed: " + path);
}

int cmd_estimate_l(const ProblemFlags& flags) {
  const Problem p = build_problem(flags.setup());
  const SmoothnessInfo sm = p.smoothness();
  std::cout << "kind " << to_string(p.kind()) << '\n'
            << "n " << p.n() << '\n'
            << "d " << p.dim() << '\n'
            << "lambda " << fmt17(p.lambda()) << '\n'
            << "L " << fmt17(sm.L) << '\n'
            << "mu " << fmt17(sm.mu) << '\n'
            << "kappa " << (sm.kappa ? fmt17(*sm.kappa) : "none") << '\n';
  return 0;
}

int cmd_solve_ref(const ProblemFlags& flags, double tol, const std::string& out) {
  const Problem p = build_problem(flags.setup());
  const ReferenceSolution ref = solve_reference(p, tol);
  with_output(out, [&](std::ostream& os) { write_reference(os, ref, p); });
  std::cerr << "f_star " << fmt17(ref.f_star) << " grad_norm_sq " << fmt17(ref.grad_norm_sq)
            << " iterations " << ref.iterations << '\n';
  return 0;
}

struct RunFlags {
  std::string algo = "sarah";
  double eta = 0.0;
  std::string m = "0";
  std::size_t S = 1;
  std::size_t batch = 1;
  double gamma = 0.0;
  std::size_t T = 0;
  bool theorem_mode = false;
  std::uint64_t seed = 0;
  std::string init = "zero";
  std::size_t checkpoint_every = 0;
  double max_epochs = 0.0;
  std::string output = "last";
  std::string ref;
  std::string out;
  CLI::Option* eta_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* checkpoint_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
};

int cmd_run(const ProblemFlags& flags, const RunFlags& rf) {
  const ProblemSetup setup = flags.setup();
  OptimizerConfig cfg;
  cfg.algo = parse_algorithm(rf.algo);
  if (rf.eta_opt->count() > 0) cfg.eta = rf.eta;
  if (rf.gamma_opt->count() > 0) cfg.gamma = rf.gamma;
  if (rf.checkpoint_opt->count() > 0) cfg.checkpoint_every = rf.checkpoint_every;
  if (rf.epochs_opt->count() > 0) cfg.max_epochs = rf.max_epochs;
  cfg.S = rf.S;
  cfg.b = rf.batch;
  cfg.T = rf.T;
  cfg.seed = rf.seed;
  cfg.theorem_mode = rf.theorem_mode;
  if (rf.output == "uniform") {
    cfg.output = OutputMode::kUniformIterate;
  } else if (rf.output != "last") {
    throw ConfigError("--output must be last or uniform");
  }
  const CountExpr m = parse_count_expr(rf.m);
  const InitMode init = parse_init_mode(rf.init);

  const Problem p = build_problem(setup);
  cfg.m = m.resolve(p.n());
  cfg.init = make_init(init, p.dim(), rf.seed);
  // Surface config errors before loading the reference or running anything.
  resolve_config(p, cfg);
  std::optional<ReferenceSolution> ref;
  if (!rf.ref.empty()) ref = load_reference(rf.ref, p);

  const RunTrace trace = run(p, cfg, ref ? &*ref : nullptr);
  with_output(rf.out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  return 0;
}

int cmd_sweep(const std::string& spec_path, std::size_t jobs) {
  const ExperimentSpec spec = load_experiment_spec(spec_path);
  const auto results = run_sweep(spec, jobs);
  int code = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::cout << "ok " << r.name << ' ' << r.out << '\n';
    } else {
      std::cerr << "error " << r.name << ": " << r.error << '\n';
      code = kExitUsage;
    }
  }
  return code;
}

int cmd_verify(const std::string& suite, std::uint64_t budget, std::size_t jobs, bool no_mc) {
  if (!is_known_suite(suite)) {
    std::cerr << "error: unknown suite '" << suite << "'; expected one of:";
    for (const auto& s : suite_names()) std::cerr << ' ' << s;
    std::cerr << '\n';
    return kExitUsage;
  }
  VerifyOptions opt;
  opt.budget = budget;
  opt.jobs = jobs;
  opt.monte_carlo = !no_mc;
  std::size_t pass = 0, fail = 0, skip = 0;
  run_suite(suite, opt, [&](const CheckReport& r) {
    std::cout << r.line() << '\n' << std::flush;
    (r.status == CheckStatus::kPass ? pass : r.status == CheckStatus::kFail ? fail : skip)++;
  });
  std::cerr << "pass " << pass << " fail " << fail << " skip " << skip << '\n';
  return fail == 0 ? 0 : kExitVerify;
}

int cmd_plot(const std::vector<std::string>& traces, const std::vector<std::string>& labels,
             const std::string& title, const std::string& out) {
  if (!labels.empty() && labels.size() != traces.size()) {
    throw ConfigError("--label must be given once per trace");
  }
  std::vector<TraceSeries> series;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    series.push_back(load_trace_csv(traces[k]));
    if (!labels.empty()) series.back().label = labels[k];
  }
  PlotOptions opt;
  if (!title.empty()) opt.title = title;
  const std::string svg = render_svg(series, opt);
  with_output(out, [&](std::ostream& os) { os << svg; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SARAH-family optimizers: runs, reference solves, verification and plots"};
  app.require_subcommand(1);

  ProblemFlags est_flags, ref_flags, run_flags;

  auto* est = app.add_subcommand("estimate-l", "print n, d, L, mu and kappa of a problem");
  est_flags.attach(est);

  auto* solve = app.add_subcommand("solve-ref", "solve a convex problem to tolerance by GD");
  ref_flags.attach(solve);
  double tol = kReferenceTol;
  std::string ref_out;
  solve->add_option("--tol", tol, "stop when ||grad F||^2 <= tol")->capture_default_str();
  solve->add_option("--out", ref_out, "reference file (default stdout)");

  auto* runc = app.add_subcommand("run", "run one optimizer and write its trace CSV");
  run_flags.attach(runc);
  RunFlags rf;
  runc->add_option("--algo", rf.algo, "sarah | sarah-plus | sarah-pp | sarah-adaptive | gd")
      ->capture_default_str();
  rf.eta_opt = runc->add_option("--eta", rf.eta, "step size");
  runc->add_option("--m", rf.m, "inner loop size, a count or a multiple of n such as 2n")
      ->capture_default_str();
  runc->add_option("--S", rf.S, "outer loops (steps for gd)")->capture_default_str();
  runc->add_option("--batch", rf.batch, "mini-batch size b")->capture_default_str();
  rf.gamma_opt = runc->add_option("--gamma", rf.gamma, "stopping ratio");
  runc->add_option("--T", rf.T, "sarah-pp iteration budget")->capture_default_str();
  runc->add_flag("--theorem-mode", rf.theorem_mode, "enforce or derive the theorem step size");
  runc->add_option("--seed", rf.seed, "sampling seed")->capture_default_str();
  runc->add_option("--init", rf.init, "zero | seeded-gaussian")->capture_default_str();
  rf.checkpoint_opt =
      runc->add_option("--checkpoint-every", rf.checkpoint_every, "inner steps per checkpoint");
  rf.epochs_opt = runc->add_option("--max-epochs", rf.max_epochs, "stop after this many passes");
  runc->add_option("--output", rf.output, "last | uniform")->capture_default_str();
  runc->add_option("--ref", rf.ref, "reference solution file (adds the subopt column)");
  runc->add_option("--out", rf.out, "trace CSV (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "run every configuration of a sweep file");
  std::string spec_path;
  std::size_t sweep_jobs = 1;
  sweep->add_option("--spec", spec_path, "sweep file")->required();
  sweep->add_option("--jobs", sweep_jobs, "parallel runs")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "check lemma and theorem bounds by enumeration");
  std::string suite;
  std::uint64_t budget = kDefaultPathBudget;
  std::size_t verify_jobs = 1;
  bool no_mc = false;
  verify->add_option("--suite", suite, "suite name or all")->required();
  verify->add_option("--budget", budget, "enumeration path budget")->capture_default_str();
  verify->add_option("--jobs", verify_jobs, "Monte-Carlo threads")->capture_default_str();
  verify->add_flag("--no-monte-carlo", no_mc, "skip the n = 100 Monte-Carlo instances");

  auto* plot = app.add_subcommand("plot", "plot log suboptimality of trace CSVs as SVG");
  std::vector<std::string> traces, labels;
  std::string title, plot_out;
  plot->add_option("traces", traces, "trace CSV files")->required();
  plot->add_option("--label", labels, "legend label per trace");
  plot->add_option("--title", title, "chart title");
  plot->add_option("--out", plot_out, "SVG file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (est->parsed()) return cmd_estimate_l(est_flags);
    if (solve->parsed()) return cmd_solve_ref(ref_flags, tol, ref_out);
    if (runc->parsed()) return cmd_run(run_flags, rf);
    if (sweep->parsed()) return cmd_sweep(spec_path, sweep_jobs);
    if (verify->parsed()) return cmd_verify(suite, budget, verify_jobs, no_mc);
    if (plot->parsed()) return cmd_plot(traces, labels, title, plot_out);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ReferenceNotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NonFiniteError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
