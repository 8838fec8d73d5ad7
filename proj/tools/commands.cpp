#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tvcs/conegeom.hpp"
#include "tvcs/phaselab.hpp"
#include "tvcs/signals.hpp"
#include "tvcs/solver.hpp"

namespace tvcs::cli {

namespace {

// All real-valued stdout fields use this fixed precision.
std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct GenArgs {
  std::string signal_class;
  int n = 0;
  int s = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<double> levels;
};

struct SolveArgs {
  std::string signal;
  int m = 0;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  int max_iterations = SolverConfig{}.max_iterations;
};

struct WidthArgs {
  std::string signal;
  int samples = 200;
  std::uint64_t seed = 0;
  double inner_tolerance = 1e-8;
  int workers = 1;
  std::string csv;
};

struct BoundArgs {
  int n = 0;
  int s = 0;
  double delta = 1.0;
  double u = 0.0;
  double constant = 1.0;
};

struct PhaseArgs {
  std::string spec;
  std::string out;
  int workers = 1;
};

struct PlotArgs {
  std::string grid;
  std::string out;
  std::string overlay_width;
  double overlay_bound = -1.0;
  double bound_u = 0.0;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  Signal sig;
  const SignalClass c = parse_signal_class(a.signal_class);
  switch (c) {
    case SignalClass::equidistant:
      sig = make_equidistant(a.n, a.s, a.levels.empty() ? LevelSource::seeded(a.seed)
                                                        : LevelSource::fixed(a.levels));
      break;
    case SignalClass::dense_jump: sig = make_dense_jump(a.n, a.s); break;
    case SignalClass::discretized_pc: sig = discretize_pc(reference_pc_spec(), a.n); break;
  }
  sig.seed = a.seed;
  write_signal_file(a.out, sig);
  out << "class=" << to_string(c) << " n=" << sig.n() << " s=" << sig.s()
      << " delta_max=" << fixed(sig.delta_max) << " out=" << a.out << '\n';
  return 0;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Signal sig = read_signal_file(a.signal);
  const auto ens = sample_gaussian_matrix(a.m, sig.n(), a.seed);
  const Vector y = ens.entries * sig.values;
  SolverConfig config;
  config.max_iterations = a.max_iterations;
  const SolveResult res = solve_tv(ens.entries, y, config);
  const bool recovered =
      res.status == SolveStatus::converged && check_recovery(res.x_hat, sig.values, a.tol);
  const double rel_error = (res.x_hat - sig.values).norm() / std::max(1.0, sig.values.norm());
  out << "n=" << sig.n() << " m=" << a.m << " seed=" << a.seed << " status=" << to_string(res.status)
      << " iterations=" << res.iterations << " objective=" << fixed(res.objective)
      << " residual=" << fixed(res.feasibility_residual) << " relative_error=" << fixed(rel_error)
      << " recovered=" << (recovered ? "true" : "false") << '\n';
  return 0;
}

int cmd_width(const WidthArgs& a, std::ostream& out) {
  const Signal sig = read_signal_file(a.signal);
  const auto est = estimate_statistical_dimension(sig, a.samples, a.seed, a.inner_tolerance, a.workers);
  out << "delta_hat=" << fixed(est.delta_hat) << " standard_error=" << fixed(est.standard_error)
      << " num_samples=" << est.num_samples << " discarded=" << est.discarded
      << " plain_mean=" << fixed(est.plain_mean) << '\n';
  if (!a.csv.empty()) {
    const bool fresh = !std::filesystem::exists(a.csv) || std::filesystem::file_size(a.csv) == 0;
    std::ofstream csv(a.csv, std::ios::app | std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + a.csv + " for appending");
    if (fresh) csv << "n,s,delta_hat,standard_error,num_samples,seed\n";
    csv << sig.n() << ',' << sig.s() << ',' << fixed(est.delta_hat) << ',' << fixed(est.standard_error)
        << ',' << est.num_samples << ',' << a.seed << '\n';
  }
  return 0;
}

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const auto rate = theoretical_rate(a.n, a.s, a.delta, a.u, a.constant);
  out << "m=" << fixed(rate.m) << " hypothesis=" << (rate.hypothesis_holds ? "ok" : "violated") << '\n';
  return 0;
}

int cmd_phase(const PhaseArgs& a, std::ostream& out) {
  const ExperimentSpec spec = read_experiment_spec_file(a.spec);
  const PhaseGrid grid = run_phase_grid(spec, a.workers);
  write_grid_csv(grid, a.out);
  int trials = 0;
  for (const auto& c : grid.cells) trials += c.trials;
  out << "cells=" << grid.cells.size() << " trials=" << trials
      << " numerical_failures=" << grid.numerical_failures
      << " iteration_limits=" << grid.iteration_limits << " out=" << a.out << '\n';
  for (int n : grid.dimensions()) {
    const auto t = transition_location(grid, n);
    out << "n=" << n << " m_star=" << fixed(t.m_star) << " boundary=" << (t.boundary() ? "true" : "false")
        << '\n';
  }
  return 0;
}

std::vector<std::pair<int, double>> read_width_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,s,delta_hat", 0) != 0)
    throw std::runtime_error(path + ": expected width CSV header");
  std::vector<std::pair<int, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string n, s, d;
    if (!std::getline(ss, n, ',') || !std::getline(ss, s, ',') || !std::getline(ss, d, ','))
      throw std::runtime_error(path + ": malformed width row");
    pts.emplace_back(std::stoi(n), std::stod(d));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  const PhaseGrid grid = read_grid_csv(a.grid);
  HeatmapOverlays overlays;
  if (!a.overlay_width.empty()) overlays.width_curve = read_width_csv(a.overlay_width);
  if (a.overlay_bound >= 0.0) {
    if (grid.spec_echo.empty()) throw std::runtime_error("--overlay-bound needs a grid with a spec echo");
    const ExperimentSpec spec = parse_experiment_spec_text(grid.spec_echo);
    for (int n : grid.dimensions()) {
      const Signal sig = spec.signal_for(n, 0);
      if (sig.s() < 1) continue;
      overlays.bound_curve.emplace_back(
          n, theoretical_rate(n, sig.s(), sig.delta_max, a.bound_u, a.overlay_bound).m);
    }
  }
  render_heatmap_svg(grid, overlays, a.out);
  out << "cells=" << grid.cells.size() << " out=" << a.out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total-variation recovery of gradient-sparse signals", "tvcs"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a signal file");
  gen_cmd->add_option("--class", gen.signal_class, "equidistant | dense-jump | discretized-pc")
      ->required()
      ->check(CLI::IsMember({"equidistant", "dense-jump", "discretized-pc"}));
  gen_cmd->add_option("--n", gen.n, "Ambient dimension")->required()->check(CLI::Range(2, 1 << 24));
  gen_cmd->add_option("--s", gen.s, "Number of jumps (ignored for discretized-pc)");
  gen_cmd->add_option("--seed", gen.seed, "Seed for random levels");
  gen_cmd->add_option("--levels", gen.levels, "Explicit levels (s+1 values)")->delimiter(',');
  gen_cmd->add_option("--out", gen.out, "Output signal file")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Measure a signal and recover it by TV minimization");
  solve_cmd->add_option("--signal", solve.signal, "Signal file")->required();
  solve_cmd->add_option("--m", solve.m, "Number of measurements")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve.seed, "Measurement matrix seed")->required();
  solve_cmd->add_option("--tol", solve.tol, "Relative l2 recovery tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iterations", solve.max_iterations)->check(CLI::PositiveNumber);

  WidthArgs width;
  auto* width_cmd = app.add_subcommand("width", "Estimate the statistical dimension of the descent cone");
  width_cmd->add_option("--signal", width.signal, "Signal file")->required();
  width_cmd->add_option("--samples", width.samples, "Gaussian samples")->check(CLI::Range(2, 100000000));
  width_cmd->add_option("--seed", width.seed, "Sampling seed")->required();
  width_cmd->add_option("--inner-tol", width.inner_tolerance)->check(CLI::PositiveNumber);
  width_cmd->add_option("--workers", width.workers)->check(CLI::Range(1, 1024));
  width_cmd->add_option("--csv", width.csv, "Append a result row to this CSV");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate C (s log^2 n / delta + u^2)");
  bound_cmd->add_option("--n", bound.n)->required()->check(CLI::Range(2, 1 << 30));
  bound_cmd->add_option("--s", bound.s)->required()->check(CLI::PositiveNumber);
  bound_cmd->add_option("--delta", bound.delta)->required()->check(CLI::PositiveNumber);
  bound_cmd->add_option("--u", bound.u)->required();
  bound_cmd->add_option("--C", bound.constant)->required()->check(CLI::NonNegativeNumber);

  PhaseArgs phase;
  auto* phase_cmd = app.add_subcommand("phase", "Run a phase-transition experiment");
  phase_cmd->add_option("--spec", phase.spec, "Experiment spec file")->required();
  phase_cmd->add_option("--out", phase.out, "Output grid CSV")->required();
  phase_cmd->add_option("--workers", phase.workers)->check(CLI::Range(1, 1024));

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a phase grid as an SVG heat map");
  plot_cmd->add_option("--grid", plot.grid, "Grid CSV")->required();
  plot_cmd->add_option("--out", plot.out, "Output SVG")->required();
  plot_cmd->add_option("--overlay-width", plot.overlay_width, "Width CSV written by `width --csv`");
  plot_cmd->add_option("--overlay-bound", plot.overlay_bound, "Draw the rate curve with this constant C")
      ->check(CLI::NonNegativeNumber);
  plot_cmd->add_option("--bound-u", plot.bound_u, "u for the rate curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return 2;
  }

  try {
    if (*gen_cmd) {
      if (gen.signal_class != "discretized-pc" && gen_cmd->count("--s") == 0)
        throw CLI::RequiredError("--s");
      return cmd_gen(gen, out);
    }
    if (*solve_cmd) return cmd_solve(solve, out);
    if (*width_cmd) return cmd_width(width, out);
    if (*bound_cmd) return cmd_bound(bound, out);
    if (*phase_cmd) return cmd_phase(phase, out);
    if (*plot_cmd) return cmd_plot(plot, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("tvcs");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tvcs::cli
