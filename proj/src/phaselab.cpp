#include "tvcs/phaselab.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tvcs/parallel.hpp"
#include "tvcs/rng.hpp"

namespace tvcs {

std::vector<PhaseCell> PhaseGrid::column(int n) const {
  std::vector<PhaseCell> out;
  for (const auto& c : cells)
    if (c.n == n) out.push_back(c);
  std::sort(out.begin(), out.end(), [](const PhaseCell& a, const PhaseCell& b) { return a.m < b.m; });
  return out;
}

std::vector<int> PhaseGrid::dimensions() const {
  std::vector<int> ns;
  for (const auto& c : cells) ns.push_back(c.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int n, int m, int trial) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(trial)});
}
std::uint64_t trial_signal_seed(std::uint64_t seed) { return derive_seed(seed, {1}); }
std::uint64_t trial_matrix_seed(std::uint64_t seed) { return derive_seed(seed, {2}); }

TrialOutcome run_trial(const ExperimentSpec& spec, int n, int m, int trial) {
  const std::uint64_t seed = trial_seed(spec.master_seed, n, m, trial);
  const Signal signal = spec.signal_for(n, trial_signal_seed(seed));
  const auto ens = sample_gaussian_matrix(m, n, trial_matrix_seed(seed));
  const Vector y = ens.entries * signal.values;
  const SolveResult res = solve_tv(ens.entries, y, spec.solver);
  TrialOutcome out;
  out.status = res.status;
  out.success = res.status == SolveStatus::converged &&
                check_recovery(res.x_hat, signal.values, spec.success_tolerance);
  return out;
}

PhaseGrid run_phase_grid(const ExperimentSpec& spec, int workers) {
  spec.validate();
  struct Item {
    int n, m, trial;
    std::size_t cell;
  };
  PhaseGrid grid;
  grid.spec_echo = spec.canonical();
  std::vector<int> ns = spec.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<Item> items;
  for (int n : ns) {
    for (int m : spec.m_rule.values_for(n)) {
      grid.cells.push_back({n, m, spec.trials_per_cell, 0});
      for (int t = 0; t < spec.trials_per_cell; ++t) items.push_back({n, m, t, grid.cells.size() - 1});
    }
  }
  std::vector<TrialOutcome> outcomes(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) {
    outcomes[i] = run_trial(spec, items[i].n, items[i].m, items[i].trial);
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (outcomes[i].success) ++grid.cells[items[i].cell].successes;
    if (outcomes[i].status == SolveStatus::numerical_failure) ++grid.numerical_failures;
    if (outcomes[i].status == SolveStatus::iteration_limit) ++grid.iteration_limits;
  }
  return grid;
}

TransitionEstimate transition_location(const PhaseGrid& grid, int n) {
  const auto col = grid.column(n);
  if (col.empty()) throw std::invalid_argument("transition_location: no cells for n=" + std::to_string(n));
  TransitionEstimate est;
  if (col.front().fraction() >= 0.5) {
    est.m_star = col.front().m;
    est.kind = TransitionKind::starts_above;
    return est;
  }
  for (std::size_t i = 1; i < col.size(); ++i) {
    const double f1 = col[i].fraction();
    if (f1 >= 0.5) {
      const double f0 = col[i - 1].fraction();
      const double t = (0.5 - f0) / (f1 - f0);
      est.m_star = col[i - 1].m + t * (col[i].m - col[i - 1].m);
      return est;
    }
  }
  est.m_star = col.back().m;
  est.kind = TransitionKind::never_reached;
  return est;
}

namespace {

constexpr const char* kMagic = "# tvcs phase grid";
constexpr const char* kHeader = "n,m,trials,successes";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

int parse_field(const std::string& text, const std::string& what, int line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0 || v > 1'000'000'000) throw std::invalid_argument(what);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw GridFormatError("grid csv line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
  }
}

}  // namespace

void write_grid_csv(std::ostream& out, const PhaseGrid& grid) {
  std::vector<PhaseCell> cells = grid.cells;
  std::sort(cells.begin(), cells.end(), [](const PhaseCell& a, const PhaseCell& b) {
    return std::pair(a.n, a.m) < std::pair(b.n, b.m);
  });
  out << kMagic << '\n';
  out << "# numerical_failures=" << grid.numerical_failures << '\n';
  out << "# iteration_limits=" << grid.iteration_limits << '\n';
  if (!grid.spec_echo.empty()) {
    out << "# spec_checksum=" << hex64(fnv1a64(grid.spec_echo)) << '\n';
    std::istringstream echo(grid.spec_echo);
    std::string line;
    while (std::getline(echo, line)) out << "# spec: " << line << '\n';
  }
  out << kHeader << '\n';
  for (const auto& c : cells) out << c.n << ',' << c.m << ',' << c.trials << ',' << c.successes << '\n';
}

void write_grid_csv(const PhaseGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_grid_csv(out, grid);
  if (!out) throw std::runtime_error("write failed: " + path);
}

PhaseGrid read_grid_csv(std::istream& in) {
  PhaseGrid grid;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::optional<std::string> checksum;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line == kHeader) {
        header_seen = true;
      } else if (starts_with(line, "# spec: ")) {
        grid.spec_echo += line.substr(8) + '\n';
      } else if (starts_with(line, "# spec_checksum=")) {
        checksum = line.substr(16);
      } else if (starts_with(line, "# numerical_failures=")) {
        grid.numerical_failures = parse_field(line.substr(21), "numerical_failures", line_no);
      } else if (starts_with(line, "# iteration_limits=")) {
        grid.iteration_limits = parse_field(line.substr(19), "iteration_limits", line_no);
      } else if (starts_with(line, "#") || line.empty()) {
        continue;
      } else {
        throw GridFormatError("grid csv: missing header `" + std::string(kHeader) + "`");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4)
      throw GridFormatError("grid csv line " + std::to_string(line_no) + ": expected 4 fields");
    PhaseCell c{parse_field(fields[0], "n", line_no), parse_field(fields[1], "m", line_no),
                parse_field(fields[2], "trials", line_no), parse_field(fields[3], "successes", line_no)};
    if (c.successes > c.trials)
      throw GridFormatError("grid csv line " + std::to_string(line_no) + ": successes exceed trials");
    grid.cells.push_back(c);
  }
  if (!header_seen) throw GridFormatError("grid csv: missing header `" + std::string(kHeader) + "`");
  if (!grid.spec_echo.empty()) {
    if (!checksum) throw GridFormatError("grid csv: spec echo without checksum");
    if (*checksum != hex64(fnv1a64(grid.spec_echo)))
      throw GridFormatError("grid csv: spec echo checksum mismatch");
  } else if (checksum) {
    throw GridFormatError("grid csv: checksum without spec echo");
  }
  std::sort(grid.cells.begin(), grid.cells.end(), [](const PhaseCell& a, const PhaseCell& b) {
    return std::pair(a.n, a.m) < std::pair(b.n, b.m);
  });
  return grid;
}

PhaseGrid read_grid_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_grid_csv(in);
}

}  // namespace tvcs
