#include "tvcs/experiment_spec.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvcs {

std::string to_string(SignalClass c) {
  switch (c) {
    case SignalClass::discretized_pc: return "discretized-pc";
    case SignalClass::equidistant: return "equidistant";
    case SignalClass::dense_jump: return "dense-jump";
  }
  return "unknown";
}

SignalClass parse_signal_class(const std::string& text) {
  if (text == "discretized-pc") return SignalClass::discretized_pc;
  if (text == "equidistant") return SignalClass::equidistant;
  if (text == "dense-jump") return SignalClass::dense_jump;
  throw SpecError("unknown signal class '" + text + "'");
}

std::vector<int> MRule::values_for(int n) const {
  std::vector<int> out;
  if (auto it = explicit_lists.find(n); it != explicit_lists.end()) {
    out = it->second;
  } else if (stride > 0) {
    const int last = stop == 0 ? n : stop;
    for (int m = start; m <= last; m += stride) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [n](int m) { return m > n; });
  return out;
}

void ExperimentSpec::validate() const {
  if (trials_per_cell < 1) throw SpecError("trials must be >= 1");
  if (n_list.empty()) throw SpecError("n_list must not be empty");
  for (int n : n_list)
    if (n < 2) throw SpecError("every n must be >= 2");
  if (m_rule.stride < 0) throw SpecError("m_range stride must be positive");
  if (m_rule.stride > 0 && m_rule.start < 1) throw SpecError("m_range start must be >= 1");
  for (const auto& [n, ms] : m_rule.explicit_lists)
    for (int m : ms)
      if (m < 1) throw SpecError("every m must be >= 1");
  for (int n : n_list)
    if (m_rule.values_for(n).empty()) throw SpecError("no m values for n=" + std::to_string(n));
  if (!(success_tolerance > 0.0)) throw SpecError("success_tolerance must be positive");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("solver: ") + e.what());
  }
  if (signal_class == SignalClass::discretized_pc) {
    try {
      pc.validate();
    } catch (const SignalError& e) {
      throw SpecError(e.what());
    }
  } else {
    if (s < (signal_class == SignalClass::dense_jump ? 1 : 0)) throw SpecError("s out of range");
    for (int n : n_list)
      if (s >= n) throw SpecError("s must be < n for every n");
    if (level_mode == LevelMode::explicit_levels && static_cast<int>(levels.size()) != s + 1)
      throw SpecError("explicit levels need s+1 values");
  }
}

bool ExperimentSpec::signal_varies_per_trial() const {
  return signal_class == SignalClass::equidistant && level_mode == LevelMode::per_trial;
}

Signal ExperimentSpec::signal_for(int n, std::uint64_t signal_seed) const {
  switch (signal_class) {
    case SignalClass::discretized_pc: return discretize_pc(pc, n);
    case SignalClass::dense_jump: return make_dense_jump(n, s);
    case SignalClass::equidistant:
      switch (level_mode) {
        case LevelMode::per_trial: return make_equidistant(n, s, LevelSource::seeded(signal_seed));
        case LevelMode::fixed: return make_equidistant(n, s, LevelSource::seeded(level_seed));
        case LevelMode::explicit_levels: return make_equidistant(n, s, LevelSource::fixed(levels));
      }
  }
  throw SpecError("unreachable signal class");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& text, const std::string& key) {
  long long v = 0;
  const auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw SpecError("key '" + key + "': expected an integer, got '" + t + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw SpecError("key '" + key + "': expected an unsigned integer, got '" + t + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& key) {
  const auto t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SpecError("key '" + key + "': expected a real number, got '" + t + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, key));
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<int>(parse_int(item, key)));
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const auto t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw SpecError("key '" + key + "': expected true or false");
}

}  // namespace

std::string ExperimentSpec::canonical() const {
  std::ostringstream out;
  auto ints = [](int v) { return std::to_string(v); };
  out << "[experiment]\n";
  out << "class = " << to_string(signal_class) << '\n';
  if (signal_class != SignalClass::discretized_pc) out << "s = " << s << '\n';
  out << "n_list = " << join(n_list, ints) << '\n';
  if (m_rule.stride > 0) {
    out << "m_range = " << m_rule.start << ':'
        << (m_rule.stop == 0 ? std::string("n") : std::to_string(m_rule.stop)) << ':'
        << m_rule.stride << '\n';
  }
  out << "trials = " << trials_per_cell << '\n';
  out << "master_seed = " << master_seed << '\n';
  out << "success_tolerance = " << fmt_double(success_tolerance) << '\n';
  out << "[signal]\n";
  if (signal_class == SignalClass::discretized_pc) {
    out << "breakpoints = " << join(pc.breakpoints, fmt_double) << '\n';
    out << "pc_levels = " << join(pc.levels, fmt_double) << '\n';
  } else if (signal_class == SignalClass::equidistant) {
    switch (level_mode) {
      case LevelMode::per_trial: out << "levels = per-trial\n"; break;
      case LevelMode::fixed: out << "levels = fixed\nlevel_seed = " << level_seed << '\n'; break;
      case LevelMode::explicit_levels: out << "levels = " << join(levels, fmt_double) << '\n'; break;
    }
  }
  if (!m_rule.explicit_lists.empty()) {
    out << "[m]\n";
    for (const auto& [n, ms] : m_rule.explicit_lists) out << n << " = " << join(ms, ints) << '\n';
  }
  out << "[solver]\n";
  out << "max_iterations = " << solver.max_iterations << '\n';
  out << "feasibility_tolerance = " << fmt_double(solver.feasibility_tolerance) << '\n';
  out << "convergence_tolerance = " << fmt_double(solver.convergence_tolerance) << '\n';
  out << "check_interval = " << solver.check_interval << '\n';
  out << "step_balance = " << fmt_double(solver.step_balance) << '\n';
  out << "step_product = " << fmt_double(solver.step_product) << '\n';
  out << "adaptive_steps = " << (solver.adaptive_steps ? "true" : "false") << '\n';
  return out.str();
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string section = "experiment";
  std::string raw;
  int line_no = 0;
  bool have_breakpoints = false, have_pc_levels = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw SpecError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "signal" && section != "m" && section != "solver")
        throw SpecError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (section == "experiment") {
        if (key == "class") spec.signal_class = parse_signal_class(value);
        else if (key == "s") spec.s = static_cast<int>(parse_int(value, key));
        else if (key == "n_list") spec.n_list = parse_int_list(value, key);
        else if (key == "m_range") {
          std::vector<std::string> parts;
          std::stringstream ss(value);
          std::string part;
          while (std::getline(ss, part, ':')) parts.push_back(trim(part));
          if (parts.size() != 3) throw SpecError("m_range must be start:stop:stride");
          spec.m_rule.start = static_cast<int>(parse_int(parts[0], key));
          spec.m_rule.stop = parts[1] == "n" ? 0 : static_cast<int>(parse_int(parts[1], key));
          spec.m_rule.stride = static_cast<int>(parse_int(parts[2], key));
          if (spec.m_rule.stride < 1) throw SpecError("m_range stride must be >= 1");
        } else if (key == "trials") spec.trials_per_cell = static_cast<int>(parse_int(value, key));
        else if (key == "master_seed") spec.master_seed = parse_u64(value, key);
        else if (key == "success_tolerance") spec.success_tolerance = parse_real(value, key);
        else throw SpecError("unknown key '" + key + "'");
      } else if (section == "signal") {
        if (key == "levels") {
          if (value == "per-trial") spec.level_mode = LevelMode::per_trial;
          else if (value == "fixed") spec.level_mode = LevelMode::fixed;
          else {
            spec.level_mode = LevelMode::explicit_levels;
            spec.levels = parse_real_list(value, key);
          }
        } else if (key == "level_seed") spec.level_seed = parse_u64(value, key);
        else if (key == "breakpoints") {
          spec.pc.breakpoints = parse_real_list(value, key);
          have_breakpoints = true;
        } else if (key == "pc_levels") {
          spec.pc.levels = parse_real_list(value, key);
          have_pc_levels = true;
        } else throw SpecError("unknown key '" + key + "'");
      } else if (section == "m") {
        spec.m_rule.explicit_lists[static_cast<int>(parse_int(key, "[m] n"))] = parse_int_list(value, key);
      } else {
        auto& sc = spec.solver;
        if (key == "max_iterations") sc.max_iterations = static_cast<int>(parse_int(value, key));
        else if (key == "feasibility_tolerance") sc.feasibility_tolerance = parse_real(value, key);
        else if (key == "convergence_tolerance") sc.convergence_tolerance = parse_real(value, key);
        else if (key == "check_interval") sc.check_interval = static_cast<int>(parse_int(value, key));
        else if (key == "step_balance") sc.step_balance = parse_real(value, key);
        else if (key == "step_product") sc.step_product = parse_real(value, key);
        else if (key == "adaptive_steps") sc.adaptive_steps = parse_bool(value, key);
        else throw SpecError("unknown key '" + key + "'");
      }
    } catch (const SpecError& e) {
      throw SpecError(where + e.what());
    }
  }
  if (have_breakpoints != have_pc_levels)
    throw SpecError("breakpoints and pc_levels must be given together");
  spec.validate();
  return spec;
}

ExperimentSpec parse_experiment_spec_text(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_spec(in);
}

ExperimentSpec read_experiment_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file " + path);
  return parse_experiment_spec(in);
}

}  // namespace tvcs
