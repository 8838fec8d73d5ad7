#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "../tools/commands.hpp"
#include "tvcs/phaselab.hpp"
#include "tvcs/signals.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = tvcs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> key_values(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("bound evaluates the rate formula") {
  const Outcome r = cli({"bound", "--n", "256", "--s", "5", "--delta", "1", "--u", "0", "--C", "1"});
  CHECK(r.code == 0);
  const auto kv = key_values(r.out);
  CHECK(std::stod(kv.at("m")) == doctest::Approx(153.7).epsilon(0.1 / 153.7));
  CHECK(kv.at("hypothesis") == "ok");
  const Outcome v = cli({"bound", "--n", "256", "--s", "5", "--delta", "0.01", "--u", "0", "--C", "1"});
  CHECK(key_values(v.out).at("hypothesis") == "violated");
}

TEST_CASE("gen then solve with m = n recovers the signal") {
  TempDir dir("tvcs_cli_gen_solve");
  const Outcome g = cli({"gen", "--class", "equidistant", "--n", "12", "--s", "2", "--seed", "1", "--out",
                         dir / "sig.txt"});
  REQUIRE(g.code == 0);
  const tvcs::Signal sig = tvcs::read_signal_file(dir / "sig.txt");
  CHECK(sig.n() == 12);
  CHECK(sig.s() == 2);
  const Outcome s = cli({"solve", "--signal", dir / "sig.txt", "--m", "12", "--seed", "2"});
  CHECK(s.code == 0);
  const auto kv = key_values(s.out);
  CHECK(kv.at("recovered") == "true");
  CHECK(kv.at("status") == "converged");
  CHECK(kv.at("n") == "12");
}

TEST_CASE("gen for the other classes") {
  TempDir dir("tvcs_cli_gen_classes");
  CHECK(cli({"gen", "--class", "dense-jump", "--n", "20", "--s", "3", "--out", dir / "d.txt"}).code == 0);
  CHECK(tvcs::read_signal_file(dir / "d.txt").s() == 3);
  CHECK(cli({"gen", "--class", "discretized-pc", "--n", "40", "--out", dir / "p.txt"}).code == 0);
  CHECK(tvcs::read_signal_file(dir / "p.txt").n() == 40);
  CHECK(cli({"gen", "--class", "equidistant", "--n", "10", "--s", "1", "--levels", "0,2", "--out",
             dir / "l.txt"})
            .code == 0);
  CHECK(tvcs::read_signal_file(dir / "l.txt").values(9) == 2.0);
}

TEST_CASE("flag and runtime errors") {
  SUBCASE("unknown flag is a usage error") {
    const Outcome r = cli({"bound", "--n", "256", "--bogus", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
  }
  SUBCASE("missing required flag") {
    CHECK(cli({"solve", "--m", "4", "--seed", "1"}).code == 2);
    CHECK(cli({"gen", "--class", "equidistant", "--n", "12", "--out", "x.txt"}).code == 2);
  }
  SUBCASE("bad values") {
    CHECK(cli({"bound", "--n", "abc", "--s", "5", "--delta", "1", "--u", "0", "--C", "1"}).code == 2);
    CHECK(cli({"bound", "--n", "256", "--s", "5", "--delta", "-1", "--u", "0", "--C", "1"}).code == 2);
  }
  SUBCASE("no subcommand") { CHECK(cli({}).code == 2); }
  SUBCASE("missing input file") {
    const Outcome r = cli({"solve", "--signal", "/nonexistent/sig.txt", "--m", "4", "--seed", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  SUBCASE("invalid gen arguments") {
    CHECK(cli({"gen", "--class", "equidistant", "--n", "12", "--s", "20", "--out", "/tmp/tvcs_bad.txt"}).code ==
          1);
  }
  SUBCASE("help") { CHECK(cli({"--help"}).code == 0); }
}

TEST_CASE("width prints an estimate and appends CSV rows") {
  TempDir dir("tvcs_cli_width");
  REQUIRE(cli({"gen", "--class", "equidistant", "--n", "30", "--s", "2", "--seed", "3", "--out",
               dir / "sig.txt"})
              .code == 0);
  const std::vector<std::string> args{"width",  "--signal", dir / "sig.txt", "--samples", "40",
                                      "--seed", "5",        "--csv",         dir / "w.csv"};
  const Outcome a = cli(args);
  REQUIRE(a.code == 0);
  const auto kv = key_values(a.out);
  const double d = std::stod(kv.at("delta_hat"));
  CHECK(d > 0.0);
  CHECK(d < 30.0);
  CHECK(kv.at("num_samples") == "40");
  auto w2 = args;
  w2.push_back("--workers");
  w2.push_back("3");
  CHECK(cli(w2).out == a.out);
  std::istringstream csv(slurp(dir / "w.csv"));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,s,delta_hat,standard_error,num_samples,seed");
  CHECK(lines[1] == lines[2]);
}

TEST_CASE("phase is reproducible and plot renders it") {
  TempDir dir("tvcs_cli_phase");
  {
    std::ofstream spec(dir / "spec.txt");
    spec << "class = dense-jump\ns = 2\nn_list = 16, 32\nm_range = 4:n:4\ntrials = 3\nmaster_seed = 11\n";
  }
  const Outcome p1 = cli({"phase", "--spec", dir / "spec.txt", "--out", dir / "g1.csv"});
  const Outcome p2 = cli({"phase", "--spec", dir / "spec.txt", "--out", dir / "g2.csv", "--workers", "4"});
  REQUIRE(p1.code == 0);
  REQUIRE(p2.code == 0);
  CHECK(slurp(dir / "g1.csv") == slurp(dir / "g2.csv"));
  CHECK(p1.out.find("n=16 m_star=") != std::string::npos);
  CHECK(tvcs::read_grid_csv(dir / "g1.csv").cells.size() == 12);

  REQUIRE(cli({"gen", "--class", "dense-jump", "--n", "16", "--s", "2", "--out", dir / "s16.txt"}).code == 0);
  REQUIRE(cli({"gen", "--class", "dense-jump", "--n", "32", "--s", "2", "--out", dir / "s32.txt"}).code == 0);
  for (const char* f : {"s16.txt", "s32.txt"})
    REQUIRE(cli({"width", "--signal", dir / f, "--samples", "20", "--seed", "1", "--csv", dir / "w.csv"}).code ==
            0);
  const Outcome pl = cli({"plot", "--grid", dir / "g1.csv", "--out", dir / "g.svg", "--overlay-width",
                          dir / "w.csv", "--overlay-bound", "0.1"});
  REQUIRE(pl.code == 0);
  const std::string svg = slurp(dir / "g.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("width-curve") != std::string::npos);
  CHECK(svg.find("bound-curve") != std::string::npos);
  CHECK(cli({"plot", "--grid", dir / "missing.csv", "--out", dir / "x.svg"}).code == 1);
  CHECK_FALSE(fs::exists(dir / "x.svg"));
}
