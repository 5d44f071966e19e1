#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "neel/io.hpp"

using namespace neel;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "neelwall_io_tests";
  fs::create_directories(d);
  return d;
}

Profile sample_profile() {
  Grid g(40.0, 256);
  Profile p;
  p.theta = Field::zeros(g, Background::wall);
  for (int j = 0; j < g.n; ++j) p.theta.values[j] = 0.01 * std::exp(-g.x(j) * g.x(j)) + 1e-17 * j;
  p.H = 1e-3;
  p.c = -0.000988380912016;
  p.nu = 0.5;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("profile round trip is bit exact") {
  Profile p = sample_profile();
  fs::path f = scratch_dir() / "p.neelw";
  store_profile(f.string(), p);
  Profile q = load_profile(f.string());
  CHECK(q.theta.grid == p.theta.grid);
  CHECK(q.theta.values == p.theta.values);
  CHECK(q.H == p.H);
  CHECK(q.c == p.c);
  CHECK(q.nu == p.nu);
  CHECK(q.theta.background == Background::wall);
  std::string s = slurp(f);
  CHECK(s.rfind("NEELW1\nL=40 n=256 H=0.001 c=", 0) == 0);
}

TEST_CASE("wrong magic names found and expected") {
  fs::path f = scratch_dir() / "bad.neelw";
  std::ofstream(f) << "NEELW9\nL=1 n=16 H=0 c=0 nu=1 background=wall\n\n";
  try {
    load_profile(f.string());
    FAIL("no error");
  } catch (const FormatError& e) {
    std::string w = e.what();
    CHECK(w.find("NEELW9") != std::string::npos);
    CHECK(w.find("NEELW1") != std::string::npos);
  }
}

TEST_CASE("truncated payload is an error") {
  Profile p = sample_profile();
  fs::path f = scratch_dir() / "t.neelw";
  store_profile(f.string(), p);
  fs::resize_file(f, fs::file_size(f) - 8);
  CHECK_THROWS_AS(load_profile(f.string()), FormatError);
  std::ofstream(f, std::ios::app) << "abcdefghijklmnop";
  CHECK_THROWS_AS(load_profile(f.string()), FormatError);
}

TEST_CASE("loading on another grid resamples and records the error") {
  Profile p = sample_profile();
  fs::path f = scratch_dir() / "r.neelw";
  store_profile(f.string(), p);
  Resampled same = load_profile(f.string(), p.theta.grid);
  CHECK(same.interpolation_error == 0.0);
  Resampled r = load_profile(f.string(), Grid(40.0, 512));
  CHECK(r.profile.theta.grid.n == 512);
  CHECK(r.interpolation_error < 1e-12);
  CHECK(r.profile.theta.values[256] == doctest::Approx(p.theta.values[128]).epsilon(1e-12));
}

TEST_CASE("CSV and JSON lines are round-trippable") {
  Table t{{"index", "value", "tag"}, {}};
  const double x = 0.1 + 0.2;
  t.add({1LL, x, std::string("G1")});
  t.add({2LL, -1e-300, std::string("Gamma")});
  fs::path c = scratch_dir() / "t.csv", j = scratch_dir() / "t.jsonl";
  write_report(t, c.string(), Format::csv);
  write_report(t, j.string(), Format::jsonl);
  std::string cs = slurp(c);
  CHECK(cs.rfind("index,value,tag\n1,", 0) == 0);
  std::string row = cs.substr(cs.find('\n') + 1);
  std::string field = row.substr(row.find(',') + 1);
  CHECK(std::stod(field.substr(0, field.find(','))) == x);
  std::ifstream jin(j);
  std::string line;
  int lines = 0;
  while (std::getline(jin, line)) {
    auto o = nlohmann::json::parse(line);
    if (lines == 0) CHECK(o["value"].get<double>() == x);
    ++lines;
  }
  CHECK(lines == 2);
  CHECK_THROWS(t.add({1LL}));
  CHECK_THROWS(write_report(t, "/nonexistent/dir/x.csv"));
  CHECK(format_double(x) == "0.30000000000000004");
}

TEST_CASE("report tables have the documented columns") {
  SpectrumReport r;
  r.eigenvalues = {cplx(0.0, 0.0), cplx(-0.5, 1.0)};
  CHECK(spectrum_table(r).columns == std::vector<std::string>{"index", "re", "im"});
  SimTrace tr;
  CHECK(trace_table(tr).columns ==
        std::vector<std::string>{"t", "residual_H1", "wall_position", "s", "energy", "v_norm", "defect"});
  SweepResult s;
  CHECK(sweep_table(s).columns.front() == "re_lambda");
}

TEST_CASE("config files") {
  fs::path f = scratch_dir() / "run.cfg";
  std::ofstream(f) << "# comment\nL = 20\n  n=512  # trailing\n\nmode = local\n";
  Config c = read_config(f.string());
  CHECK(c.at("L") == "20");
  CHECK(c.at("n") == "512");
  CHECK(c.at("mode") == "local");
  std::ofstream(f) << "just words\n";
  CHECK_THROWS_AS(read_config(f.string()), std::invalid_argument);
  CHECK_THROWS_AS(read_config("/nonexistent.cfg"), std::invalid_argument);
}

TEST_CASE("manifest refuses missing outputs") {
  fs::path d = scratch_dir() / "m";
  fs::remove_all(d);
  fs::create_directories(d);
  RunManifest m;
  m.command = "solve-static";
  m.outputs = {"absent.csv"};
  CHECK_THROWS(m.write(d.string()));
  std::ofstream(d / "absent.csv") << "x\n";
  m.periodization = 1e-17;
  CHECK_NOTHROW(m.write(d.string()));
  auto j = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["periodization_cos_theta"].get<double>() == 1e-17);
}

}
