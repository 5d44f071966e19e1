#include "neel/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace neel {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

double parse_double(const std::string& key, const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw FormatError("bad value for " + key + ": '" + s + "'");
  return v;
}

}  // namespace

void store_profile(const std::string& path, const Profile& p) {
  const Grid& g = p.theta.grid;
  if (p.theta.background != Background::wall) throw std::invalid_argument("profile must carry the wall background");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kProfileMagic << "\n"
      << "L=" << format_double(g.L) << " n=" << g.n << " H=" << format_double(p.H) << " c=" << format_double(p.c)
      << " nu=" << format_double(p.nu) << " background=wall\n\n";
  for (double x : p.theta.values) {
    std::uint64_t u = to_le(std::bit_cast<std::uint64_t>(x));
    out.write(reinterpret_cast<const char*>(&u), sizeof u);
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Profile load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic, header, blank;
  std::getline(in, magic);
  if (magic != kProfileMagic)
    throw FormatError("profile format mismatch in " + path + ": found '" + magic.substr(0, 16) + "', expected '" +
                      kProfileMagic + "'");
  if (!std::getline(in, header) || !std::getline(in, blank) || !blank.empty())
    throw FormatError("truncated or malformed header in " + path);
  std::map<std::string, std::string> kv;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* k : {"L", "n", "H", "c", "nu", "background"})
    if (!kv.count(k)) throw FormatError(std::string("header lacks ") + k + " in " + path);
  if (kv["background"] != "wall") throw FormatError("unsupported background '" + kv["background"] + "'");
  double L = parse_double("L", kv["L"]);
  double nd = parse_double("n", kv["n"]);
  if (!(L > 0.0) || nd < 2 || nd != std::floor(nd)) throw FormatError("invalid grid in header of " + path);
  Grid g(L, static_cast<int>(nd));
  Vec v(g.n);
  for (int j = 0; j < g.n; ++j) {
    std::uint64_t u;
    if (!in.read(reinterpret_cast<char*>(&u), sizeof u))
      throw FormatError("truncated payload in " + path + ": " + std::to_string(j) + " of " + std::to_string(g.n) +
                        " samples");
    v[j] = std::bit_cast<double>(to_le(u));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload in " + path);
  Profile p;
  p.theta = Field(g, std::move(v), Background::wall);
  p.H = parse_double("H", kv["H"]);
  p.c = parse_double("c", kv["c"]);
  p.nu = parse_double("nu", kv["nu"]);
  p.residual = std::nan("");
  return p;
}

namespace {

Vec resample_values(const Field& rem, const Grid& target) {
  Vec out(target.n, 0.0);
  for (int j = 0; j < target.n; ++j) {
    double x = target.x(j);
    if (x >= -rem.grid.L && x < rem.grid.L) out[j] = evaluate(rem, x);
  }
  return out;
}

}  // namespace

Resampled resample(const Profile& p, const Grid& target) {
  Resampled r;
  r.profile = p;
  if (p.theta.grid == target) return r;
  Field rem(p.theta.grid, p.theta.values);
  Field there(target, resample_values(rem, target));
  Vec back = resample_values(there, p.theta.grid);
  for (int j = 0; j < p.theta.grid.n; ++j)
    r.interpolation_error = std::max(r.interpolation_error, std::abs(back[j] - p.theta.values[j]));
  r.profile.theta = Field(target, there.values, Background::wall);
  r.profile.residual = std::nan("");
  return r;
}

Resampled load_profile(const std::string& path, const Grid& target) { return resample(load_profile(path), target); }

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl" || s == "json-lines") return Format::jsonl;
  throw std::invalid_argument("unknown report format '" + s + "'");
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width differs from header");
  rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return format_double(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return nlohmann::ordered_json::parse(format_double(*d));
  }
  if (auto i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_report(const Table& t, const std::string& path, Format f) {
  std::ofstream out = open_out(path);
  if (f == Format::csv) {
    for (size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << "\n";
    }
  } else {
    for (const auto& row : t.rows) {
      nlohmann::ordered_json j;
      for (size_t i = 0; i < row.size(); ++i) j[t.columns[i]] = cell_json(row[i]);
      out << j.dump() << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

Table spectrum_table(const SpectrumReport& r) {
  Table t{{"index", "re", "im"}, {}};
  for (size_t i = 0; i < r.eigenvalues.size(); ++i)
    t.add({static_cast<long long>(i), r.eigenvalues[i].real(), r.eigenvalues[i].imag()});
  return t;
}

Table sweep_table(const SweepResult& r) {
  Table t{{"re_lambda", "im_lambda", "norm_inv", "norm_Ares", "region"}, {}};
  for (const auto& s : r.samples) t.add({s.lambda.real(), s.lambda.imag(), s.norm_inv, s.norm_Ares, s.region});
  return t;
}

Table trace_table(const SimTrace& tr) {
  Table t{{"t", "residual_H1", "wall_position", "s", "energy", "v_norm", "defect"}, {}};
  for (size_t i = 0; i < tr.t.size(); ++i)
    t.add({tr.t[i], tr.residual_H1[i], tr.wall_position[i], tr.s[i], tr.energy[i], tr.v_norm[i], tr.defect[i]});
  return t;
}

Table profile_table(const Profile& p) {
  Table t{{"x", "theta", "remainder"}, {}};
  const Grid& g = p.theta.grid;
  Vec th = p.theta.theta();
  for (int j = 0; j < g.n; ++j) t.add({g.x(j), th[j], p.theta.values[j]});
  return t;
}

Table mobility_table(const MobilityResult& m) {
  Table t{{"H", "c", "c_over_H", "nu", "M", "slope", "beta_measured", "beta_predicted", "relative_error"}, {}};
  double rel = std::abs(m.beta_measured - m.beta_predicted) / m.beta_predicted;
  for (size_t i = 0; i < m.H.size(); ++i)
    t.add({m.H[i], m.c[i], m.c[i] / m.H[i], m.nu, m.M, m.slope, m.beta_measured, m.beta_predicted, rel});
  return t;
}

Table bound_table(const BoundFit& b) {
  Table t{{"b", "a"}, {}};
  for (size_t i = 0; i < b.b_grid.size(); ++i) t.add({b.b_grid[i], b.a_of_b[i]});
  return t;
}

Config read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
    cfg[k] = v;
  }
  return cfg;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["grid"] = {{"L", L}, {"n", n}};
  j["seeds"] = seeds;
  j["tool_version"] = tool_version;
  j["wall_clock_seconds"] = wall_clock;
  j["outputs"] = outputs;
  if (periodization)
    j["periodization_cos_theta"] = *periodization;
  else
    j["periodization_cos_theta"] = nullptr;
  return j;
}

void RunManifest::write(const std::string& dir) const {
  for (const auto& f : outputs)
    if (!fs::exists(fs::path(dir) / f)) throw std::runtime_error("manifest lists missing output " + f);
  write_json(to_json(), (fs::path(dir) / "manifest.json").string());
}

}  // namespace neel
