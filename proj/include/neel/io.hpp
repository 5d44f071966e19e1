#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "neel/dynamics.hpp"
#include "neel/profiles.hpp"
#include "neel/spectra.hpp"

namespace neel {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kProfileMagic = "NEELW1";
inline constexpr const char* kToolVersion = "0.1.0";

// Text header "NEELW1", "L=.. n=.. H=.. c=.. nu=.. background=wall", a blank line, then n
// little-endian doubles holding the remainder samples.
void store_profile(const std::string& path, const Profile& p);
Profile load_profile(const std::string& path);

struct Resampled {
  Profile profile;
  double interpolation_error = 0.0;  // sup difference after resampling back to the source grid
};
Resampled resample(const Profile& p, const Grid& target);
// Loads and resamples onto target when the stored grid differs; the error is recorded in out.
Resampled load_profile(const std::string& path, const Grid& target);

// Round-trippable decimal form (17 significant digits).
std::string format_double(double x);

enum class Format { csv, jsonl };
Format parse_format(const std::string& s);

using Cell = std::variant<double, long long, std::string>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row);
};

void write_report(const Table& t, const std::string& path, Format f = Format::csv);
void write_json(const nlohmann::ordered_json& j, const std::string& path);

Table spectrum_table(const SpectrumReport& r);
Table sweep_table(const SweepResult& r);
Table trace_table(const SimTrace& t);
Table profile_table(const Profile& p);
Table mobility_table(const MobilityResult& m);
Table bound_table(const BoundFit& b);

// Flat "key = value" lines; '#' starts a comment.
using Config = std::map<std::string, std::string>;
Config read_config(const std::string& path);

struct RunManifest {
  std::string command;
  Config config;
  double L = 0.0;
  int n = 0;
  std::vector<unsigned long long> seeds;
  std::string tool_version = kToolVersion;
  double wall_clock = 0.0;
  std::vector<std::string> outputs;
  std::optional<double> periodization;  // cos(theta(-L + dx/2))

  nlohmann::ordered_json to_json() const;
  // Checks that every listed output exists, then writes manifest.json into dir.
  void write(const std::string& dir) const;
};

}  // namespace neel
