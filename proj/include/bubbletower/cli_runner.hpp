#pragma once

// Run configuration, command dispatch and report emission for the
// bubbletower command line tool.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bubbletower {

struct RunConfig {
  std::string cmd = "constants";
  int n = 3;
  int k = 1;
  std::vector<double> center;  ///< empty means the origin
  double radius = 1.0;
  /// single value, comma list, or range "start:stop:geometric[:count]" /
  /// "start:stop:linear:count"
  std::string eps = "0.1";
  double eta = 0.1;
  /// matching radius; 0 before validation means half the inradius
  double rho = 0.0;
  /// dilations d_1..d_k; empty means the reduced-system root
  std::vector<double> d;
  int grid_nodes_per_decade = 40;
  double grid_r_min_factor = 0.1;
  int grid_max_regrids = 8;
  double quad_tolerance = 1e-10;
  int quad_radial_panels = 12;
  int quad_spherical_order = 12;
  double quad_truncation_radius = 64.0;
  double newton_rel_tol = 1e-9;
  double newton_abs_tol = 1e-12;
  int newton_max_iterations = 40;
  int newton_max_continuation_steps = 3000;
  double reduce_tolerance = 1e-10;
  std::string sweep_mode = "warm";
  bool ls_enabled = false;
  double ls_tolerance = 1e-10;
  int ls_max_iterations = 200;
  std::string verify_eps = "0.125:0.0009765625:geometric";
  std::string output = "bubbletower_out";

  bool operator==(const RunConfig&) const = default;
};

/// Commands accepted by execute.
const std::vector<std::string>& command_names();

/// key=value pairs in a fixed order, doubles with 17 significant digits.
std::vector<std::pair<std::string, std::string>> config_pairs(const RunConfig& cfg);
std::string print_config(const RunConfig& cfg);

/// Sets one key; unknown keys and unparsable values raise config errors.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text, '#' comments, blank lines ignored. Duplicate or
/// unknown keys raise config errors. The result is not yet validated.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies the entries on top of the defaults, then validates.
RunConfig parse_config(const std::map<std::string, std::string>& entries);

/// Checks the invariants (validation errors) and fills derived defaults.
void validate_config(RunConfig& cfg);

/// Expands an eps specification into the list of values.
std::vector<double> expand_eps(const std::string& spec);

/// Output directory after the BUBBLETOWER_OUT override.
std::filesystem::path output_directory(const RunConfig& cfg);

/// Runs cfg.cmd, writes CSV/JSON artifacts and manifest.json into the output
/// directory and returns the exit status: 0 success, 1 usage or
/// configuration, 2 numerical failure. Failures also leave error.json.
int execute(const RunConfig& cfg, std::ostream& log);

/// 17 significant digits; nan and inf spelled out.
std::string format_double(double x);

std::string sha256_hex(const std::filesystem::path& path);

}  // namespace bubbletower
