#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greedylab/spaces.hpp"

namespace greedylab {

/// Bad flag, config file, suite name or input file. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

inline const std::vector<std::string> kSuiteNames{
    "convexity",   "truncation", "min-coeff", "witness-w", "gadget-superdemocracy",
    "gadget-quasigreedy", "theorem-bounds"};

struct ExperimentConfig {
  std::string space;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> max_m;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  std::vector<double> delta_grid{1e-1, 1e-3, 1e-6};
  std::filesystem::path out = ".";
  std::vector<std::string> suites = kSuiteNames;
  std::optional<std::filesystem::path> vector_file;

  /// Parses `space` with `dim` overriding the spec's own dim. SpecError on
  /// malformed input.
  SpaceSpec resolved_space() const;
};

/// key = value lines, '#' comments, blank lines ignored. Keys are flag names
/// without the leading dashes.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies one key; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<std::string> parse_suites(const std::string& text);
std::vector<double> parse_delta_grid(const std::string& text);
std::uint64_t parse_seed(const std::string& text);
std::size_t parse_count(const std::string& key, const std::string& text);

/// Whitespace- or comma-separated reals.
std::vector<double> read_vector_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string spaces_listing(std::size_t dim);

/// CSV/JSON payloads; the run_* functions write them under config.out.
std::string constants_csv(const ExperimentConfig& config);
std::string democracy_csv(const ExperimentConfig& config);
std::string curve_csv(const ExperimentConfig& config);

struct VerifyOutcome {
  std::string report_json;
  int exit_code = kExitOk;
};
VerifyOutcome verify_report(const ExperimentConfig& config);

int run_constants(const ExperimentConfig& config);
int run_curve(const ExperimentConfig& config);
int run_verify(const ExperimentConfig& config);

/// Runs `body`, mapping ConfigError/SpecError to 2 and cap refusals to 1,
/// with the message on stderr.
int guarded(const std::function<int()>& body);

}  // namespace greedylab
