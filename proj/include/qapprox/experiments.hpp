#pragma once

/**
 * @file
 * Seeded experiment drivers behind the command-line tool. Each command turns
 * a flat key=value configuration into named CSV and JSON-lines artifacts.
 * Every artifact embeds the effective configuration, so rerunning it
 * reproduces the files byte for byte.
 *
 * Config syntax: one `key = value` per line, `#` starts a comment, lists are
 * comma separated, `const.NAME` overrides a named constant.
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qapprox/bounds_lab.hpp"
#include "qapprox/lp_spaces.hpp"

namespace qapprox {

inline constexpr int kCsvSchemaVersion = 1;

class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Sorted `key=value` pairs joined by "; ".
  std::string canonical() const;

  std::string command() const;
  std::vector<std::size_t> sizes(const std::string& key,
                                 const std::vector<std::size_t>& fallback) const;
  std::vector<Exponent> exponents(const std::string& key,
                                  const std::vector<Exponent>& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;

  /// Throws ConfigError when no seed is set.
  std::uint64_t seed() const;
  /// default_constants() overridden by const.* keys.
  Constants constants() const;

 private:
  std::map<std::string, std::string> values_;
};

/// File name -> contents, in emission order.
struct ExperimentOutput {
  std::vector<std::pair<std::string, std::string>> files;

  const std::string& file(const std::string& name) const;
};

/// threshold-sweep, bounds-table, boost-demo, compose-check, lowerbound-cert.
const std::vector<std::string>& experiment_commands();

/// Keys accepted by `command` besides `command` and `const.*`.
const std::vector<std::string>& experiment_keys(const std::string& command);

/// Runs config.command(). Unknown keys, empty grids and a missing seed raise
/// ConfigError; resource-cap violations are reported per cell instead.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Writes every file under `dir`, creating it if needed.
void write_output(const ExperimentOutput& output, const std::filesystem::path& dir);

}  // namespace qapprox
