#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pxo/grid.hpp"
#include "pxo/op.hpp"
#include "pxo/solver.hpp"
#include "pxo/varexp.hpp"

namespace pxo::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNotConverged = 3 };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config error at " + key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/**
 * Flat `key = value` configuration. `#` starts a comment; keys are dotted
 * paths such as `grid.n` or `obstacle.center`. Typed getters throw
 * ConfigError naming the key.
 */
class Config {
 public:
  static Config parse(std::istream& is, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  /// Whitespace- or comma-separated numbers.
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  /// Directory that relative file paths are resolved against.
  const std::filesystem::path& baseDir() const { return baseDir_; }
  std::filesystem::path resolvePath(const std::string& key) const;

  /// Keys present in the file but never read.
  std::vector<std::string> unusedKeys() const;
  /// key = value lines in key order.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path baseDir_ = ".";
  mutable std::set<std::string> used_;
};

/// Builds grid, exponent, flux, data and obstacle from a Config on demand.
class Experiment {
 public:
  explicit Experiment(Config config);

  const Config& config() const { return config_; }
  const Grid& grid() const { return grid_; }
  const ExponentField& exponent() const { return p_; }
  const FluxSpec& spec() const { return spec_; }
  /// Field described by the block `prefix` (`data`, `obstacle`, `data2`, ...).
  ScalarField field(const std::string& prefix) const;
  ScalarField f() const { return field("data"); }
  /// `obstacle.expr = none` gives the unconstrained problem.
  ScalarField psi() const;
  ObstacleProblem problem() const;
  SolverOptions solverOptions() const;

 private:
  Config config_;
  Grid grid_;
  ExponentField p_;
  FluxSpec spec_;
};

/// Smooth bounded data: an offset plus three compact bumps, vanishing slope at the boundary.
ScalarField randomSmoothData(const Grid& grid, std::mt19937_64& rng);

struct PresetInfo {
  std::string name;
  std::string description;
};

/// The ten pipelines, in listing order.
const std::vector<PresetInfo>& presets();

struct RunContext {
  std::filesystem::path outDir;
  std::optional<std::uint64_t> seed;
  std::ostream* log = nullptr;
};

/**
 * Executes a preset and writes its artifacts plus `failures.json` into
 * ctx.outDir. Returns the exit code; configuration problems surface as
 * ConfigError.
 */
int runPreset(const std::string& name, const Config& config, const RunContext& ctx);

/// Resolves the output directory (flag, then run.out, then PXO_OUT_DIR, then ./pxo_out),
/// runs the preset and converts ConfigError into kConfigError with a manifest.
int runFromConfig(const std::string& preset, const Config& config, const std::optional<std::string>& outFlag,
                  const std::optional<std::uint64_t>& seed, std::ostream& log, std::ostream& err);

}  // namespace pxo::cli
