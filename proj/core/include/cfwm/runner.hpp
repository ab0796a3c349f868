#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cfwm/system_model.hpp"

namespace cfwm {

inline constexpr const char* kVersion = "1.0.0";

/// One swept parameter. Names: delta1, delta2, separation_nm, lam01, lam12, power_mw.
struct AxisSpec {
  std::string name;
  std::vector<double> values;
};

/// Cross-atom entries of one transition to zero (or all transitions when lower/upper < 0).
struct CouplingToggle {
  int lower = -1;
  int upper = -1;
  bool omega = true;  ///< keep Omega
  bool gamma = true;  ///< keep gamma
};

enum class TableFormat { Csv, Jsonl };

struct SweepConfig {
  std::string mode = "g2";  ///< g2 | spectra | channels
  std::string preset = presets::kRb87Diamond;
  presets::DiamondParameters fixed;
  /// First axis varies slowest; rows follow the outer product in that order.
  std::vector<AxisSpec> axes;
  /// Explicit (Lambda01, Lambda12) pairs; each pair is crossed with the axes.
  std::vector<std::pair<double, double>> rabi_pairs;
  std::string power_scale = "none";  ///< none | sqrt (Lambda12 = lam12 sqrt(P / reference))
  double reference_power_mw = 4.0;
  bool couplings = true;
  std::vector<CouplingToggle> toggles;
  std::string output_dir = ".";
  std::string table = "table.csv";
  std::string manifest = "manifest.json";
  TableFormat format = TableFormat::Csv;
  int workers = 1;
  std::string canonical;  ///< normalised config text used for the manifest hash
};

/// Parses and validates a JSON config document. Unknown keys are rejected.
/// Throws Error(Config) with line/column for syntax errors and the field path otherwise.
SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);

/// Applies CFWM_OUTPUT_DIR and CFWM_WORKERS when set.
void apply_environment(SweepConfig& config);

/// Values for a linear or log-spaced range; throws Error(Config) on empty/non-finite ranges.
std::vector<double> axis_values(double start, double stop, int points, bool log_spacing);

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_cell(const Cell& cell);
std::string render_table(const Table& table, TableFormat format);
/// Throws Error(Io) naming the path.
void emit_table(const Table& table, const std::string& path, TableFormat format);

/// Column sets.
Table g2_table();
Table spectra_table();
Table channels_table();

struct PointStatus {
  std::size_t index = 0;
  std::string status;  ///< ok | flagged | failed
  std::string message;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string version = kVersion;
  std::string mode;
  std::vector<PointStatus> points;
  double wall_seconds = 0.0;
  std::string table_path;

  bool any_failed() const;
  std::string to_json() const;
};

struct RunResult {
  RunManifest manifest;
  Table table;
};

/// Runs every sweep point on a bounded pool of `config.workers` threads. Failures are recorded
/// per point; rows are ordered by sweep index. Writes nothing.
RunResult run_sweep(const SweepConfig& config);

/// run_sweep plus table and manifest files under config.output_dir.
RunResult run_and_write(const SweepConfig& config);

/// Calls fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite on the preset (used by `cfwm validate`).
std::vector<CheckResult> validate_preset(const presets::DiamondParameters& params = {});

std::string hash_hex(const std::string& text);

}  // namespace cfwm
