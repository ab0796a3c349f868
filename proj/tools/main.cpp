#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfwm/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPointFailed = 1;
constexpr int kExitConfig = 2;

struct SweepFlags {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<int> workers;
  std::optional<std::string> couplings;
  std::optional<std::string> power_scale;
  std::optional<std::string> format;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_option("-c,--config", f.config, "JSON sweep configuration (defaults to the preset)");
  cmd->add_option("-o,--output-dir", f.output_dir, "Directory for the table and manifest");
  cmd->add_option("-j,--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--couplings", f.couplings, "Inter-atomic couplings")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--power-scale", f.power_scale, "Lambda12 scaling with the power axis")
      ->check(CLI::IsMember({"none", "sqrt"}));
  cmd->add_option("--format", f.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cfwm::Error(cfwm::ErrorCode::Config, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Folds the subcommand and document-level flags into the config text so that the usual
// validation sees them.
std::string merged_config(const std::string& mode, const SweepFlags& f) {
  const std::string text = f.config.empty() ? "{}" : read_text(f.config);
  // Syntax errors are reported by parse_config with their position.
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return text;
  if (doc.contains("mode") && doc["mode"] != mode) {
    throw cfwm::Error(cfwm::ErrorCode::Config,
                      "field 'mode': config says " + doc["mode"].dump() + " but subcommand is " + mode);
  }
  doc["mode"] = mode;
  if (f.couplings) doc["couplings"] = *f.couplings;
  if (f.power_scale) doc["power_scale"] = *f.power_scale;
  if (f.format) {
    if (!doc.contains("output")) doc["output"] = nlohmann::json::object();
    if (doc["output"].is_object()) doc["output"]["format"] = *f.format;
  }
  return doc.dump();
}

int run_mode(const std::string& mode, const SweepFlags& f) {
  cfwm::SweepConfig config;
  try {
    config = cfwm::parse_config(merged_config(mode, f));
    cfwm::apply_environment(config);
    if (f.output_dir) config.output_dir = *f.output_dir;
    if (f.workers) config.workers = *f.workers;
    if (config.format == cfwm::TableFormat::Jsonl && config.table == "table.csv") {
      config.table = "table.jsonl";
    }
  } catch (const cfwm::Error& e) {
    std::cerr << "cfwm: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const cfwm::RunResult r = cfwm::run_and_write(config);
    std::size_t failed = 0, flagged = 0;
    for (const auto& p : r.manifest.points) {
      failed += p.status == "failed";
      flagged += p.status == "flagged";
      if (p.status == "failed") std::cerr << "point " << p.index << " failed: " << p.message << "\n";
    }
    std::printf("%s: %zu points (%zu failed, %zu flagged), %zu rows -> %s/%s in %.2f s\n",
                mode.c_str(), r.manifest.points.size(), failed, flagged, r.table.rows.size(),
                config.output_dir.c_str(), config.table.c_str(), r.manifest.wall_seconds);
    return r.manifest.any_failed() ? kExitPointFailed : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "cfwm: " << e.what() << "\n";
    return kExitPointFailed;
  }
}

int run_validate(double separation) {
  cfwm::presets::DiamondParameters p;
  p.separation_nm = separation;
  bool ok = true;
  for (const auto& c : cfwm::validate_preset(p)) {
    std::printf("%-26s %s%s%s\n", c.name.c_str(), c.passed ? "ok" : "FAILED",
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitPointFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective dressed states and photon coincidences of driven emitter pairs"};
  app.set_version_flag("--version", std::string(cfwm::kVersion));
  app.require_subcommand(1);

  SweepFlags g2_flags, spectra_flags, channels_flags;
  auto* g2 = app.add_subcommand("g2", "Steady-state coincidence G2 = Gpp + Gpe over a sweep");
  add_sweep_flags(g2, g2_flags);
  auto* spectra = app.add_subcommand("spectra", "Labelled dressed energies along one axis");
  add_sweep_flags(spectra, spectra_flags);
  auto* channels = app.add_subcommand("channels", "Collective decay rates per transition");
  add_sweep_flags(channels, channels_flags);
  double separation = 120.0;
  auto* validate = app.add_subcommand("validate", "Run the invariant checks on the preset");
  validate->add_option("--separation", separation, "Inter-atomic distance in nm")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*g2) return run_mode("g2", g2_flags);
  if (*spectra) return run_mode("spectra", spectra_flags);
  if (*channels) return run_mode("channels", channels_flags);
  return run_validate(separation);
}
