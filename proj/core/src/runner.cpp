#include "cfwm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cfwm/dressed_spectra.hpp"
#include "cfwm/dynamics.hpp"
#include "cfwm/observables.hpp"
#include "cfwm/operator_basis.hpp"

namespace cfwm {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, "field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      config_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(path, "must be finite");
  return d;
}

int get_int(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(path, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_string()) config_error(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_error(path, "expected true or false");
  return v.get<bool>();
}

const std::set<std::string> kAxisNames = {"delta1", "delta2", "separation_nm",
                                          "lam01", "lam12", "power_mw"};

AxisSpec parse_axis(const json& a, const std::string& path) {
  reject_unknown(a, path, {"name", "start", "stop", "points", "spacing", "values"});
  AxisSpec axis;
  if (!a.contains("name")) config_error(path + ".name", "required");
  axis.name = get_string(a, "name", path + ".name");
  if (!kAxisNames.count(axis.name)) config_error(path + ".name", "unknown axis '" + axis.name + "'");
  if (a.contains("values")) {
    if (a.contains("start") || a.contains("stop") || a.contains("points")) {
      config_error(path, "give either values or start/stop/points");
    }
    const json& v = a.at("values");
    if (!v.is_array() || v.empty()) config_error(path + ".values", "expected a non-empty array");
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string p = path + ".values[" + std::to_string(k) + "]";
      if (!v[k].is_number()) config_error(p, "expected a number");
      const double d = v[k].get<double>();
      if (!std::isfinite(d)) config_error(p, "must be finite");
      axis.values.push_back(d);
    }
    return axis;
  }
  for (const char* key : {"start", "stop", "points"}) {
    if (!a.contains(key)) config_error(path + "." + key, "required");
  }
  const double start = get_number(a, "start", path + ".start");
  const double stop = get_number(a, "stop", path + ".stop");
  const int points = get_int(a, "points", path + ".points");
  if (points < 1) config_error(path + ".points", "must be >= 1");
  bool log_spacing = false;
  if (a.contains("spacing")) {
    const std::string s = get_string(a, "spacing", path + ".spacing");
    if (s == "log") {
      log_spacing = true;
    } else if (s != "linear") {
      config_error(path + ".spacing", "expected 'linear' or 'log'");
    }
  }
  if (log_spacing && (start <= 0.0 || stop <= 0.0)) {
    config_error(path, "log spacing needs positive bounds");
  }
  axis.values = axis_values(start, stop, points, log_spacing);
  return axis;
}

void parse_fixed(const json& f, presets::DiamondParameters& p) {
  reject_unknown(f, "fixed",
                 {"atoms", "separation_nm", "delta1", "delta2", "lam01", "lam12",
                  "drive_coupling_scale", "normalization", "secular_threshold"});
  if (f.contains("atoms")) {
    p.atoms = get_int(f, "atoms", "fixed.atoms");
    if (p.atoms < 1 || p.atoms > 2) config_error("fixed.atoms", "must be 1 or 2");
  }
  if (f.contains("separation_nm")) {
    p.separation_nm = get_number(f, "separation_nm", "fixed.separation_nm");
    if (p.separation_nm <= 0.0) config_error("fixed.separation_nm", "must be positive");
  }
  if (f.contains("delta1")) p.delta1 = get_number(f, "delta1", "fixed.delta1");
  if (f.contains("delta2")) p.delta2 = get_number(f, "delta2", "fixed.delta2");
  if (f.contains("lam01")) p.lam01 = get_number(f, "lam01", "fixed.lam01");
  if (f.contains("lam12")) p.lam12 = get_number(f, "lam12", "fixed.lam12");
  if (f.contains("drive_coupling_scale")) {
    p.hamiltonian.drive_coupling_scale =
        get_number(f, "drive_coupling_scale", "fixed.drive_coupling_scale");
  }
  if (f.contains("normalization")) {
    const std::string n = get_string(f, "normalization", "fixed.normalization");
    if (n == "tabulated") {
      p.coupling.normalization = RateNormalization::Tabulated;
    } else if (n == "printed") {
      p.coupling.normalization = RateNormalization::Printed;
    } else {
      config_error("fixed.normalization", "expected 'tabulated' or 'printed'");
    }
  }
  if (f.contains("secular_threshold")) {
    p.coupling.secular_threshold = get_number(f, "secular_threshold", "fixed.secular_threshold");
    if (p.coupling.secular_threshold <= 0.0) {
      config_error("fixed.secular_threshold", "must be positive");
    }
  }
}

}  // namespace

std::vector<double> axis_values(double start, double stop, int points, bool log_spacing) {
  if (points < 1) throw Error(ErrorCode::Config, "point count must be >= 1");
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(ErrorCode::Config, "range bounds must be finite");
  }
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = start;
    return v;
  }
  for (int k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / (points - 1);
    v[k] = log_spacing ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                       : start + t * (stop - start);
  }
  v.front() = start;
  v.back() = stop;
  return v;
}

SweepConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::Config, "parse error at line " + std::to_string(line) + ", column " +
                                       std::to_string(column) + ": " + e.what());
  }
  reject_unknown(doc, "",
                 {"mode", "preset", "fixed", "sweep", "rabi_pairs", "power_scale",
                  "reference_power_mw", "couplings", "toggles", "output", "workers"});
  SweepConfig c;
  if (doc.contains("mode")) {
    c.mode = get_string(doc, "mode", "mode");
    if (c.mode != "g2" && c.mode != "spectra" && c.mode != "channels") {
      config_error("mode", "expected g2, spectra or channels");
    }
  }
  if (doc.contains("preset")) {
    c.preset = get_string(doc, "preset", "preset");
    if (c.preset != presets::kRb87Diamond) config_error("preset", "unknown preset '" + c.preset + "'");
  }
  if (doc.contains("fixed")) parse_fixed(doc.at("fixed"), c.fixed);
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (s.is_array()) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        c.axes.push_back(parse_axis(s[k], "sweep[" + std::to_string(k) + "]"));
      }
    } else {
      c.axes.push_back(parse_axis(s, "sweep"));
    }
    std::set<std::string> seen;
    for (const auto& a : c.axes) {
      if (!seen.insert(a.name).second) config_error("sweep", "axis '" + a.name + "' repeated");
    }
  }
  if (doc.contains("rabi_pairs")) {
    const json& r = doc.at("rabi_pairs");
    if (!r.is_array() || r.empty()) config_error("rabi_pairs", "expected a non-empty array");
    for (std::size_t k = 0; k < r.size(); ++k) {
      const std::string p = "rabi_pairs[" + std::to_string(k) + "]";
      if (!r[k].is_array() || r[k].size() != 2 || !r[k][0].is_number() || !r[k][1].is_number()) {
        config_error(p, "expected [lam01, lam12]");
      }
      c.rabi_pairs.emplace_back(r[k][0].get<double>(), r[k][1].get<double>());
    }
  }
  if (doc.contains("power_scale")) {
    c.power_scale = get_string(doc, "power_scale", "power_scale");
    if (c.power_scale != "none" && c.power_scale != "sqrt") {
      config_error("power_scale", "expected 'none' or 'sqrt'");
    }
  }
  if (doc.contains("reference_power_mw")) {
    c.reference_power_mw = get_number(doc, "reference_power_mw", "reference_power_mw");
    if (c.reference_power_mw <= 0.0) config_error("reference_power_mw", "must be positive");
  }
  if (doc.contains("couplings")) {
    const json& v = doc.at("couplings");
    if (v.is_boolean()) {
      c.couplings = v.get<bool>();
    } else if (v.is_string() && (v == "on" || v == "off")) {
      c.couplings = v == "on";
    } else {
      config_error("couplings", "expected 'on', 'off' or a boolean");
    }
  }
  const auto scheme = presets::rb87_diamond_scheme();
  if (doc.contains("toggles")) {
    const json& t = doc.at("toggles");
    if (!t.is_array()) config_error("toggles", "expected an array");
    for (std::size_t k = 0; k < t.size(); ++k) {
      const std::string p = "toggles[" + std::to_string(k) + "]";
      reject_unknown(t[k], p, {"transition", "omega", "gamma"});
      CouplingToggle tog;
      if (t[k].contains("transition")) {
        const json& tr = t[k].at("transition");
        if (!tr.is_array() || tr.size() != 2 || !tr[0].is_number_integer() ||
            !tr[1].is_number_integer()) {
          config_error(p + ".transition", "expected [lower, upper]");
        }
        tog.lower = tr[0].get<int>();
        tog.upper = tr[1].get<int>();
        if (scheme.find_transition(tog.lower, tog.upper) < 0) {
          config_error(p + ".transition", "no such coupling entry");
        }
      }
      if (t[k].contains("omega")) tog.omega = get_bool(t[k], "omega", p + ".omega");
      if (t[k].contains("gamma")) tog.gamma = get_bool(t[k], "gamma", p + ".gamma");
      c.toggles.push_back(tog);
    }
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, "output", {"dir", "table", "manifest", "format"});
    if (o.contains("dir")) c.output_dir = get_string(o, "dir", "output.dir");
    if (o.contains("table")) c.table = get_string(o, "table", "output.table");
    if (o.contains("manifest")) c.manifest = get_string(o, "manifest", "output.manifest");
    if (o.contains("format")) {
      const std::string f = get_string(o, "format", "output.format");
      if (f == "csv") {
        c.format = TableFormat::Csv;
      } else if (f == "jsonl") {
        c.format = TableFormat::Jsonl;
      } else {
        config_error("output.format", "expected 'csv' or 'jsonl'");
      }
    }
  }
  if (doc.contains("workers")) {
    c.workers = get_int(doc, "workers", "workers");
    if (c.workers < 1) config_error("workers", "must be >= 1");
  }

  // Cross-field checks.
  for (const auto& a : c.axes) {
    if (a.name == "power_mw" && c.power_scale != "sqrt") {
      config_error("sweep", "axis 'power_mw' requires power_scale 'sqrt'");
    }
    if (a.name == "power_mw") {
      for (double v : a.values) {
        if (v < 0.0) config_error("sweep", "powers must be non-negative");
      }
    }
    if (a.name == "separation_nm") {
      for (double v : a.values) {
        if (v <= 0.0) config_error("sweep", "separations must be positive");
      }
    }
  }
  if (c.mode == "spectra" && (c.axes.size() != 1 || !c.rabi_pairs.empty())) {
    config_error("sweep", "spectra mode needs exactly one axis and no rabi_pairs");
  }
  if (c.mode == "channels") {
    if (c.axes.size() > 1 || (c.axes.size() == 1 && c.axes[0].name != "separation_nm")) {
      config_error("sweep", "channels mode sweeps separation_nm only");
    }
    if (c.fixed.atoms != 2) config_error("fixed.atoms", "channels need two emitters");
  }
  if (c.mode == "g2" && c.fixed.atoms != 2) config_error("fixed.atoms", "g2 needs two emitters");
  c.canonical = doc.dump();
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_environment(SweepConfig& config) {
  if (const char* dir = std::getenv("CFWM_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  if (const char* w = std::getenv("CFWM_WORKERS"); w && *w) {
    char* end = nullptr;
    const long v = std::strtol(w, &end, 10);
    if (*end != '\0' || v < 1) throw Error(ErrorCode::Config, "CFWM_WORKERS must be a positive integer");
    config.workers = static_cast<int>(v);
  }
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
          return buf;
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      cell);
}

std::string render_table(const Table& table, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::Csv) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      out << (k ? "," : "") << table.columns[k];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
      out << "\n";
    }
  } else {
    for (const auto& row : table.rows) {
      out << "{";
      for (std::size_t k = 0; k < row.size(); ++k) {
        out << (k ? "," : "") << json(table.columns[k]).dump() << ":";
        if (std::holds_alternative<std::string>(row[k])) {
          out << json(std::get<std::string>(row[k])).dump();
        } else {
          out << format_cell(row[k]);
        }
      }
      out << "}\n";
    }
  }
  return out.str();
}

void emit_table(const Table& table, const std::string& path, TableFormat format) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw Error(ErrorCode::Shape, "row width does not match the column count");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << render_table(table, format);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

Table g2_table() { return {{"delta2", "r12_nm", "lam01", "lam12", "G2", "Gpp", "Gpe"}, {}}; }
Table spectra_table() {
  return {{"sweep_value", "state_index", "energy", "symmetry", "label", "flagged"}, {}};
}
Table channels_table() {
  return {{"r12_nm", "lower", "upper", "gamma_plus", "gamma_minus"}, {}};
}

bool RunManifest::any_failed() const {
  return std::any_of(points.begin(), points.end(),
                     [](const PointStatus& p) { return p.status == "failed"; });
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["mode"] = mode;
  j["table"] = table_path;
  j["wall_seconds"] = wall_seconds;
  json pts = json::array();
  for (const auto& p : points) {
    json e;
    e["index"] = p.index;
    e["status"] = p.status;
    if (!p.message.empty()) e["message"] = p.message;
    e["seconds"] = p.seconds;
    pts.push_back(e);
  }
  j["points"] = pts;
  return j.dump(2) + "\n";
}

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t n = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

namespace {

struct SweepPoint {
  presets::DiamondParameters params;
  double sweep_value = 0.0;
};

std::vector<SweepPoint> expand_points(const SweepConfig& c) {
  std::vector<SweepPoint> points;
  std::vector<std::pair<double, double>> pairs = c.rabi_pairs;
  if (pairs.empty()) pairs.emplace_back(c.fixed.lam01, c.fixed.lam12);
  for (const auto& [l01, l12] : pairs) {
    SweepPoint base;
    base.params = c.fixed;
    base.params.lam01 = l01;
    base.params.lam12 = l12;
    std::vector<SweepPoint> grid{base};
    for (const auto& axis : c.axes) {
      std::vector<SweepPoint> next;
      for (const auto& p : grid) {
        for (double v : axis.values) {
          SweepPoint q = p;
          q.sweep_value = v;
          if (axis.name == "delta1") q.params.delta1 = v;
          if (axis.name == "delta2") q.params.delta2 = v;
          if (axis.name == "separation_nm") q.params.separation_nm = v;
          if (axis.name == "lam01") q.params.lam01 = v;
          if (axis.name == "lam12") q.params.lam12 = v;
          if (axis.name == "power_mw") q.params.lam12 = l12 * std::sqrt(v / c.reference_power_mw);
          next.push_back(q);
        }
      }
      grid = std::move(next);
    }
    points.insert(points.end(), grid.begin(), grid.end());
  }
  return points;
}

SystemModel build_model(const SweepConfig& c, const presets::DiamondParameters& p) {
  presets::DiamondParameters q = p;
  q.couplings_enabled = c.couplings;
  SystemModel m = presets::rb87_diamond(q);
  for (const auto& t : c.toggles) {
    std::optional<int> idx;
    if (t.lower >= 0) idx = m.couplings.find_transition(t.lower, t.upper);
    m.couplings.zero_cross_atom(idx, !t.omega, !t.gamma);
  }
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult run_sweep(const SweepConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.manifest.mode = config.mode;
  result.manifest.config_hash = hash_hex(config.canonical);
  const std::vector<SweepPoint> points = expand_points(config);
  const std::size_t n = points.size();
  std::vector<PointStatus> status(n);
  std::vector<std::vector<std::vector<Cell>>> rows(n);

  if (config.mode == "g2") {
    result.table = g2_table();
    const OperatorBasis basis(4, 2);
    parallel_for(n, config.workers, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      status[i].index = i;
      try {
        const SystemModel m = build_model(config, points[i].params);
        const PointResult r = evaluate_point(m, basis);
        const auto& p = points[i].params;
        rows[i].push_back({p.delta2, p.separation_nm, p.lam01, p.lam12, r.coincidence.g2,
                           r.coincidence.gpp, r.coincidence.gpe});
        status[i].status = r.coincidence.stale ? "flagged" : "ok";
        if (r.coincidence.stale) status[i].message = "steady-state residual above threshold";
      } catch (const std::exception& e) {
        status[i].status = "failed";
        status[i].message = e.what();
      }
      status[i].seconds = seconds_since(t0);
    });
  } else if (config.mode == "channels") {
    result.table = channels_table();
    parallel_for(n, config.workers, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      status[i].index = i;
      try {
        const SystemModel m = build_model(config, points[i].params);
        for (int t = 0; t < m.couplings.transition_count(); ++t) {
          const CollectiveChannels ch = collective_channels(m.couplings, t, m.scheme.n_levels);
          const auto& tr = m.couplings.transition(t);
          rows[i].push_back({points[i].params.separation_nm, static_cast<long long>(tr.lower),
                             static_cast<long long>(tr.upper), ch.gamma_plus, ch.gamma_minus});
        }
        status[i].status = "ok";
      } catch (const std::exception& e) {
        status[i].status = "failed";
        status[i].message = e.what();
      }
      status[i].seconds = seconds_since(t0);
    });
  } else {
    result.table = spectra_table();
    std::vector<DressedSpectrum> spectra(n);
    std::vector<bool> ok(n, false);
    parallel_for(n, config.workers, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      status[i].index = i;
      try {
        const SystemModel m = build_model(config, points[i].params);
        const CMatrix h = m.h_sys();
        if (m.atoms() == 2) {
          const CMatrix s = swap_operator(m.scheme.n_levels);
          spectra[i] = diagonalize(h, &s);
        } else {
          spectra[i] = diagonalize(h);
        }
        ok[i] = true;
        status[i].status = "ok";
      } catch (const std::exception& e) {
        status[i].status = "failed";
        status[i].message = e.what();
      }
      status[i].seconds = seconds_since(t0);
    });
    // Labels are carried sequentially along the longest successful prefix.
    std::size_t prefix = 0;
    while (prefix < n && ok[prefix]) ++prefix;
    if (prefix > 0) {
      try {
        presets::DiamondParameters one = points[0].params;
        one.atoms = 1;
        const SingleStates single = name_single_states(build_model(config, one).h_sys());
        PairStates ref;
        if (config.fixed.atoms == 2) {
          ref = pair_states(single);
        } else {
          ref.vectors = single.vectors;
          for (const auto& name : single.names) {
            ref.labels.push_back("|" + name + ">");
            ref.symmetry.push_back(Symmetry::Mixed);
          }
        }
        assign_labels(spectra[0], ref);
        std::vector<DressedSpectrum> run(spectra.begin(), spectra.begin() + prefix);
        track_labels(run);
        std::move(run.begin(), run.end(), spectra.begin());
      } catch (const std::exception& e) {
        for (std::size_t i = 0; i < prefix; ++i) {
          status[i].status = "failed";
          status[i].message = std::string("labelling: ") + e.what();
        }
        prefix = 0;
      }
    }
    for (std::size_t i = prefix; i < n; ++i) {
      if (status[i].status == "ok") {
        status[i].status = "failed";
        status[i].message = "label tracking interrupted by an earlier failed point";
      }
    }
    for (std::size_t i = 0; i < prefix; ++i) {
      const auto& s = spectra[i];
      bool any = false;
      for (int k = 0; k < s.size(); ++k) {
        const bool flag = s.flagged[k];
        any = any || flag;
        rows[i].push_back({points[i].sweep_value, static_cast<long long>(k), s.energies(k),
                           std::string(to_string(s.symmetry[k])), s.labels[k], flag});
      }
      if (any) {
        status[i].status = "flagged";
        status[i].message = "ambiguous label continuation";
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (auto& r : rows[i]) result.table.rows.push_back(std::move(r));
  }
  result.manifest.points = std::move(status);
  result.manifest.wall_seconds = seconds_since(start);
  return result;
}

RunResult run_and_write(const SweepConfig& config) {
  RunResult r = run_sweep(config);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + config.output_dir + ": " + ec.message());
  const std::filesystem::path dir(config.output_dir);
  const std::string table_path = (dir / config.table).string();
  emit_table(r.table, table_path, config.format);
  r.manifest.table_path = config.table;
  const std::string manifest_path = (dir / config.manifest).string();
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + manifest_path + " for writing");
  out << r.manifest.to_json();
  return r;
}

std::vector<CheckResult> validate_preset(const presets::DiamondParameters& params) {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, auto&& fn) {
    CheckResult c{name, false, ""};
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    out.push_back(c);
  };
  presets::DiamondParameters p = params;
  p.atoms = 2;
  const SystemModel m = presets::rb87_diamond(p);
  const CMatrix h = m.h_sys();
  const CMatrix s = swap_operator(4);
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };

  check("hamiltonian hermitian", [&](CheckResult& c) {
    const double e = max_abs(h - h.adjoint());
    c.passed = e < 1e-12;
    c.detail = "max |H - H^dag| = " + fmt(e);
  });
  check("exchange symmetry", [&](CheckResult& c) {
    const double e = max_abs(h * s - s * h);
    c.passed = e < 1e-10;
    c.detail = "max |[H, S]| = " + fmt(e);
  });
  check("sector counts 10/6", [&](CheckResult& c) {
    const DressedSpectrum d = diagonalize(h, &s);
    const auto sym = std::count(d.symmetry.begin(), d.symmetry.end(), Symmetry::Symmetric);
    const auto anti = std::count(d.symmetry.begin(), d.symmetry.end(), Symmetry::Antisymmetric);
    c.passed = sym == 10 && anti == 6;
    c.detail = std::to_string(sym) + " symmetric, " + std::to_string(anti) + " antisymmetric";
  });
  check("channel sum rule", [&](CheckResult& c) {
    double worst = 0.0;
    for (int t = 0; t < m.couplings.transition_count(); ++t) {
      const auto ch = collective_channels(m.couplings, t, 4);
      const double g = m.couplings.transition(t).rate;
      worst = std::max(worst, std::abs(ch.gamma_plus + ch.gamma_minus - 2.0 * g) / g);
    }
    c.passed = worst < 1e-10;
    c.detail = "max relative deviation " + fmt(worst);
  });
  const OperatorBasis basis(4, 2);
  std::shared_ptr<GeneratorMatrix> gen;
  check("generator real", [&](CheckResult& c) {
    gen = std::make_shared<GeneratorMatrix>(build_generator(h, m.couplings, basis));
    c.passed = gen->imaginary_residue < 1e-10;
    c.detail = "imaginary residue " + fmt(gen->imaginary_residue);
  });
  check("population conserved", [&](CheckResult& c) {
    if (!gen) throw Error(ErrorCode::Construction, "generator unavailable");
    const RVector f = population_functional(basis);
    const double e = (f.transpose() * gen->lambda).cwiseAbs().maxCoeff();
    c.passed = e < 1e-10;
    c.detail = "max |f^T Lambda| = " + fmt(e);
  });
  check("oracle steady state", [&](CheckResult& c) {
    if (!gen) throw Error(ErrorCode::Construction, "generator unavailable");
    const RVector w0 = product_initial_state(basis, {0, 0});
    const RVector w = steady_state(gen->lambda, w0, basis);
    const DensityMatrixOracle oracle(h, m.couplings, 4);
    const RVector ref = state_from_density(oracle.stationary(), basis);
    const double e = (w - ref).cwiseAbs().maxCoeff();
    c.passed = e < 1e-8;
    c.detail = "max |w - w_oracle| = " + fmt(e);
  });
  check("single-atom closed form", [&](CheckResult& c) {
    presets::DiamondParameters one = p;
    one.atoms = 1;
    one.delta2 = 0.0;
    const DressedSpectrum d = diagonalize(presets::rb87_diamond(one).h_sys());
    const SingleAtomDressed cf = single_atom_closed_form(one.delta1, one.lam01, one.lam12);
    std::vector<double> ref(cf.energies.begin(), cf.energies.end());
    std::sort(ref.begin(), ref.end());
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(d.energies(k) - ref[k]) / std::max(1.0, std::abs(ref[k])));
    }
    c.passed = worst < 1e-10;
    c.detail = "max relative deviation " + fmt(worst);
  });
  return out;
}

}  // namespace cfwm
