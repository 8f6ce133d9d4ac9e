#include "nlslab/scenario.hpp"

#include "nlslab/checks.hpp"
#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace nlslab {
namespace {

using json = nlohmann::json;

const std::vector<std::string> kStages{"simulate", "spectrum", "sigma", "frequencies", "compare", "checks"};

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ConfigurationError(source_ + ": field '" + path + "': " + message);
  }

  void only_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown field");
  }

  double number(const json& obj, const std::string& path, const std::string& key, double fallback,
                bool positive = false) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(join(path, key), "must be finite");
    if (positive && !(x > 0.0)) fail(join(path, key), "must be positive");
    return x;
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int fallback,
              int minimum = std::numeric_limits<int>::min()) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    const long long x = v.get<long long>();
    if (x < minimum || x > std::numeric_limits<int>::max())
      fail(join(path, key), "must be an integer >= " + std::to_string(minimum));
    return static_cast<int>(x);
  }

  std::string text(const json& obj, const std::string& path, const std::string& key,
                   const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) fail(join(path, key), "expected a string");
    return obj.at(key).get<std::string>();
  }

  bool flag(const json& obj, const std::string& path, const std::string& key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
    return obj.at(key).get<bool>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

private:
  std::string source_;
};

std::vector<ModeAmplitude> read_modes(const Reader& r, const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.empty()) r.fail(path, "expected a non-empty array of {n, re, im}");
  std::vector<ModeAmplitude> modes;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    r.only_keys(arr[i], p, {"n", "re", "im"});
    if (!arr[i].contains("n")) r.fail(p + ".n", "missing");
    modes.push_back({r.integer(arr[i], p, "n", 0),
                     cplx(r.number(arr[i], p, "re", 0.0), r.number(arr[i], p, "im", 0.0))});
  }
  return modes;
}

Profile read_profile(const Reader& r, const json& obj, const std::string& path) {
  r.only_keys(obj, path, {"type", "a", "n", "modes", "base", "L", "norm_index"});
  const std::string type = r.text(obj, path, "type", "");
  Profile p;
  if (type == "zero") {
    p.kind = Profile::Kind::zero;
  } else if (type == "constant") {
    p.kind = Profile::Kind::constant;
    p.a = r.number(obj, path, "a", 0.0);
  } else if (type == "plane_wave") {
    p.kind = Profile::Kind::plane_wave;
    p.a = r.number(obj, path, "a", 0.0);
    p.n = r.integer(obj, path, "n", 1);
  } else if (type == "mode_list") {
    p.kind = Profile::Kind::mode_list;
    if (!obj.contains("modes")) r.fail(Reader::join(path, "modes"), "missing");
    p.modes = read_modes(r, obj.at("modes"), Reader::join(path, "modes"));
  } else if (type == "highfreq") {
    p.kind = Profile::Kind::highfreq;
    if (!obj.contains("base")) r.fail(Reader::join(path, "base"), "missing");
    const Profile base = read_profile(r, obj.at("base"), Reader::join(path, "base"));
    p.modes = base.mode_amplitudes();
    p.L = r.integer(obj, path, "L", 1, 1);
    p.norm_index = r.number(obj, path, "norm_index", 2.0);
  } else {
    r.fail(Reader::join(path, "type"), "expected zero, constant, plane_wave, mode_list or highfreq");
  }
  return p;
}

CheckSpec read_check(const Reader& r, const json& obj, const std::string& path) {
  if (!obj.is_object()) r.fail(path, "expected an object");
  CheckSpec c;
  c.kind = r.text(obj, path, "kind", "");
  const auto& kinds = check_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    r.fail(Reader::join(path, "kind"), "unknown check kind '" + c.kind + "'");
  c.name = r.text(obj, path, "name", c.kind);
  if (obj.contains("criterion")) c.criterion = r.integer(obj, path, "criterion", 0, 1);
  if (!obj.contains("bound")) r.fail(Reader::join(path, "bound"), "missing");
  c.bound = r.number(obj, path, "bound", 0.0);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    if (key == "kind" || key == "name" || key == "criterion" || key == "bound") continue;
    if (it->is_number()) {
      c.params[key] = r.number(obj, path, key, 0.0);
    } else if (it->is_array()) {
      std::vector<double> values;
      for (const auto& v : *it) {
        if (!v.is_number()) r.fail(Reader::join(path, key), "expected an array of numbers");
        values.push_back(v.get<double>());
      }
      c.lists[key] = std::move(values);
    } else {
      r.fail(Reader::join(path, key), "check parameters must be numbers or arrays of numbers");
    }
  }
  return c;
}

std::pair<int, int> line_and_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string s_tag(double s) { return csv::format(s); }

}  // namespace

std::vector<ModeAmplitude> Profile::mode_amplitudes() const {
  switch (kind) {
    case Kind::zero: return {};
    case Kind::constant: return {{0, cplx(a)}};
    case Kind::plane_wave: return {{n, cplx(a)}};
    case Kind::mode_list: return modes;
    case Kind::highfreq: return shift_profile(modes, L, norm_index);
  }
  return {};
}

std::string Profile::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero: os << "zero"; break;
    case Kind::constant: os << "constant a=" << csv::format(a); break;
    case Kind::plane_wave: os << "plane_wave n=" << n << " a=" << csv::format(a); break;
    case Kind::mode_list: os << "mode_list"; break;
    case Kind::highfreq: os << "highfreq L=" << L; break;
  }
  if (kind == Kind::mode_list || kind == Kind::highfreq)
    for (const auto& m : mode_amplitudes())
      os << " (" << m.n << ", " << csv::format(m.amplitude.real()) << ", " << csv::format(m.amplitude.imag()) << ")";
  return os.str();
}

double CheckSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool Scenario::has_stage(const std::string& stage) const {
  return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

StateField Scenario::initial_state() const {
  return field_from_modes(SpectralGrid(point_count), profile.mode_amplitudes());
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw ConfigurationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                             ": malformed JSON (" + e.what() + ")");
  }
  const Reader r(source);
  r.only_keys(root, "", {"name", "level", "profile", "grid", "dt", "t_end", "stride", "K", "s_values",
                         "seed", "stages", "sigma_n", "amplitude_floor", "spectrum",
                         "normalization", "output", "checks"});
  Scenario sc;
  sc.name = r.text(root, "", "name", "scenario");
  sc.level = r.text(root, "", "level", "full");
  if (sc.level != "quick" && sc.level != "full") r.fail("level", "expected quick or full");
  if (!root.contains("profile")) r.fail("profile", "missing");
  sc.profile = read_profile(r, root.at("profile"), "profile");
  sc.point_count = r.integer(root, "", "grid", sc.point_count, 8);
  if (sc.point_count % 2 != 0) r.fail("grid", "must be even");
  sc.dt = r.number(root, "", "dt", sc.dt, true);
  sc.t_end = r.number(root, "", "t_end", sc.t_end, true);
  sc.stride = r.integer(root, "", "stride", sc.stride, 1);
  sc.K = r.integer(root, "", "K", sc.K, 4);
  if (root.contains("s_values")) {
    const json& arr = root.at("s_values");
    if (!arr.is_array() || arr.empty()) r.fail("s_values", "expected a non-empty array of numbers");
    sc.s_values.clear();
    for (const auto& v : arr) {
      if (!v.is_number() || v.get<double>() < 0.0) r.fail("s_values", "entries must be non-negative numbers");
      sc.s_values.push_back(v.get<double>());
    }
  }
  sc.seed = static_cast<std::uint64_t>(r.integer(root, "", "seed", 0, 0));
  if (root.contains("stages")) {
    const json& arr = root.at("stages");
    if (!arr.is_array()) r.fail("stages", "expected an array of stage names");
    for (const auto& v : arr) {
      if (!v.is_string() || std::find(kStages.begin(), kStages.end(), v.get<std::string>()) == kStages.end())
        r.fail("stages", "stages are simulate, spectrum, sigma, frequencies, compare, checks");
      sc.stages.push_back(v.get<std::string>());
    }
  } else {
    sc.stages = kStages;
  }
  if (root.contains("sigma_n")) {
    const json& arr = root.at("sigma_n");
    if (!arr.is_array()) r.fail("sigma_n", "expected an array of integers");
    for (const auto& v : arr) {
      if (!v.is_number_integer() || std::abs(v.get<long long>()) > sc.K)
        r.fail("sigma_n", "entries must be integers in [-K, K]");
      sc.sigma_n.push_back(v.get<int>());
    }
  }
  sc.amplitude_floor = r.number(root, "", "amplitude_floor", sc.amplitude_floor, true);
  if (root.contains("spectrum")) {
    const json& o = root.at("spectrum");
    r.only_keys(o, "spectrum", {"cells", "scan_points", "discriminant_noise", "gap_tol", "root_tol", "argument_height"});
    auto& s = sc.spectrum;
    s.cells = r.integer(o, "spectrum", "cells", s.cells, 0);
    s.scan_points = r.integer(o, "spectrum", "scan_points", s.scan_points, 8);
    s.discriminant_noise = r.number(o, "spectrum", "discriminant_noise", s.discriminant_noise, true);
    s.gap_tol = r.number(o, "spectrum", "gap_tol", s.gap_tol, true);
    s.root_tol = r.number(o, "spectrum", "root_tol", s.root_tol, true);
    s.argument_height = r.number(o, "spectrum", "argument_height", s.argument_height, true);
    if (s.cells != 0 && (s.cells < sc.point_count || s.cells % sc.point_count != 0))
      r.fail("spectrum.cells", "must be 0 or a multiple of grid");
  }
  if (root.contains("normalization")) {
    const json& o = root.at("normalization");
    r.only_keys(o, "normalization", {"nodes", "neighbor_fraction", "radius_scale", "tolerance", "certificate", "max_iterations"});
    auto& n = sc.normalization;
    n.nodes = r.integer(o, "normalization", "nodes", n.nodes, 8);
    n.neighbor_fraction = r.number(o, "normalization", "neighbor_fraction", n.neighbor_fraction, true);
    n.radius_scale = r.number(o, "normalization", "radius_scale", n.radius_scale, true);
    n.tolerance = r.number(o, "normalization", "tolerance", n.tolerance, true);
    n.certificate = r.number(o, "normalization", "certificate", n.certificate, true);
    n.max_iterations = r.integer(o, "normalization", "max_iterations", n.max_iterations, 1);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    r.only_keys(o, "output", {"trajectory_max_mode", "trajectory_sample_stride", "sigma_tables"});
    auto& out = sc.output;
    out.trajectory_max_mode = r.integer(o, "output", "trajectory_max_mode", out.trajectory_max_mode, -1);
    out.trajectory_sample_stride = r.integer(o, "output", "trajectory_sample_stride", out.trajectory_sample_stride, 1);
    out.sigma_tables = r.flag(o, "output", "sigma_tables", out.sigma_tables);
  }
  if (root.contains("checks")) {
    const json& arr = root.at("checks");
    if (!arr.is_array()) r.fail("checks", "expected an array of check objects");
    for (std::size_t i = 0; i < arr.size(); ++i)
      sc.checks.push_back(read_check(r, arr[i], "checks[" + std::to_string(i) + "]"));
  }
  for (const auto& m : sc.profile.mode_amplitudes()) {
    const SpectralGrid grid(sc.point_count);
    if (!grid.holds(m.n) || m.n == grid.min_mode())
      r.fail("profile", "mode " + std::to_string(m.n) + " is not resolved by grid " + std::to_string(sc.point_count));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

std::string summary_json(const ScenarioResult& result) {
  json j;
  j["scenario"] = result.name;
  j["pass"] = result.pass;
  j["seconds"] = result.seconds;
  j["checks"] = json::array();
  std::map<int, bool> criteria;
  for (const auto& c : result.checks) {
    json e;
    e["name"] = c.name;
    e["kind"] = c.kind;
    e["criterion"] = c.criterion ? json(*c.criterion) : json(nullptr);
    e["value"] = c.value;
    e["bound"] = c.bound;
    e["relation"] = c.relation;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    j["checks"].push_back(e);
    if (c.criterion) {
      auto [it, inserted] = criteria.emplace(*c.criterion, c.pass);
      if (!inserted) it->second = it->second && c.pass;
    }
  }
  j["criteria"] = json::object();
  for (int k = 1; k <= kCriterionCount; ++k) {
    const auto it = criteria.find(k);
    j["criteria"][std::to_string(k)] = it == criteria.end() ? "not_covered" : (it->second ? "pass" : "fail");
  }
  j["artifacts"] = result.artifacts;
  return j.dump(2) + "\n";
}

ScenarioResult run_scenario(const Scenario& sc, const std::optional<std::filesystem::path>& outdir) {
  ScenarioContext ctx(sc);
  ScenarioResult result;
  result.name = sc.name;
  if (outdir) std::filesystem::create_directories(*outdir);

  const auto write = [&](const std::string& relative, const auto& writer) {
    if (!outdir) return;
    const auto path = *outdir / relative;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigurationError("cannot write " + path.string());
    writer(os);
    result.artifacts.push_back(relative);
  };
  const auto stage = [&](const std::string& name, const auto& body) {
    if (!sc.has_stage(name)) return;
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  stage("simulate", [&] {
    const auto& traj = ctx.trajectory();
    write("trajectory.csv", [&](std::ostream& os) {
      write_trajectory_csv(os, traj, sc.output.trajectory_max_mode, sc.output.trajectory_sample_stride);
    });
    write("conserved.csv", [&](std::ostream& os) { write_conserved_csv(os, conserved_report(traj)); });
  });
  stage("spectrum", [&] { write("gaps.csv", [&](std::ostream& os) { write_gap_csv(os, ctx.gaps()); }); });
  stage("sigma", [&] {
    const auto& sigmas = ctx.sigmas();
    if (!sc.output.sigma_tables) return;
    for (const auto& [n, sig] : sigmas)
      write("sigma/sigma_n" + std::to_string(n) + ".csv",
            [&](std::ostream& os) { write_sigma_csv(os, ctx.gaps(), sig, sc.normalization); });
  });
  stage("frequencies", [&] {
    write("frequencies.csv", [&](std::ostream& os) { write_frequency_csv(os, ctx.frequencies()); });
  });
  stage("compare", [&] {
    for (double s : sc.s_values) {
      write("compare_v_s" + s_tag(s) + ".csv",
            [&](std::ostream& os) { write_norm_series_csv(os, ctx.difference(Reference::v, s)); });
      write("compare_w_s" + s_tag(s) + ".csv",
            [&](std::ostream& os) { write_norm_series_csv(os, ctx.difference(Reference::w, s)); });
      write("norm_s" + s_tag(s) + ".csv", [&](std::ostream& os) { write_norm_series_csv(os, ctx.norm(s)); });
    }
    write("extracted.csv", [&](std::ostream& os) { write_extracted_csv(os, ctx.extracted()); });
  });
  stage("checks", [&] {
    for (const auto& spec : sc.checks) result.checks.push_back(evaluate_check(ctx, spec));
  });

  result.pass = std::all_of(result.checks.begin(), result.checks.end(), [](const CheckResult& c) { return c.pass; });
  result.seconds = ctx.elapsed_seconds();
  if (outdir) {
    result.artifacts.push_back("summary.json");
    std::ofstream os(*outdir / "summary.json");
    os << summary_json(result);
  }
  return result;
}

int run_scenario_file(const std::filesystem::path& path, const std::filesystem::path& outdir) {
  const ScenarioResult result = run_scenario(load_scenario(path), outdir);
  return result.pass ? 0 : 1;
}

}  // namespace nlslab
