#include "manylaser/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "manylaser/errors.hpp"

namespace manylaser {

using nlohmann::json;

namespace {

const std::vector<std::pair<Mode, std::string>> kModes = {
    {Mode::Ness, "ness"},         {Mode::Trajectory, "trajectory"},     {Mode::Sweep, "sweep"},
    {Mode::Spectrum, "spectrum"}, {Mode::Correlations, "correlations"}, {Mode::Cooperativity, "cooperativity"}};
const std::vector<std::pair<Method, std::string>> kMethods = {
    {Method::Exact, "exact"}, {Method::Jump, "jump"}, {Method::Diffusive, "diffusive"}};

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& field, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type (") + e.what() + ")");
  }
}

std::vector<double> spaced(const json& spec, const std::string& field, bool logarithmic) {
  if (!spec.is_array() || spec.size() != 3) throw ConfigError(field, "expected [start, stop, count]");
  const double a = spec[0].get<double>(), b = spec[1].get<double>();
  const int n = spec[2].get<int>();
  if (n < 1) throw ConfigError(field, "count must be >= 1");
  if (logarithmic && (a <= 0 || b <= 0)) throw ConfigError(field, "logspace bounds must be positive");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v[i] = logarithmic ? std::exp(std::log(a) + s * (std::log(b) - std::log(a))) : a + s * (b - a);
  }
  return v;
}

SweepAxis parse_axis(const json& j, const std::string& field) {
  reject_unknown(j, field, {"name", "values", "linspace", "logspace"});
  SweepAxis axis;
  axis.name = get<std::string>(j, "name", field + ".name", "");
  const int given = j.contains("values") + j.contains("linspace") + j.contains("logspace");
  if (given != 1) throw ConfigError(field, "give exactly one of values, linspace, logspace");
  if (j.contains("values")) axis.values = get<std::vector<double>>(j, "values", field + ".values", {});
  if (j.contains("linspace")) axis.values = spaced(j["linspace"], field + ".linspace", false);
  if (j.contains("logspace")) axis.values = spaced(j["logspace"], field + ".logspace", true);
  return axis;
}

json params_json(const SystemParams& p) {
  return json{{"L", p.L}, {"J", p.J},         {"U", p.U},         {"g", p.g},
              {"P", p.P}, {"kappa", p.kappa}, {"n_max", p.n_max}, {"boundary", p.boundary}};
}

}  // namespace

std::string to_string(Mode mode) {
  for (const auto& [m, s] : kModes)
    if (m == mode) return s;
  return "?";
}

std::string to_string(Method method) {
  for (const auto& [m, s] : kMethods)
    if (m == method) return s;
  return "?";
}

void RunConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(schema_version));
  }
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigError("params", e.what());
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& a = sweep[k];
    const std::string f = "sweep[" + std::to_string(k) + "]";
    if (a.name != "P" && a.name != "U" && a.name != "L") throw ConfigError(f + ".name", "must be one of P, U, L");
    if (!seen.insert(a.name).second) throw ConfigError(f + ".name", "axis " + a.name + " repeated");
    if (a.values.empty()) throw ConfigError(f + ".values", "must be nonempty");
    for (double v : a.values) {
      if (!std::isfinite(v)) throw ConfigError(f + ".values", "must be finite");
      if (a.name == "L" && (v < 1 || v != std::floor(v))) throw ConfigError(f + ".values", "L must be a positive integer");
      if (a.name == "P" && v < 0) throw ConfigError(f + ".values", "P must be >= 0");
      try {
        SystemParams q = params;
        if (a.name == "L") q.L = static_cast<int>(v);
        if (a.name == "P") q.P = v;
        if (a.name == "U") q.U = v;
        q.validate();
      } catch (const DomainError& e) {
        throw ConfigError(f + ".values", e.what());
      }
    }
  }
  if (mode == Mode::Sweep && sweep.empty()) throw ConfigError("sweep", "mode sweep needs at least one axis");
  if (mode == Mode::Trajectory && method == Method::Exact) {
    throw ConfigError("method", "mode trajectory needs method jump or diffusive");
  }
  if ((mode == Mode::Spectrum || mode == Mode::Cooperativity || mode == Mode::Ness) && method != Method::Exact) {
    throw ConfigError("method", "mode " + to_string(mode) + " is exact only");
  }
  if (method != Method::Exact) {
    if (ensemble.num_trajectories < 2) throw ConfigError("ensemble.num_trajectories", "must be >= 2");
    const Schedule& s = ensemble.schedule;
    if (s.dt < 0 || s.t_burn < 0 || s.t_total < 0 || s.sample_every < 0) {
      throw ConfigError("ensemble.schedule", "times must be >= 0");
    }
    if (s.t_total > 0 && s.t_total <= s.t_burn) throw ConfigError("ensemble.schedule.t_total", "must exceed t_burn");
  }
  if (solver.memory_budget_mib < 1) throw ConfigError("solver.memory_budget_mib", "must be >= 1");
  if (solver.max_n_max < 2) throw ConfigError("solver.max_n_max", "must be >= 2");
  if (output_path.empty()) throw ConfigError("output.path", "must be nonempty");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<config>", std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j, "", {"schema_version", "name", "description", "mode", "method", "params", "sweep", "ensemble",
                         "solver", "output"});
  RunConfig c;
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  c.schema_version = get<int>(j, "schema_version", "schema_version", 0);
  c.name = get<std::string>(j, "name", "name", "");
  c.description = get<std::string>(j, "description", "description", "");

  if (!j.contains("mode")) throw ConfigError("mode", "missing");
  const auto mode = get<std::string>(j, "mode", "mode", "");
  bool found = false;
  for (const auto& [m, s] : kModes)
    if (s == mode) c.mode = m, found = true;
  if (!found) throw ConfigError("mode", "unknown mode '" + mode + "'");
  const auto method = get<std::string>(j, "method", "method", c.mode == Mode::Trajectory ? "jump" : "exact");
  found = false;
  for (const auto& [m, s] : kMethods)
    if (s == method) c.method = m, found = true;
  if (!found) throw ConfigError("method", "unknown method '" + method + "'");

  if (j.contains("params")) {
    const json& p = j["params"];
    reject_unknown(p, "params", {"L", "J", "U", "g", "P", "kappa", "n_max", "boundary"});
    SystemParams& q = c.params;
    q.L = get<int>(p, "L", "params.L", q.L);
    q.J = get<double>(p, "J", "params.J", q.J);
    q.U = get<double>(p, "U", "params.U", q.U);
    q.g = get<double>(p, "g", "params.g", q.g);
    q.P = get<double>(p, "P", "params.P", q.P);
    q.kappa = get<double>(p, "kappa", "params.kappa", q.kappa);
    q.n_max = get<int>(p, "n_max", "params.n_max", q.n_max);
    q.boundary = get<std::string>(p, "boundary", "params.boundary", q.boundary);
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (s.is_object()) {
      c.sweep.push_back(parse_axis(s, "sweep"));
    } else if (s.is_array()) {
      for (std::size_t k = 0; k < s.size(); ++k) c.sweep.push_back(parse_axis(s[k], "sweep[" + std::to_string(k) + "]"));
    } else {
      throw ConfigError("sweep", "expected an axis object or a list of axes");
    }
  }
  if (j.contains("ensemble")) {
    const json& e = j["ensemble"];
    reject_unknown(e, "ensemble", {"num_trajectories", "base_seed", "schedule", "event_log"});
    c.ensemble.num_trajectories = get<int>(e, "num_trajectories", "ensemble.num_trajectories", 500);
    c.ensemble.base_seed = get<std::uint64_t>(e, "base_seed", "ensemble.base_seed", 1);
    c.ensemble.event_log = get<std::string>(e, "event_log", "ensemble.event_log", "");
    if (e.contains("schedule")) {
      const json& s = e["schedule"];
      reject_unknown(s, "ensemble.schedule", {"dt", "t_burn", "t_total", "sample_every"});
      c.ensemble.schedule.dt = get<double>(s, "dt", "ensemble.schedule.dt", 0.0);
      c.ensemble.schedule.t_burn = get<double>(s, "t_burn", "ensemble.schedule.t_burn", 0.0);
      c.ensemble.schedule.t_total = get<double>(s, "t_total", "ensemble.schedule.t_total", 0.0);
      c.ensemble.schedule.sample_every = get<double>(s, "sample_every", "ensemble.schedule.sample_every", 0.0);
    }
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    reject_unknown(s, "solver", {"memory_budget_mib", "max_n_max"});
    c.solver.memory_budget_mib = get<std::size_t>(s, "memory_budget_mib", "solver.memory_budget_mib", 3072);
    c.solver.max_n_max = get<int>(s, "max_n_max", "solver.max_n_max", 400);
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], "output", {"path"});
    c.output_path = get<std::string>(j["output"], "path", "output.path", c.output_path);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["description"] = c.description;
  j["mode"] = to_string(c.mode);
  j["method"] = to_string(c.method);
  j["params"] = params_json(c.params);
  j["sweep"] = json::array();
  for (const auto& a : c.sweep) j["sweep"].push_back({{"name", a.name}, {"values", a.values}});
  const Schedule& s = c.ensemble.schedule;
  j["ensemble"] = {{"num_trajectories", c.ensemble.num_trajectories},
                   {"base_seed", c.ensemble.base_seed},
                   {"event_log", c.ensemble.event_log},
                   {"schedule", {{"dt", s.dt}, {"t_burn", s.t_burn}, {"t_total", s.t_total}, {"sample_every", s.sample_every}}}};
  j["solver"] = {{"memory_budget_mib", c.solver.memory_budget_mib}, {"max_n_max", c.solver.max_n_max}};
  j["output"] = {{"path", c.output_path}};
  return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& config) {
  // the output path does not change the data
  RunConfig c = config;
  c.output_path.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace manylaser
