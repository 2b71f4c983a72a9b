#include "etlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace etlab {

using nlohmann::json;

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(join(path, k), "unknown field");
  }
}

const json* section(const json& root, const std::string& key, const std::set<std::string>& allowed) {
  if (!root.contains(key)) return nullptr;
  const json& s = root.at(key);
  if (!s.is_object()) throw ConfigError(key, "must be an object");
  check_keys(s, key, allowed);
  return &s;
}

double get_real(const json& obj, const std::string& path, const std::string& key, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

long long get_int(const json& obj, const std::string& path, const std::string& key, long long def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
  return v.get<long long>();
}

std::size_t get_count(const json& obj, const std::string& path, const std::string& key,
                      std::size_t def, long long min) {
  const long long v = get_int(obj, path, key, static_cast<long long>(def));
  if (v < min) throw ConfigError(join(path, key), "must be an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
  return v.get<std::string>();
}

std::vector<double> get_reals(const json& obj, const std::string& path, const std::string& key,
                              const std::vector<double>& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key), "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError(join(path, key) + "[" + std::to_string(i) + "]", "must be a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

template <class E>
E get_enum(const json& obj, const std::string& path, const std::string& key, E def,
           const std::vector<std::pair<std::string, E>>& table) {
  if (!obj.contains(key)) return def;
  const std::string s = get_string(obj, path, key, "");
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  std::string names;
  for (const auto& [name, value] : table) names += (names.empty() ? "" : ", ") + name;
  throw ConfigError(join(path, key), "must be one of {" + names + "}");
}

void apply_override(json& root, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("overrides", "expected key=value, got '" + text + "'");
  }
  const std::string key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component in override");
    if (!node->is_object()) throw ConfigError(key, "override path crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

CosineField parse_field(const json& j, const std::string& path, CosineField def) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  check_keys(j, path, {"mean", "amp", "mode", "rate"});
  def.mean = get_real(j, path, "mean", def.mean);
  def.amp = get_real(j, path, "amp", def.amp);
  def.mode = get_real(j, path, "mode", def.mode);
  def.rate = get_real(j, path, "rate", def.rate);
  return def;
}

}  // namespace

InitFunction InitConfig::function() const {
  if (rho0 && theta0) return explicit_init(*rho0, *theta0);
  return etlab::preset(preset);
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                       std::string_view mode) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("", "configuration is not valid JSON");
  if (!root.is_object()) throw ConfigError("", "configuration must be a JSON object");
  for (const auto& o : overrides) apply_override(root, o);
  check_keys(root, "", {"mode", "grid", "scheme", "kinetic", "init", "output", "sweep", "mms", "audit"});

  RunConfig c;
  c.mode = get_string(root, "", "mode", std::string(mode));
  if (!mode.empty() && c.mode != mode) {
    throw ConfigError("mode", "'" + c.mode + "' conflicts with subcommand '" + std::string(mode) + "'");
  }
  if (std::find(kModes.begin(), kModes.end(), c.mode) == kModes.end()) {
    throw ConfigError("mode", "unknown mode '" + c.mode + "'");
  }

  if (const json* g = section(root, "grid", {"n_cells", "length"})) {
    c.n_cells = get_count(*g, "grid", "n_cells", c.n_cells, 3);
    c.length = get_real(*g, "grid", "length", c.length);
    if (!(c.length > 0.0)) throw ConfigError("grid.length", "must be positive");
  }

  SchemeParams& s = c.scheme;
  if (const json* j = section(root, "scheme",
                              {"tau", "eps", "delta", "n_exp", "t_final", "fp_tol", "fp_max_iter",
                               "fp_damping", "tau_backoff_limit", "inner_mode", "sigma_ramp",
                               "picard_solver", "edge_mean", "overflow_cap", "positivity_floor",
                               "tol_ent"})) {
    const std::string p = "scheme";
    s.tau = get_real(*j, p, "tau", s.tau);
    s.eps = get_real(*j, p, "eps", s.eps);
    s.delta = get_real(*j, p, "delta", s.delta);
    s.n_exp = get_real(*j, p, "n_exp", s.n_exp);
    s.t_final = get_real(*j, p, "t_final", s.t_final);
    s.fp_tol = get_real(*j, p, "fp_tol", s.fp_tol);
    s.fp_max_iter = static_cast<int>(get_int(*j, p, "fp_max_iter", s.fp_max_iter));
    s.fp_damping = get_real(*j, p, "fp_damping", s.fp_damping);
    s.tau_backoff_limit = static_cast<int>(get_int(*j, p, "tau_backoff_limit", s.tau_backoff_limit));
    s.inner_mode = get_enum<InnerMode>(*j, p, "inner_mode", s.inner_mode,
                                       {{"paper_picard", InnerMode::paper_picard},
                                        {"coupled_implicit", InnerMode::coupled_implicit}});
    s.sigma_ramp = get_reals(*j, p, "sigma_ramp", s.sigma_ramp);
    s.picard_solver = get_enum<PicardSolver>(
        *j, p, "picard_solver", s.picard_solver,
        {{"newton", PicardSolver::newton}, {"successive", PicardSolver::successive}});
    s.edge_mean = get_enum<EdgeMean>(*j, p, "edge_mean", s.edge_mean,
                                     {{"arithmetic", EdgeMean::arithmetic},
                                      {"geometric", EdgeMean::geometric},
                                      {"harmonic", EdgeMean::harmonic}});
    s.overflow_cap = get_real(*j, p, "overflow_cap", s.overflow_cap);
    s.positivity_floor = get_real(*j, p, "positivity_floor", s.positivity_floor);
    s.tol_ent = get_real(*j, p, "tol_ent", s.tol_ent);
  }
  s.validate();

  KineticConfig& k = c.kinetic;
  if (const json* j = section(root, "kinetic",
                              {"eps", "v_max", "n_v", "reconstruction", "cfl", "simd",
                               "eps_values", "refine", "macro_tau"})) {
    const std::string p = "kinetic";
    k.eps = get_real(*j, p, "eps", k.eps);
    k.v_max = get_real(*j, p, "v_max", k.v_max);
    k.n_v = get_count(*j, p, "n_v", k.n_v, 2);
    k.options.reconstruction = get_enum<Reconstruction>(
        *j, p, "reconstruction", k.options.reconstruction,
        {{"van_leer", Reconstruction::van_leer}, {"upwind", Reconstruction::upwind}});
    k.options.cfl = get_real(*j, p, "cfl", k.options.cfl);
    k.options.simd = get_enum<SimdChoice>(*j, p, "simd", k.options.simd,
                                          {{"auto", SimdChoice::automatic},
                                           {"scalar", SimdChoice::scalar},
                                           {"avx2", SimdChoice::avx2}});
    k.eps_values = get_reals(*j, p, "eps_values", k.eps_values);
    k.refine = get_count(*j, p, "refine", k.refine, 1);
    k.macro_tau = get_real(*j, p, "macro_tau", k.macro_tau);
  }
  if (!(k.eps > 0.0)) throw ConfigError("kinetic.eps", "must be positive");
  if (!(k.v_max >= 0.0)) throw ConfigError("kinetic.v_max", "must be nonnegative (0 = automatic)");
  if (!(k.options.cfl > 0.0 && k.options.cfl <= 1.0)) throw ConfigError("kinetic.cfl", "must lie in (0, 1]");
  if (!(k.macro_tau > 0.0)) throw ConfigError("kinetic.macro_tau", "must be positive");
  if (k.eps_values.empty()) throw ConfigError("kinetic.eps_values", "must not be empty");
  for (std::size_t i = 0; i < k.eps_values.size(); ++i) {
    if (!(k.eps_values[i] > 0.0)) throw ConfigError("kinetic.eps_values", "entries must be positive");
    if (i > 0 && !(k.eps_values[i] < k.eps_values[i - 1])) {
      throw ConfigError("kinetic.eps_values", "entries must be strictly decreasing");
    }
  }

  if (const json* j = section(root, "init", {"preset", "rho0", "theta0"})) {
    c.init.preset = get_string(*j, "init", "preset", c.init.preset);
    if (j->contains("rho0") || j->contains("theta0")) {
      if (!j->contains("rho0") || !j->contains("theta0")) {
        throw ConfigError(j->contains("rho0") ? "init.theta0" : "init.rho0",
                          "explicit data needs both rho0 and theta0");
      }
      c.init.rho0 = get_reals(*j, "init", "rho0", {});
      c.init.theta0 = get_reals(*j, "init", "theta0", {});
      if (c.init.rho0->size() != c.n_cells) {
        throw ConfigError("init.rho0", "length " + std::to_string(c.init.rho0->size()) +
                                           " does not match grid.n_cells");
      }
      if (c.init.theta0->size() != c.n_cells) {
        throw ConfigError("init.theta0", "length " + std::to_string(c.init.theta0->size()) +
                                             " does not match grid.n_cells");
      }
    }
  }
  // resolves the preset / checks explicit arrays
  (void)c.init.function();

  if (const json* j = section(root, "output", {"directory", "snapshot_stride"})) {
    c.output.directory = get_string(*j, "output", "directory", c.output.directory);
    c.output.snapshot_stride = get_count(*j, "output", "snapshot_stride", c.output.snapshot_stride, 0);
  }
  if (c.output.directory.empty()) throw ConfigError("output.directory", "must not be empty");

  if (const json* j = section(root, "sweep", {"varied"})) {
    if (j->contains("varied")) {
      const json& v = j->at("varied");
      if (!v.is_object() || v.size() != 1) {
        throw ConfigError("sweep.varied", "must map exactly one parameter to its values");
      }
      const auto it = v.begin();
      c.sweep.param = study_param_from_string(it.key());
      c.sweep.values = get_reals(v, "sweep.varied", it.key(), {});
      for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
        const double x = c.sweep.values[i];
        const bool ok = c.sweep.param == StudyParam::tau ? x > 0.0 : x >= 0.0;
        if (!ok) throw ConfigError("sweep.varied." + it.key(), "entries out of range");
      }
    }
  }
  if (c.sweep.values.size() < 2) throw ConfigError("sweep.varied", "need at least two values");
  for (std::size_t i = 1; i < c.sweep.values.size(); ++i) {
    if (!(c.sweep.values[i] < c.sweep.values[i - 1])) {
      throw ConfigError("sweep.varied", "values must be strictly decreasing");
    }
  }

  MmsSpec& m = c.mms;
  bool solution_given = false;
  std::string refine = "space";
  if (const json* j = section(root, "mms", {"refine", "resolutions", "tau", "taus", "n_cells",
                                            "t_final", "length", "fp_tol", "solution"})) {
    const std::string p = "mms";
    refine = get_string(*j, p, "refine", refine);
    if (refine != "space" && refine != "time") throw ConfigError("mms.refine", "must be 'space' or 'time'");
    if (j->contains("resolutions")) {
      const auto r = get_reals(*j, p, "resolutions", {});
      m.resolutions.clear();
      for (double x : r) {
        if (!(x >= 3.0) || x != std::floor(x)) throw ConfigError("mms.resolutions", "entries must be integers >= 3");
        m.resolutions.push_back(static_cast<std::size_t>(x));
      }
    }
    m.tau = get_real(*j, p, "tau", m.tau);
    m.taus = get_reals(*j, p, "taus", m.taus);
    m.n_cells = get_count(*j, p, "n_cells", m.n_cells, 3);
    m.t_final = get_real(*j, p, "t_final", m.t_final);
    m.length = get_real(*j, p, "length", m.length);
    m.fp_tol = get_real(*j, p, "fp_tol", m.fp_tol);
    if (j->contains("solution")) {
      const json& sj = j->at("solution");
      if (!sj.is_object()) throw ConfigError("mms.solution", "must be an object");
      check_keys(sj, "mms.solution", {"rho", "theta"});
      if (sj.contains("rho")) m.solution.rho = parse_field(sj.at("rho"), "mms.solution.rho", m.solution.rho);
      if (sj.contains("theta")) m.solution.theta = parse_field(sj.at("theta"), "mms.solution.theta", m.solution.theta);
      solution_given = true;
    }
  }
  m.refine = refine == "time" ? MmsRefine::time : MmsRefine::space;
  if (m.refine == MmsRefine::time && !solution_given) {
    const auto td = time_dependent_solution();
    m.solution = td;
  }
  if (!(m.tau > 0.0)) throw ConfigError("mms.tau", "must be positive");
  if (!(m.t_final > 0.0)) throw ConfigError("mms.t_final", "must be positive");
  if (!(m.length > 0.0)) throw ConfigError("mms.length", "must be positive");
  if (!(m.fp_tol > 0.0)) throw ConfigError("mms.fp_tol", "must be positive");
  for (double t : m.taus) {
    if (!(t > 0.0)) throw ConfigError("mms.taus", "entries must be positive");
  }
  try {
    m.solution.validate();
  } catch (const DomainError& e) {
    throw ConfigError("mms.solution", e.what());
  }

  if (const json* j = section(root, "audit", {"input_directory"})) {
    c.audit.input_directory = get_string(*j, "audit", "input_directory", "");
  }
  return c;
}

}  // namespace etlab
