#include "etlab/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>

#include "etlab/config.hpp"
#include "etlab/error.hpp"
#include "etlab/experiments.hpp"
#include "etlab/io.hpp"
#include "etlab/kinetic.hpp"
#include "etlab/scheme.hpp"
#include "json.hpp"

namespace etlab {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kUsage =
    "usage: etlab <macro|kinetic|compare|sweep|mms|audit> <config.json> [key=value ...]";
constexpr const char* kKineticBoundary = "specular reflection (not specified by the model; chosen here)";

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json params_json(const SchemeParams& p) {
  ordered_json j;
  j["tau"] = p.tau;
  j["eps"] = p.eps;
  j["delta"] = p.delta;
  j["n_exp"] = p.n_exp;
  j["t_final"] = p.t_final;
  j["fp_tol"] = p.fp_tol;
  j["fp_max_iter"] = p.fp_max_iter;
  j["fp_damping"] = p.fp_damping;
  j["tau_backoff_limit"] = p.tau_backoff_limit;
  j["inner_mode"] = to_string(p.inner_mode);
  j["picard_solver"] = to_string(p.picard_solver);
  j["edge_mean"] = to_string(p.edge_mean);
  j["sigma_ramp"] = p.sigma_ramp;
  j["tol_ent"] = p.tol_ent;
  return j;
}

ordered_json step_json(std::size_t k, double t, const StepReport& r, const SchemeParams& p,
                       double length) {
  ordered_json j;
  j["step"] = k;
  j["t"] = t;
  j["tau_used"] = r.tau_used;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["backoffs"] = r.backoffs;
  ordered_json e;
  e["h_prev"] = r.entropy_before;
  e["h_next"] = r.entropy_after;
  e["slack"] = r.tau_used * p.delta * std::exp(2.0 * (p.n_exp + 1.0)) * length;
  e["tolerance"] = p.tol_ent * (1.0 + std::abs(r.entropy_before));
  e["diss_total"] = r.diss_total;
  e["dissipation"] = r.dissipation_terms;
  e["pass"] = r.entropy_pass;
  j["entropy"] = e;
  ordered_json b;
  b["mass_lhs"] = r.mass_lhs;
  b["mass_rhs"] = r.mass_rhs;
  b["energy_lhs"] = r.energy_lhs;
  b["energy_rhs"] = r.energy_rhs;
  b["pass"] = r.budget_pass;
  j["budget"] = b;
  return j;
}

std::string snapshot_name(std::size_t k) { return "snapshot_" + std::to_string(k) + ".csv"; }

// Macro run writing trajectory.csv, snapshot_<k>.csv and audits.json into
// `dir`. Partial outputs are flushed before a solver failure propagates.
void macro_run(const Grid1D& grid, const MacroState& init, const SchemeParams& p,
               std::size_t stride, const fs::path& dir) {
  std::vector<io::TrajectoryRow> rows;
  ordered_json steps = ordered_json::array();
  bool all_entropy = true, all_budget = true;
  std::size_t last_written = static_cast<std::size_t>(-1);
  EntropicState last_state;
  std::size_t last_k = 0;

  auto flush = [&](const char* status) {
    io::write_file(dir / "trajectory.csv", io::trajectory_csv(rows));
    ordered_json a;
    a["status"] = status;
    a["params"] = params_json(p);
    a["n_cells"] = grid.n_cells;
    a["length"] = grid.length;
    a["steps"] = steps;
    a["all_entropy_pass"] = all_entropy;
    a["all_budget_pass"] = all_budget;
    io::write_file(dir / "audits.json", dump(a));
  };

  TransientOptions opts;
  opts.keep_states = false;
  opts.observer = [&](std::size_t k, double t, const EntropicState& s, const StepReport* r) {
    rows.push_back(io::trajectory_row(grid, t, s, r));
    if (r) {
      steps.push_back(step_json(k, t, *r, p, grid.length));
      all_entropy = all_entropy && r->entropy_pass;
      all_budget = all_budget && r->budget_pass;
    }
    if (k == 0 || (stride > 0 && k % stride == 0)) {
      io::write_file(dir / snapshot_name(k), io::snapshot_csv(grid, s));
      last_written = k;
    }
    last_state = s;
    last_k = k;
  };
  try {
    run_transient(grid, init, p, opts);
  } catch (const SolverError&) {
    if (last_written != last_k) io::write_file(dir / snapshot_name(last_k), io::snapshot_csv(grid, last_state));
    flush("failed");
    throw;
  }
  if (last_written != last_k) io::write_file(dir / snapshot_name(last_k), io::snapshot_csv(grid, last_state));
  flush("ok");
}

void kinetic_mode(const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const Grid1D grid = build_grid(c.n_cells, c.length);
  const MacroState init = c.init.function()(grid);
  const double tmax = *std::max_element(init.theta.begin(), init.theta.end());
  const double v_max = c.kinetic.v_max > 0.0 ? c.kinetic.v_max : 8.0 * std::sqrt(tmax);
  const auto vg = build_velocity_grid(v_max, c.kinetic.n_v);
  const auto run = run_kinetic(grid, vg, init.rho, init.theta, c.kinetic.eps, c.scheme.t_final,
                               c.kinetic.options, c.output.snapshot_stride);
  io::CsvTable traj;
  traj.header = {"t", "mass", "energy_total", "min_theta_b", "max_rho"};
  double m0 = 0.0, e0 = 0.0, worst_m = 0.0, worst_e = 0.0;
  for (std::size_t r = 0; r < run.records.size(); ++r) {
    const auto& rec = run.records[r];
    std::vector<double> e(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) e[i] = rec.theta_b[i] + rec.moments.kinetic_energy[i];
    const double mass = integrate(grid, rec.moments.rho);
    const double energy = integrate(grid, e);
    if (r == 0) {
      m0 = mass;
      e0 = energy;
    }
    worst_m = std::max(worst_m, std::abs(mass - m0) / std::abs(m0));
    worst_e = std::max(worst_e, std::abs(energy - e0) / std::abs(e0));
    traj.rows.push_back({io::fmt17(rec.time), io::fmt17(mass), io::fmt17(energy),
                         io::fmt17(*std::min_element(rec.theta_b.begin(), rec.theta_b.end())),
                         io::fmt17(*std::max_element(rec.moments.rho.begin(), rec.moments.rho.end()))});
    io::CsvTable snap;
    snap.header = {"x", "rho", "theta_b", "kinetic_energy", "mass_flux"};
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
      snap.rows.push_back({io::fmt17(grid.cell_centers[i]), io::fmt17(rec.moments.rho[i]),
                           io::fmt17(rec.theta_b[i]), io::fmt17(rec.moments.kinetic_energy[i]),
                           io::fmt17(rec.moments.mass_flux[i])});
    }
    io::write_file(dir / ("kinetic_snapshot_" + std::to_string(r) + ".csv"), io::write_csv(snap));
  }
  io::write_file(dir / "kinetic_trajectory.csv", io::write_csv(traj));
  ordered_json a;
  a["status"] = "ok";
  a["boundary"] = kKineticBoundary;
  a["kernels"] = resolve_simd(c.kinetic.options.simd);
  a["eps"] = c.kinetic.eps;
  a["v_max"] = v_max;
  a["n_v"] = c.kinetic.n_v;
  a["dt"] = run.dt;
  a["steps"] = run.steps;
  a["max_rel_mass_drift"] = worst_m;
  a["max_rel_energy_drift"] = worst_e;
  io::write_file(dir / "audits.json", dump(a));
  out << "kinetic: " << run.steps << " steps, dt = " << io::fmt17(run.dt) << "\n";
}

void compare_mode(const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const Grid1D grid = build_grid(c.n_cells, c.length);
  KineticStudySpec spec;
  spec.eps_values = c.kinetic.eps_values;
  spec.t_final = c.scheme.t_final;
  spec.v_max = c.kinetic.v_max;
  spec.n_v = c.kinetic.n_v;
  spec.refine = c.kinetic.refine;
  spec.macro_tau = c.kinetic.macro_tau;
  spec.options = c.kinetic.options;
  const auto study = kinetic_limit_study(grid, c.init.function(), spec);
  io::write_file(dir / "table.csv", table_to_csv(study.table));
  const auto ref = to_entropic(study.macro_final.rho, study.macro_final.theta);
  io::write_file(dir / "macro_reference.csv", io::snapshot_csv(grid, ref));
  bool monotone = true;
  for (std::size_t i = 1; i < study.table.rows.size(); ++i) {
    monotone = monotone && study.table.rows[i].err_rho < study.table.rows[i - 1].err_rho &&
               study.table.rows[i].err_energy < study.table.rows[i - 1].err_energy;
  }
  ordered_json a;
  a["status"] = "ok";
  a["boundary"] = kKineticBoundary;
  a["kernels"] = resolve_simd(c.kinetic.options.simd);
  a["refine"] = c.kinetic.refine;
  a["macro_tau"] = c.kinetic.macro_tau;
  a["errors_strictly_decreasing"] = monotone;
  io::write_file(dir / "audits.json", dump(a));
  out << "compare: " << study.table.rows.size() << " kinetic runs\n";
}

void sweep_mode(const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const Grid1D grid = build_grid(c.n_cells, c.length);
  const MacroState init = c.init.function()(grid);
  const auto& values = c.sweep.values;
  std::vector<MacroState> finals;
  io::CsvTable drift;
  drift.header = {"param", "mass_drift", "energy_drift"};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SchemeParams q = c.scheme;
    switch (c.sweep.param) {
      case StudyParam::eps:
        q.eps = values[i];
        break;
      case StudyParam::delta:
        q.delta = values[i];
        break;
      case StudyParam::tau:
        q.tau = values[i];
        break;
    }
    q.validate();
    const fs::path sub = dir / ("run_" + std::to_string(i));
    macro_run(grid, init, q, c.output.snapshot_stride, sub);
    const auto rows = io::parse_trajectory_csv(io::read_file(sub / "trajectory.csv"));
    const double dm = std::abs(rows.back().mass - rows.front().mass);
    const double de = std::abs(rows.back().energy - rows.front().energy);
    drift.rows.push_back({io::fmt17(values[i]), io::fmt17(dm), io::fmt17(de)});
    if (values[i] > 0.0 && dm > 0.0) {
      xs.push_back(values[i]);
      ys.push_back(dm);
    }
    // final state from the last snapshot written by the run
    std::size_t last = 0;
    for (const auto& e : fs::directory_iterator(sub)) {
      std::smatch m;
      const std::string name = e.path().filename().string();
      if (std::regex_match(name, m, std::regex(R"(snapshot_(\d+)\.csv)"))) {
        last = std::max<std::size_t>(last, std::stoul(m[1]));
      }
    }
    const auto snap = io::parse_snapshot_csv(io::read_file(sub / snapshot_name(last)));
    finals.push_back(to_primitive(snap.state));
  }
  ConvergenceTable table;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const auto [er, ee] = l1_errors(grid, finals[i], finals.back());
    table.rows.push_back({values[i], er, ee, std::nullopt, std::nullopt});
  }
  table.compute_orders();
  io::write_file(dir / "table.csv", table_to_csv(table));
  io::write_file(dir / "drift.csv", io::write_csv(drift));
  ordered_json a;
  a["status"] = "ok";
  a["param"] = to_string(c.sweep.param);
  a["values"] = values;
  if (xs.size() >= 2) a["mass_drift_loglog_slope"] = loglog_slope(xs, ys);
  io::write_file(dir / "audits.json", dump(a));
  out << "sweep: " << values.size() << " runs\n";
}

void audit_mode(const RunConfig& c, const fs::path& out_dir, std::ostream& out) {
  const fs::path in = c.audit.input_directory.empty() ? out_dir : fs::path(c.audit.input_directory);
  if (!fs::is_directory(in)) throw ConfigError("audit.input_directory", "not a directory: " + in.string());
  std::map<std::size_t, fs::path> snaps;
  const std::regex re(R"(snapshot_(\d+)\.csv)");
  for (const auto& e : fs::directory_iterator(in)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, re)) snaps[std::stoul(m[1])] = e.path();
  }
  if (snaps.size() < 2) throw ConfigError("audit.input_directory", "needs at least two snapshot_<k>.csv files");
  const Grid1D grid = build_grid(c.n_cells, c.length);
  ordered_json pairs = ordered_json::array();
  bool all = true;
  std::optional<std::pair<std::size_t, EntropicState>> prev;
  for (const auto& [k, path] : snaps) {
    auto snap = io::parse_snapshot_csv(io::read_file(path));
    if (snap.state.size() != grid.n_cells) {
      throw ConfigError("grid.n_cells", "does not match " + path.filename().string());
    }
    if (prev) {
      const std::size_t gap = k - prev->first;
      const double tau = c.scheme.tau * static_cast<double>(gap);
      const auto ea = entropy_audit(grid, prev->second, snap.state, c.scheme, tau);
      ordered_json j;
      j["from"] = prev->first;
      j["to"] = k;
      ordered_json e;
      e["h_prev"] = ea.h_prev;
      e["h_next"] = ea.h_next;
      e["slack"] = ea.slack;
      e["tolerance"] = ea.tolerance;
      e["edge_form_min"] = ea.edge_form_min;
      e["dissipation"] = ea.dissipation;
      e["pass"] = ea.pass;
      j["entropy"] = e;
      all = all && ea.pass;
      if (gap == 1) {
        const auto ba = budget_audit(grid, prev->second, snap.state, c.scheme, tau);
        ordered_json b;
        b["mass_lhs"] = ba.mass_lhs;
        b["mass_rhs"] = ba.mass_rhs;
        b["energy_lhs"] = ba.energy_lhs;
        b["energy_rhs"] = ba.energy_rhs;
        b["mass_pass"] = ba.mass_pass;
        b["energy_pass"] = ba.energy_pass;
        j["budget"] = b;
        all = all && ba.pass();
      } else {
        j["budget"] = nullptr;  // identities hold step by step only
      }
      pairs.push_back(j);
    }
    prev = std::make_pair(k, std::move(snap.state));
  }
  ordered_json a;
  a["status"] = "ok";
  a["input_directory"] = in.string();
  a["params"] = params_json(c.scheme);
  a["pairs"] = pairs;
  a["all_pass"] = all;
  io::write_file(out_dir / "audits.json", dump(a));
  out << "audit: " << pairs.size() << " snapshot pairs, " << (all ? "all pass" : "violations found")
      << "\n";
}

void write_error(const std::optional<fs::path>& dir, int code, const std::string& kind,
                 const std::string& message, const std::string& path, std::ostream& err) {
  ordered_json j;
  j["status"] = "error";
  j["exit_code"] = code;
  j["kind"] = kind;
  j["message"] = message;
  if (!path.empty()) j["path"] = path;
  err << j.dump() << "\n";
  if (dir) {
    try {
      io::write_file(*dir / "error.json", dump(j));
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<fs::path> dir;
  if (const char* env = std::getenv("ETLAB_OUTPUT_DIR"); env && *env) dir = fs::path(env);
  try {
    if (args.size() < 2) throw ConfigError("", kUsage);
    const std::string& mode = args[0];
    if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) {
      throw ConfigError("", "unknown subcommand '" + mode + "'; " + kUsage);
    }
    std::string text;
    try {
      text = io::read_file(args[1]);
    } catch (const std::exception&) {
      throw ConfigError("", "cannot read configuration file '" + args[1] + "'");
    }
    const std::vector<std::string> overrides(args.begin() + 2, args.end());
    const RunConfig c = parse_config(text, overrides, mode);
    if (!dir) dir = fs::path(c.output.directory);
    fs::create_directories(*dir);

    if (mode == "macro") {
      const Grid1D grid = build_grid(c.n_cells, c.length);
      macro_run(grid, c.init.function()(grid), c.scheme, c.output.snapshot_stride, *dir);
      out << "macro: wrote " << dir->string() << "\n";
    } else if (mode == "kinetic") {
      kinetic_mode(c, *dir, out);
    } else if (mode == "compare") {
      compare_mode(c, *dir, out);
    } else if (mode == "sweep") {
      sweep_mode(c, *dir, out);
    } else if (mode == "mms") {
      const auto table = mms_convergence(c.mms, c.scheme);
      io::write_file(*dir / "table.csv", table_to_csv(table));
      out << "mms: " << table.rows.size() << " rows\n";
    } else {
      audit_mode(c, *dir, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    write_error(dir, kExitConfig, "config", e.what(), e.path(), err);
    return kExitConfig;
  } catch (const SolverError& e) {
    write_error(dir, kExitSolver, "solver", e.what(), "", err);
    return kExitSolver;
  } catch (const OverflowError& e) {
    write_error(dir, kExitSolver, "solver", e.what(), "", err);
    return kExitSolver;
  } catch (const NotSpdError& e) {
    write_error(dir, kExitSolver, "solver", e.what(), "", err);
    return kExitSolver;
  } catch (const std::exception& e) {
    write_error(dir, kExitInternal, "internal", e.what(), "", err);
    return kExitInternal;
  }
}

}  // namespace etlab
