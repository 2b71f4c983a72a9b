#include "etlab/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace etlab::io {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string write_csv(const CsvTable& table) {
  std::string out;
  append_line(out, table.header);
  for (const auto& r : table.rows) append_line(out, r);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool first = true;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw std::invalid_argument("ragged CSV row");
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw std::invalid_argument("CSV without header");
  return t;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TrajectoryRow trajectory_row(const Grid1D& grid, double t, const EntropicState& state,
                             const StepReport* report) {
  const auto m = to_primitive(state);
  TrajectoryRow r;
  r.t = t;
  r.mass = total_mass(grid, m);
  r.energy = total_energy(grid, m);
  r.entropy = total_entropy(grid, state);
  r.diss_total = report ? report->diss_total : 0.0;
  r.min_theta = *std::min_element(m.theta.begin(), m.theta.end());
  r.max_rho = *std::max_element(m.rho.begin(), m.rho.end());
  r.fp_iters = report ? report->iterations : 0;
  return r;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  CsvTable t;
  t.header = split(kTrajectoryHeader);
  for (const auto& r : rows) {
    t.rows.push_back({fmt17(r.t), fmt17(r.mass), fmt17(r.energy), fmt17(r.entropy),
                      fmt17(r.diss_total), fmt17(r.min_theta), fmt17(r.max_rho),
                      std::to_string(r.fp_iters)});
  }
  return write_csv(t);
}

std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text) {
  const auto t = parse_csv(text);
  if (t.header != split(kTrajectoryHeader)) throw std::invalid_argument("unexpected trajectory header");
  std::vector<TrajectoryRow> out;
  for (const auto& f : t.rows) {
    TrajectoryRow r;
    r.t = parse_double(f[0]);
    r.mass = parse_double(f[1]);
    r.energy = parse_double(f[2]);
    r.entropy = parse_double(f[3]);
    r.diss_total = parse_double(f[4]);
    r.min_theta = parse_double(f[5]);
    r.max_rho = parse_double(f[6]);
    r.fp_iters = static_cast<int>(parse_double(f[7]));
    out.push_back(r);
  }
  return out;
}

std::string snapshot_csv(const Grid1D& grid, const EntropicState& state) {
  const auto m = to_primitive(state);
  CsvTable t;
  t.header = split(kSnapshotHeader);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    t.rows.push_back({fmt17(grid.cell_centers[i]), fmt17(m.rho[i]), fmt17(m.theta[i]),
                      fmt17(m.energy[i]), fmt17(state.phi[i]), fmt17(state.w[i])});
  }
  return write_csv(t);
}

Snapshot parse_snapshot_csv(std::string_view text) {
  const auto t = parse_csv(text);
  if (t.header != split(kSnapshotHeader)) throw std::invalid_argument("unexpected snapshot header");
  Snapshot s;
  for (const auto& f : t.rows) {
    s.x.push_back(parse_double(f[0]));
    s.state.phi.push_back(parse_double(f[4]));
    s.state.w.push_back(parse_double(f[5]));
  }
  return s;
}

}  // namespace etlab::io
