#include <cmath>
#include <stdexcept>

#include "etlab/experiments.hpp"
#include "etlab/io.hpp"

namespace etlab {

namespace {

std::optional<double> order(double e_coarse, double e_fine, double p_coarse, double p_fine) {
  const double o = std::log(e_coarse / e_fine) / std::log(p_coarse / p_fine);
  if (!std::isfinite(o)) return std::nullopt;
  return o;
}

}  // namespace

void ConvergenceTable::compute_orders() {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k == 0) {
      rows[k].order_rho.reset();
      rows[k].order_energy.reset();
      continue;
    }
    const auto& c = rows[k - 1];
    auto& f = rows[k];
    f.order_rho = order(c.err_rho, f.err_rho, c.param, f.param);
    f.order_energy = order(c.err_energy, f.err_energy, c.param, f.param);
  }
}

std::string table_to_csv(const ConvergenceTable& table) {
  io::CsvTable t;
  t.header = {"param", "err_rho_L1", "err_E_L1", "order_rho", "order_E"};
  for (const auto& r : table.rows) {
    t.rows.push_back({io::fmt17(r.param), io::fmt17(r.err_rho), io::fmt17(r.err_energy),
                      r.order_rho ? io::fmt17(*r.order_rho) : "",
                      r.order_energy ? io::fmt17(*r.order_energy) : ""});
  }
  return io::write_csv(t);
}

ConvergenceTable table_from_csv(std::string_view text) {
  const auto t = io::parse_csv(text);
  std::string header;
  for (std::size_t i = 0; i < t.header.size(); ++i) header += (i ? "," : "") + t.header[i];
  if (header != kTableHeader) throw std::invalid_argument("unexpected table header");
  ConvergenceTable out;
  for (const auto& f : t.rows) {
    ConvergenceRow r;
    r.param = io::parse_double(f[0]);
    r.err_rho = io::parse_double(f[1]);
    r.err_energy = io::parse_double(f[2]);
    if (!f[3].empty()) r.order_rho = io::parse_double(f[3]);
    if (!f[4].empty()) r.order_energy = io::parse_double(f[4]);
    out.rows.push_back(r);
  }
  return out;
}

}  // namespace etlab
