#include "etlab/grid.hpp"

#include <string>

namespace etlab {

namespace {

void require_length(std::span<const double> v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(expected) +
                     " values, got " + std::to_string(v.size()));
  }
}

}  // namespace

Grid1D build_grid(std::size_t n_cells, double length) {
  if (n_cells < 3) throw DomainError("build_grid: n_cells must be at least 3");
  if (!(length > 0.0)) throw DomainError("build_grid: length must be positive");
  Grid1D g;
  g.n_cells = n_cells;
  g.length = length;
  g.h = length / static_cast<double>(n_cells);
  g.cell_centers.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    g.cell_centers[i] = (static_cast<double>(i) + 0.5) * g.h;
  }
  return g;
}

std::vector<double> grad_edge(const Grid1D& grid, std::span<const double> field) {
  require_length(field, grid.n_cells, "grad_edge");
  std::vector<double> out(grid.n_edges());
  ops::grad<double>(grid.h, field, out);
  return out;
}

std::vector<double> div_edge(const Grid1D& grid, std::span<const double> flux) {
  require_length(flux, grid.n_edges(), "div_edge");
  std::vector<double> out(grid.n_cells);
  ops::div<double>(grid.h, flux, out);
  return out;
}

std::vector<double> second_diff(const Grid1D& grid, std::span<const double> field) {
  require_length(field, grid.n_cells, "second_diff");
  std::vector<double> out(grid.n_cells);
  ops::lap<double>(grid.h, field, out);
  return out;
}

double integrate(const Grid1D& grid, std::span<const double> field) {
  require_length(field, grid.n_cells, "integrate");
  double s = 0.0;
  for (double v : field) s += v;
  return grid.h * s;
}

}  // namespace etlab
