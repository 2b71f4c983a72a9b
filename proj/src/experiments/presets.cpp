#include <cmath>
#include <string>

#include "etlab/error.hpp"
#include "etlab/experiments.hpp"

namespace etlab {

MacroState with_energy(std::vector<double> rho, std::vector<double> theta) {
  MacroState m;
  m.energy.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) m.energy[i] = theta[i] * (1.0 + 1.5 * rho[i]);
  m.rho = std::move(rho);
  m.theta = std::move(theta);
  return m;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"equilibrium", "gauss-bump", "temp-step"};
  return names;
}

InitFunction preset(std::string_view name) {
  if (name == "equilibrium") {
    return [](const Grid1D& g) {
      return with_energy(std::vector<double>(g.n_cells, 1.0), std::vector<double>(g.n_cells, 1.0));
    };
  }
  if (name == "gauss-bump") {
    return [](const Grid1D& g) {
      std::vector<double> rho(g.n_cells);
      const double mid = 0.5 * g.length;
      for (std::size_t i = 0; i < g.n_cells; ++i) {
        const double d = g.cell_centers[i] - mid;
        rho[i] = 0.2 + std::exp(-50.0 * d * d);
      }
      return with_energy(std::move(rho), std::vector<double>(g.n_cells, 1.0));
    };
  }
  if (name == "temp-step") {
    return [](const Grid1D& g) {
      std::vector<double> theta(g.n_cells);
      const double mid = 0.5 * g.length;
      const double width = 0.05 * g.length;
      for (std::size_t i = 0; i < g.n_cells; ++i) {
        theta[i] = 0.5 + 0.25 * (1.0 + std::tanh((g.cell_centers[i] - mid) / width));
      }
      return with_energy(std::vector<double>(g.n_cells, 1.0), std::move(theta));
    };
  }
  throw ConfigError("init.preset", "unknown preset '" + std::string(name) + "'");
}

InitFunction explicit_init(std::vector<double> rho0, std::vector<double> theta0) {
  if (rho0.size() != theta0.size()) throw ConfigError("init.theta0", "length differs from init.rho0");
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] > 0.0) || !std::isfinite(rho0[i])) {
      throw ConfigError("init.rho0", "entry " + std::to_string(i) + " is not a positive number");
    }
    if (!(theta0[i] > 0.0) || !std::isfinite(theta0[i])) {
      throw ConfigError("init.theta0", "entry " + std::to_string(i) + " is not a positive number");
    }
  }
  return [rho0 = std::move(rho0), theta0 = std::move(theta0)](const Grid1D& g) {
    const std::size_t n = rho0.size();
    if (n == 0 || g.n_cells % n != 0) {
      throw ShapeError("explicit initial data does not fit a grid of " +
                       std::to_string(g.n_cells) + " cells");
    }
    const std::size_t f = g.n_cells / n;
    std::vector<double> rho(g.n_cells), theta(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) {
      rho[i] = rho0[i / f];
      theta[i] = theta0[i / f];
    }
    return with_energy(std::move(rho), std::move(theta));
  };
}

}  // namespace etlab
