#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "etlab/error.hpp"

namespace etlab {

/// Uniform cell-centred grid on [0, length]. Cell i has centre (i + 1/2)h;
/// edge j sits between cells j and j + 1, so there are n_cells - 1 interior
/// edges. The two boundary edges always carry zero flux.
struct Grid1D {
  std::size_t n_cells = 0;
  double length = 0.0;
  double h = 0.0;
  std::vector<double> cell_centers;

  std::size_t n_edges() const noexcept { return n_cells - 1; }
};

Grid1D build_grid(std::size_t n_cells, double length);

std::vector<double> grad_edge(const Grid1D& grid, std::span<const double> field);

/// Negative adjoint of grad_edge under the midpoint quadrature.
std::vector<double> div_edge(const Grid1D& grid, std::span<const double> flux);

/// Second difference with even reflection at both walls.
std::vector<double> second_diff(const Grid1D& grid, std::span<const double> field);

double integrate(const Grid1D& grid, std::span<const double> field);

namespace ops {

// Scalar-generic kernels behind the public operators. They assume the
// caller has sized the spans; the scheme instantiates them with
// std::complex<double> for complex-step Jacobians.

template <class T>
void grad(double h, std::span<const T> u, std::span<T> out) {
  for (std::size_t j = 0; j + 1 < u.size(); ++j) out[j] = (u[j + 1] - u[j]) / h;
}

template <class T>
void div(double h, std::span<const T> flux, std::span<T> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T right = i + 1 < n ? flux[i] : T(0);
    const T left = i > 0 ? flux[i - 1] : T(0);
    out[i] = (right - left) / h;
  }
}

template <class T>
void lap(double h, std::span<const T> u, std::span<T> out) {
  const std::size_t n = u.size();
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    const T left = i > 0 ? u[i - 1] : u[i];
    const T right = i + 1 < n ? u[i + 1] : u[i];
    out[i] = (left - 2.0 * u[i] + right) * inv_h2;
  }
}

}  // namespace ops

}  // namespace etlab
