#include "kinetic/kernels.hpp"

namespace etlab::kernels {

namespace {

inline double van_leer(double a, double b) {
  const double p = a * b;
  return p > 0.0 ? (2.0 * p) / (a + b) : 0.0;
}

void face_flux_upwind(const double* v, const double* left, const double* right, double* out,
                      std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = v[k] > 0.0 ? v[k] * left[k] : v[k] * right[k];
}

void face_flux_vanleer(const double* v, const double* cm1, const double* c0, const double* cp1,
                       const double* cp2, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double d0 = c0[k] - cm1[k];
    const double d1 = cp1[k] - c0[k];
    const double d2 = cp2[k] - cp1[k];
    const double left = c0[k] + 0.5 * van_leer(d0, d1);
    const double right = cp1[k] - 0.5 * van_leer(d1, d2);
    out[k] = v[k] > 0.0 ? v[k] * left : v[k] * right;
  }
}

void flux_update(double* g, const double* fl, const double* fr, double c, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) g[k] -= c * (fr[k] - fl[k]);
}

void relax_row(double* g, const double* target, double keep, double gain, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) g[k] = keep * g[k] + gain * target[k];
}

void row_moments(const double* g, const double* w, const double* v, const double* v2,
                 std::size_t n, double* out) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wg = w[k] * g[k];
    m0 += wg;
    m1 += wg * v[k];
    m2 += wg * v2[k];
  }
  out[0] = m0;
  out[1] = m1;
  out[2] = m2;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{"scalar", face_flux_upwind, face_flux_vanleer, flux_update, relax_row,
                             row_moments};
  return t;
}

}  // namespace etlab::kernels
