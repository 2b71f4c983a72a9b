#pragma once

#include <cstddef>

#include "etlab/kinetic.hpp"

namespace etlab::kernels {

// Row kernels over the velocity axis. `n` is the row length.
struct KernelTable {
  const char* name;
  // out = v > 0 ? v·left : v·right
  void (*face_flux_upwind)(const double* v, const double* left, const double* right, double* out,
                           std::size_t n);
  // van Leer limited states from four consecutive rows, then upwinded
  void (*face_flux_vanleer)(const double* v, const double* cm1, const double* c0,
                            const double* cp1, const double* cp2, double* out, std::size_t n);
  // g -= c·(fr - fl)
  void (*flux_update)(double* g, const double* fl, const double* fr, double c, std::size_t n);
  // g = keep·g + gain·target
  void (*relax_row)(double* g, const double* target, double keep, double gain, std::size_t n);
  // out = {Σ w g, Σ w v g, Σ w v² g}
  void (*row_moments)(const double* g, const double* w, const double* v, const double* v2,
                      std::size_t n, double* out);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// Kernel set for a choice; `automatic` honours ETLAB_SIMD, then the CPU.
const KernelTable& select(SimdChoice choice);

}  // namespace etlab::kernels
