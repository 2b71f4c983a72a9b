#include <immintrin.h>

#include "kinetic/kernels.hpp"

namespace etlab::kernels {

namespace {

inline double van_leer(double a, double b) {
  const double p = a * b;
  return p > 0.0 ? (2.0 * p) / (a + b) : 0.0;
}

inline __m256d van_leer4(__m256d a, __m256d b) {
  const __m256d p = _mm256_mul_pd(a, b);
  const __m256d pos = _mm256_cmp_pd(p, _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d s = _mm256_div_pd(_mm256_add_pd(p, p), _mm256_add_pd(a, b));
  return _mm256_and_pd(pos, s);
}

inline __m256d upwind4(__m256d v, __m256d left, __m256d right) {
  const __m256d pos = _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_GT_OQ);
  return _mm256_mul_pd(v, _mm256_blendv_pd(right, left, pos));
}

void face_flux_upwind(const double* v, const double* left, const double* right, double* out,
                      std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, upwind4(_mm256_loadu_pd(v + k), _mm256_loadu_pd(left + k),
                                      _mm256_loadu_pd(right + k)));
  }
  for (; k < n; ++k) out[k] = v[k] > 0.0 ? v[k] * left[k] : v[k] * right[k];
}

void face_flux_vanleer(const double* v, const double* cm1, const double* c0, const double* cp1,
                       const double* cp2, double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xm1 = _mm256_loadu_pd(cm1 + k);
    const __m256d x0 = _mm256_loadu_pd(c0 + k);
    const __m256d x1 = _mm256_loadu_pd(cp1 + k);
    const __m256d x2 = _mm256_loadu_pd(cp2 + k);
    const __m256d d0 = _mm256_sub_pd(x0, xm1);
    const __m256d d1 = _mm256_sub_pd(x1, x0);
    const __m256d d2 = _mm256_sub_pd(x2, x1);
    const __m256d left = _mm256_add_pd(x0, _mm256_mul_pd(half, van_leer4(d0, d1)));
    const __m256d right = _mm256_sub_pd(x1, _mm256_mul_pd(half, van_leer4(d1, d2)));
    _mm256_storeu_pd(out + k, upwind4(_mm256_loadu_pd(v + k), left, right));
  }
  for (; k < n; ++k) {
    const double d0 = c0[k] - cm1[k];
    const double d1 = cp1[k] - c0[k];
    const double d2 = cp2[k] - cp1[k];
    const double left = c0[k] + 0.5 * van_leer(d0, d1);
    const double right = cp1[k] - 0.5 * van_leer(d1, d2);
    out[k] = v[k] > 0.0 ? v[k] * left : v[k] * right;
  }
}

void flux_update(double* g, const double* fl, const double* fr, double c, std::size_t n) {
  const __m256d cc = _mm256_set1_pd(c);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(fr + k), _mm256_loadu_pd(fl + k));
    _mm256_storeu_pd(g + k, _mm256_sub_pd(_mm256_loadu_pd(g + k), _mm256_mul_pd(cc, d)));
  }
  for (; k < n; ++k) g[k] -= c * (fr[k] - fl[k]);
}

void relax_row(double* g, const double* target, double keep, double gain, std::size_t n) {
  const __m256d a = _mm256_set1_pd(keep);
  const __m256d b = _mm256_set1_pd(gain);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_mul_pd(a, _mm256_loadu_pd(g + k));
    _mm256_storeu_pd(g + k, _mm256_add_pd(x, _mm256_mul_pd(b, _mm256_loadu_pd(target + k))));
  }
  for (; k < n; ++k) g[k] = keep * g[k] + gain * target[k];
}

inline double hsum(__m256d x) {
  const __m128d lo = _mm256_castpd256_pd128(x);
  const __m128d hi = _mm256_extractf128_pd(x, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void row_moments(const double* g, const double* w, const double* v, const double* v2,
                 std::size_t n, double* out) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd(), a2 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d wg = _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(g + k));
    a0 = _mm256_add_pd(a0, wg);
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(wg, _mm256_loadu_pd(v + k)));
    a2 = _mm256_add_pd(a2, _mm256_mul_pd(wg, _mm256_loadu_pd(v2 + k)));
  }
  double m0 = hsum(a0), m1 = hsum(a1), m2 = hsum(a2);
  for (; k < n; ++k) {
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

const KernelTable* avx2_table() {
  static const KernelTable t{"avx2", face_flux_upwind, face_flux_vanleer, flux_update, relax_row,
                             row_moments};
  return &t;
}

}  // namespace etlab::kernels
