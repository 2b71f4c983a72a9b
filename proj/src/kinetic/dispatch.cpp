#include <cstdlib>
#include <string>

#include "etlab/error.hpp"
#include "etlab/kinetic.hpp"
#include "kinetic/kernels.hpp"

namespace etlab::kernels {

#ifndef ETLAB_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select(SimdChoice choice) {
  if (choice == SimdChoice::automatic) {
    if (const char* env = std::getenv("ETLAB_SIMD")) {
      const std::string s(env);
      if (s == "scalar") choice = SimdChoice::scalar;
      if (s == "avx2") choice = SimdChoice::avx2;
    }
  }
  const bool avx2_ok = avx2_table() != nullptr && cpu_has_avx2();
  switch (choice) {
    case SimdChoice::scalar:
      return scalar_table();
    case SimdChoice::avx2:
      if (!avx2_ok) throw DomainError("avx2 kernels requested but not available on this build/CPU");
      return *avx2_table();
    case SimdChoice::automatic:
    default:
      return avx2_ok ? *avx2_table() : scalar_table();
  }
}

}  // namespace etlab::kernels

namespace etlab {

std::string resolve_simd(SimdChoice choice) { return kernels::select(choice).name; }

}  // namespace etlab
