#include <cstdlib>
#include <string_view>

#include "zeno/kernels/linear_ode.hpp"

namespace zeno::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(ZENO_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__)) && \
    (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
  }
  return false;
}

Isa detected_isa() {
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("ZENO_KERNEL_ISA")) {
      const std::string_view v(env);
      if (v == "scalar") return Isa::scalar;
      if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    }
    return detected_isa();
  }();
  return isa;
}

Rk4StepFn select_rk4_step(Isa isa) {
#if defined(ZENO_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return &rk4_step_avx2;
#endif
  (void)isa;
  return &rk4_step_scalar;
}

ApplyFn select_apply(Isa isa) {
#if defined(ZENO_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return &apply_avx2;
#endif
  (void)isa;
  return &apply_scalar;
}

}  // namespace zeno::kernels
