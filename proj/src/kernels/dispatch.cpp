#include <cstdlib>
#include <string>

#include "reslab/kernels/kernels.hpp"

namespace reslab::kernels {

namespace {

const KernelTable kScalar{Isa::Scalar, scalar::sturm_count, scalar::transfer_log_growth,
                          scalar::inverse_distance_sums};
#if defined(RESLAB_HAVE_AVX2)
const KernelTable kAvx2{Isa::Avx2, avx2::sturm_count, avx2::transfer_log_growth,
                        avx2::inverse_distance_sums};
#endif

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(RESLAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& table(Isa isa) {
#if defined(RESLAB_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* env = std::getenv("RESLAB_KERNELS");
    if (env != nullptr && std::string(env) == "scalar") return kScalar;
    return table(Isa::Avx2);
  }();
  return chosen;
}

}  // namespace reslab::kernels
