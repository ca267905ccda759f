#include <cstdlib>
#include <string_view>

#include "spde/simd/kernels.hpp"

namespace spde::simd {

#if defined(SPDE_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table() noexcept;
}
#endif

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() noexcept {
#if defined(SPDE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) return &detail::avx2_table();
#endif
  return nullptr;
}

namespace {
const KernelTable& select() noexcept {
  const char* env = std::getenv("SPDE_KERNELS");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}
}  // namespace

const KernelTable& kernels() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace spde::simd
