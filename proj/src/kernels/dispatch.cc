#include <atomic>
#include <cstdlib>
#include <cstring>

#include "blogsim/kernels/kernels.h"

namespace blogsim::kernels {
namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kHaveAvx2Build = true;
#else
constexpr bool kHaveAvx2Build = false;
#endif

bool CpuHasAvx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

Isa InitialIsa() {
  const char* forced = std::getenv("BLOGSIM_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return Isa::kScalar;
  }
  return IsaSupported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& ActiveSlot() {
  static std::atomic<Isa> slot{InitialIsa()};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool IsaSupported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2: {
      static const bool supported = kHaveAvx2Build && CpuHasAvx2();
      return supported;
    }
  }
  return false;
}

Isa ActiveIsa() { return ActiveSlot().load(std::memory_order_relaxed); }

bool SetActiveIsa(Isa isa) {
  if (!IsaSupported(isa)) return false;
  ActiveSlot().store(isa, std::memory_order_relaxed);
  return true;
}

std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (ActiveIsa() == Isa::kAvx2) return avx2::IntersectCount(a, b);
#endif
  return scalar::IntersectCount(a, b);
}

void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b,
                       std::span<double> out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (ActiveIsa() == Isa::kAvx2) {
    avx2::JaccardFromCounts(size_a, shared, size_b, out);
    return;
  }
#endif
  scalar::JaccardFromCounts(size_a, shared, size_b, out);
}

}  // namespace blogsim::kernels
