// Data-parallel inner loops used by the similarity network builder.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant. The variant is chosen once at startup from the CPU feature
// bits; both variants produce bit-identical results, which the kernel tests
// check directly.

#ifndef BLOGSIM_KERNELS_KERNELS_H_
#define BLOGSIM_KERNELS_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace blogsim::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

// True if the running CPU (and this build) can execute `isa`.
bool IsaSupported(Isa isa);

// The instruction set the dispatching entry points currently route to. The
// initial value is the best supported ISA, unless the environment variable
// BLOGSIM_ISA=scalar forces the reference path.
Isa ActiveIsa();

// Overrides the dispatch target; returns false (and changes nothing) if the
// ISA is not supported here.
bool SetActiveIsa(Isa isa);

// |a ∩ b| for two strictly increasing sequences.
std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b);

// out[k] = shared[k] / (size_a + size_b[k] - shared[k]), computed in double.
// Requires shared[k] <= min(size_a, size_b[k]) and a non-zero union.
void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b, std::span<double> out);

namespace scalar {
std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b);
void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b, std::span<double> out);
}  // namespace scalar

namespace avx2 {
std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b);
void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b, std::span<double> out);
}  // namespace avx2

}  // namespace blogsim::kernels

#endif  // BLOGSIM_KERNELS_KERNELS_H_
