// Compiled with -mavx2; only reached through dispatch after a CPUID check.

#include <immintrin.h>

#include "blogsim/kernels/kernels.h"

namespace blogsim::kernels::avx2 {

// Block-wise all-pairs comparison of 8 lanes against 8 lanes. Unsigned order
// is only needed for the block-advance decision, which uses scalar loads.
std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b) {
  std::size_t i = 0, j = 0, count = 0;
  const std::size_t na = a.size(), nb = b.size();
  const __m256i rotate = _mm256_setr_epi32(1, 2, 3, 4, 5, 6, 7, 0);
  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + j));
    __m256i hits = _mm256_cmpeq_epi32(va, vb);
    for (int r = 1; r < 8; ++r) {
      vb = _mm256_permutevar8x32_epi32(vb, rotate);
      hits = _mm256_or_si256(hits, _mm256_cmpeq_epi32(va, vb));
    }
    count += static_cast<std::size_t>(
        _mm_popcnt_u32(_mm256_movemask_ps(_mm256_castsi256_ps(hits))));
    const uint32_t a_max = a[i + 7];
    const uint32_t b_max = b[j + 7];
    if (a_max <= b_max) i += 8;
    if (b_max <= a_max) j += 8;
  }
  return count + scalar::IntersectCount(a.subspan(i), b.subspan(j));
}

void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b,
                       std::span<double> out) {
  const std::size_t n = shared.size();
  const __m256d na = _mm256_set1_pd(static_cast<double>(size_a));
  std::size_t k = 0;
  // Counts are word-set sizes, far below 2^31, so the signed convert is exact.
  for (; k + 4 <= n; k += 4) {
    const __m256d c = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(shared.data() + k)));
    const __m256d nb = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(size_b.data() + k)));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(na, nb), c);
    _mm256_storeu_pd(out.data() + k, _mm256_div_pd(c, uni));
  }
  scalar::JaccardFromCounts(size_a, shared.subspan(k), size_b.subspan(k),
                            out.subspan(k));
}

}  // namespace blogsim::kernels::avx2
