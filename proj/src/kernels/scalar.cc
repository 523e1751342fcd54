#include "blogsim/kernels/kernels.h"

namespace blogsim::kernels::scalar {

std::size_t IntersectCount(std::span<const uint32_t> a,
                           std::span<const uint32_t> b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

void JaccardFromCounts(uint32_t size_a, std::span<const uint32_t> shared,
                       std::span<const uint32_t> size_b,
                       std::span<double> out) {
  const double na = static_cast<double>(size_a);
  for (std::size_t k = 0; k < shared.size(); ++k) {
    const double c = static_cast<double>(shared[k]);
    out[k] = c / (na + static_cast<double>(size_b[k]) - c);
  }
}

}  // namespace blogsim::kernels::scalar
