// NEON variant of the sorted-set counting kernel, mirroring the AVX2 block
// merge with 2-lane windows. Built only on aarch64.

#include <arm_neon.h>

#include <algorithm>
#include <cstdint>
#include <span>

namespace rankone::kernels::neon {

std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit) {
  const std::size_t n = static_cast<std::size_t>(
      std::upper_bound(a.begin(), a.end(), a_limit) - a.begin());
  const std::size_t m = b.size();
  std::size_t i = 0, j = 0, count = 0;
  const uint64x2_t vshift = vdupq_n_u64(shift);
  while (i + 2 <= n && j + 2 <= m) {
    const uint64x2_t va = vaddq_u64(vld1q_u64(a.data() + i), vshift);
    const uint64x2_t vb = vld1q_u64(b.data() + j);
    const uint64x2_t rb = vextq_u64(vb, vb, 1);
    const uint64x2_t any = vorrq_u64(vceqq_u64(va, vb), vceqq_u64(va, rb));
    count += (vgetq_lane_u64(any, 0) & 1u) + (vgetq_lane_u64(any, 1) & 1u);
    const std::uint64_t amax = a[i + 1] + shift;
    const std::uint64_t bmax = b[j + 1];
    if (amax <= bmax) i += 2;
    if (bmax <= amax) j += 2;
  }
  while (i < n && j < m) {
    const std::uint64_t key = a[i] + shift;
    if (key < b[j]) {
      ++i;
    } else if (b[j] < key) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace rankone::kernels::neon
