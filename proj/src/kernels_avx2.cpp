// AVX2 variant of the sorted-set counting kernel. Compiled with -mavx2 in
// this translation unit only; callers reach it through the dispatch table
// after a cpuid check.

#include <immintrin.h>

#include <algorithm>
#include <cstdint>
#include <span>

namespace rankone::kernels::avx2 {

bool cpu_supported() { return __builtin_cpu_supports("avx2") != 0; }

// Block merge: compare a 4-lane window of (a + shift) against every rotation
// of a 4-lane window of b, then advance the window with the smaller maximum.
// Each value occurs at most once per side, so OR-ing the equality masks and
// popcounting lanes counts matches exactly once.
std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit) {
  const std::size_t n = static_cast<std::size_t>(
      std::upper_bound(a.begin(), a.end(), a_limit) - a.begin());
  const std::size_t m = b.size();
  std::size_t i = 0, j = 0, count = 0;
  const __m256i vshift = _mm256_set1_epi64x(static_cast<long long>(shift));
  while (i + 4 <= n && j + 4 <= m) {
    const __m256i va = _mm256_add_epi64(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i)), vshift);
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + j));
    const __m256i r1 = _mm256_permute4x64_epi64(vb, _MM_SHUFFLE(0, 3, 2, 1));
    const __m256i r2 = _mm256_permute4x64_epi64(vb, _MM_SHUFFLE(1, 0, 3, 2));
    const __m256i r3 = _mm256_permute4x64_epi64(vb, _MM_SHUFFLE(2, 1, 0, 3));
    __m256i any = _mm256_cmpeq_epi64(va, vb);
    any = _mm256_or_si256(any, _mm256_cmpeq_epi64(va, r1));
    any = _mm256_or_si256(any, _mm256_cmpeq_epi64(va, r2));
    any = _mm256_or_si256(any, _mm256_cmpeq_epi64(va, r3));
    count += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(any)))));
    const std::uint64_t amax = a[i + 3] + shift;
    const std::uint64_t bmax = b[j + 3];
    if (amax <= bmax) i += 4;
    if (bmax <= amax) j += 4;
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

}  // namespace rankone::kernels::avx2
