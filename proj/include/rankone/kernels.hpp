#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankone::kernels {

// Counting primitives over sorted, strictly increasing height sets. The
// 64-bit entry points are runtime-dispatched: a scalar reference always
// exists, and an AVX2 (x86-64) or NEON (aarch64) variant is selected when the
// CPU supports it. Variants are bit-for-bit equivalent and tested as such.
//
// Precondition for the 64-bit paths: every value plus every shift stays below
// 2^63, so vector comparisons may treat lanes as signed. Callers stay on the
// arbitrary-precision path otherwise.

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);
std::vector<Backend> available_backends();
Backend active_backend();
// Throws ArgumentError if the backend is not available on this machine.
// Honors RANKONE_KERNEL=scalar|avx2|neon for the initial selection.
void set_backend(Backend b);

// #{i : a[i] <= a_limit and a[i] + shift appears in b}
std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit);

// Materializing variant used between the stages of a multi-shift join.
void shifted_intersect_into(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                            std::uint64_t shift, std::uint64_t a_limit,
                            std::vector<std::uint64_t>& out);

// #{x in d : x <= x_limit and x + s in d for every s in shifts}
std::size_t joint_count(std::span<const std::uint64_t> d, std::span<const std::uint64_t> shifts,
                        std::uint64_t x_limit);

// Early-exit existence form of joint_count, used by window scans.
bool joint_exists(std::span<const std::uint64_t> d, std::span<const std::uint64_t> shifts,
                  std::uint64_t x_limit);

// Reference merge, shared with the arbitrary-precision path. Kept in the
// header so the big-integer instantiation and the u64 scalar backend are the
// same code.
template <typename Int>
std::size_t shifted_intersect_count_generic(std::span<const Int> a, std::span<const Int> b,
                                            const Int& shift, const Int& a_limit) {
  std::size_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] > a_limit) break;
    const Int key = a[i] + shift;
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

template <typename Int>
void shifted_intersect_into_generic(std::span<const Int> a, std::span<const Int> b,
                                    const Int& shift, const Int& a_limit, std::vector<Int>& out) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] > a_limit) break;
    const Int key = a[i] + shift;
    if (key < b[j]) {
      ++i;
    } else if (b[j] < key) {
      ++j;
    } else {
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
}

template <typename Int>
std::size_t joint_count_generic(std::span<const Int> d, std::span<const Int> shifts,
                                const Int& x_limit) {
  if (shifts.empty()) {
    std::size_t n = 0;
    while (n < d.size() && !(d[n] > x_limit)) ++n;
    return n;
  }
  if (shifts.size() == 1) return shifted_intersect_count_generic<Int>(d, d, shifts[0], x_limit);
  std::vector<Int> current;
  shifted_intersect_into_generic<Int>(d, d, shifts[0], x_limit, current);
  std::vector<Int> next;
  for (std::size_t s = 1; s + 1 < shifts.size(); ++s) {
    shifted_intersect_into_generic<Int>(std::span<const Int>(current), d, shifts[s], x_limit, next);
    current.swap(next);
  }
  return shifted_intersect_count_generic<Int>(std::span<const Int>(current), d, shifts.back(),
                                              x_limit);
}

// Aligned multi-pointer walk; returns on the first witness.
template <typename Int>
bool joint_exists_generic(std::span<const Int> d, std::span<const Int> shifts,
                          const Int& x_limit) {
  if (d.empty()) return false;
  if (shifts.empty()) return !(d[0] > x_limit);
  std::vector<std::size_t> ptr(shifts.size(), 0);
  for (std::size_t i = 0; i < d.size() && !(d[i] > x_limit);) {
    bool all = true;
    std::size_t advance_to = i;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      const Int key = d[i] + shifts[s];
      std::size_t& p = ptr[s];
      while (p < d.size() && d[p] < key) ++p;
      if (p == d.size()) return false;
      if (d[p] != key) {
        all = false;
        // No x' with x' + shifts[s] < d[p] can match either; skip ahead.
        const Int floor = d[p] - shifts[s];
        while (advance_to < d.size() && d[advance_to] < floor) ++advance_to;
        break;
      }
    }
    if (all) return true;
    i = advance_to > i ? advance_to : i + 1;
  }
  return false;
}

}  // namespace rankone::kernels
