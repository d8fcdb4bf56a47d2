#include "rankone/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

#include "rankone/errors.hpp"

namespace rankone::kernels {

#if defined(RANKONE_HAVE_AVX2_TU)
namespace avx2 {
std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit);
bool cpu_supported();
}  // namespace avx2
#endif
#if defined(RANKONE_HAVE_NEON_TU)
namespace neon {
std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit);
}  // namespace neon
#endif

namespace {

std::size_t scalar_count(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::uint64_t shift, std::uint64_t a_limit) {
  return shifted_intersect_count_generic<std::uint64_t>(a, b, shift, a_limit);
}

Backend pick_initial() {
  if (const char* env = std::getenv("RANKONE_KERNEL")) {
    std::string want(env);
    for (Backend b : available_backends()) {
      if (want == backend_name(b)) return b;
    }
    // Unknown or unavailable name: fall through to auto-detection rather than
    // failing a process over an env var.
  }
  auto avail = available_backends();
  return avail.back();
}

std::atomic<Backend> g_backend{pick_initial()};

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> v{Backend::scalar};
#if defined(RANKONE_HAVE_AVX2_TU)
  if (avx2::cpu_supported()) v.push_back(Backend::avx2);
#endif
#if defined(RANKONE_HAVE_NEON_TU)
  v.push_back(Backend::neon);
#endif
  return v;
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  for (Backend have : available_backends()) {
    if (have == b) {
      g_backend.store(b, std::memory_order_relaxed);
      return;
    }
  }
  throw ArgumentError(std::string("kernel backend not available on this machine: ") +
                      backend_name(b));
}

std::size_t shifted_intersect_count(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b, std::uint64_t shift,
                                    std::uint64_t a_limit) {
  switch (active_backend()) {
#if defined(RANKONE_HAVE_AVX2_TU)
    case Backend::avx2:
      return avx2::shifted_intersect_count(a, b, shift, a_limit);
#endif
#if defined(RANKONE_HAVE_NEON_TU)
    case Backend::neon:
      return neon::shifted_intersect_count(a, b, shift, a_limit);
#endif
    default:
      return scalar_count(a, b, shift, a_limit);
  }
}

void shifted_intersect_into(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                            std::uint64_t shift, std::uint64_t a_limit,
                            std::vector<std::uint64_t>& out) {
  shifted_intersect_into_generic<std::uint64_t>(a, b, shift, a_limit, out);
}

std::size_t joint_count(std::span<const std::uint64_t> d, std::span<const std::uint64_t> shifts,
                        std::uint64_t x_limit) {
  if (shifts.size() <= 1) {
    if (shifts.empty()) return joint_count_generic<std::uint64_t>(d, shifts, x_limit);
    return shifted_intersect_count(d, d, shifts[0], x_limit);
  }
  std::vector<std::uint64_t> current;
  shifted_intersect_into(d, d, shifts[0], x_limit, current);
  std::vector<std::uint64_t> next;
  for (std::size_t s = 1; s + 1 < shifts.size(); ++s) {
    shifted_intersect_into(current, d, shifts[s], x_limit, next);
    current.swap(next);
  }
  return shifted_intersect_count(current, d, shifts.back(), x_limit);
}

bool joint_exists(std::span<const std::uint64_t> d, std::span<const std::uint64_t> shifts,
                  std::uint64_t x_limit) {
  return joint_exists_generic<std::uint64_t>(d, shifts, x_limit);
}

}  // namespace rankone::kernels
