#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "rankone/errors.hpp"
#include "rankone/kernels.hpp"
#include "rankone/numeric.hpp"

using namespace rankone;
namespace k = rankone::kernels;

namespace {

std::vector<std::uint64_t> random_sorted_set(std::mt19937_64& rng, std::size_t max_size,
                                             std::uint64_t max_value) {
  // The target size must not exceed the number of distinct values available.
  if (max_value < max_size) max_size = static_cast<std::size_t>(max_value) + 1;
  std::uniform_int_distribution<std::size_t> size_dist(0, max_size);
  std::uniform_int_distribution<std::uint64_t> value_dist(0, max_value);
  std::set<std::uint64_t> s;
  const std::size_t target = size_dist(rng);
  while (s.size() < target) s.insert(value_dist(rng));
  return {s.begin(), s.end()};
}

std::size_t brute_count(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                        std::uint64_t shift, std::uint64_t a_limit) {
  std::size_t n = 0;
  for (std::uint64_t x : a) {
    if (x > a_limit) continue;
    if (std::binary_search(b.begin(), b.end(), x + shift)) ++n;
  }
  return n;
}

std::size_t brute_joint(const std::vector<std::uint64_t>& d,
                        const std::vector<std::uint64_t>& shifts, std::uint64_t x_limit) {
  std::size_t n = 0;
  for (std::uint64_t x : d) {
    if (x > x_limit) continue;
    bool all = true;
    for (std::uint64_t s : shifts) {
      if (!std::binary_search(d.begin(), d.end(), x + s)) {
        all = false;
        break;
      }
    }
    if (all) ++n;
  }
  return n;
}

struct BackendGuard {
  k::Backend saved = k::active_backend();
  ~BackendGuard() { k::set_backend(saved); }
};

}  // namespace

TEST_CASE("backend plumbing") {
  auto avail = k::available_backends();
  REQUIRE(!avail.empty());
  CHECK(avail.front() == k::Backend::scalar);
  BackendGuard guard;
  for (k::Backend b : avail) {
    k::set_backend(b);
    CHECK(k::active_backend() == b);
  }
  for (k::Backend b : {k::Backend::scalar, k::Backend::avx2, k::Backend::neon}) {
    if (std::ranges::find(avail, b) == avail.end()) {
      CHECK_THROWS_AS(k::set_backend(b), ArgumentError);
    }
  }
}

TEST_CASE("all backends agree with brute force on random sets") {
  BackendGuard guard;
  std::mt19937_64 rng(20240817);
  const auto avail = k::available_backends();
  for (int round = 0; round < 400; ++round) {
    const std::uint64_t max_value = (round % 3 == 0) ? 40 : ((std::uint64_t(1) << 61) - 7);
    auto a = random_sorted_set(rng, 300, max_value);
    auto b = (round % 4 == 0) ? a : random_sorted_set(rng, 300, max_value);
    std::uniform_int_distribution<std::uint64_t> shift_dist(0, max_value / 2);
    const std::uint64_t shift = (round % 5 == 0) ? 0 : shift_dist(rng);
    std::uint64_t a_limit;
    switch (round % 4) {
      case 0: a_limit = std::numeric_limits<std::uint64_t>::max() / 4; break;
      case 1: a_limit = 0; break;
      default: a_limit = shift_dist(rng); break;
    }
    const std::size_t want = brute_count(a, b, shift, a_limit);
    for (k::Backend backend : avail) {
      k::set_backend(backend);
      CAPTURE(round);
      CAPTURE(k::backend_name(backend));
      CHECK(k::shifted_intersect_count(a, b, shift, a_limit) == want);
    }
  }
}

TEST_CASE("vector paths hit block-aligned and equal-maximum cases") {
  BackendGuard guard;
  // Consecutive runs force every block comparison and the amax == bmax branch.
  std::vector<std::uint64_t> a, b;
  for (std::uint64_t i = 0; i < 64; ++i) a.push_back(i);
  for (std::uint64_t i = 0; i < 64; ++i) b.push_back(2 * i);
  for (k::Backend backend : k::available_backends()) {
    k::set_backend(backend);
    CHECK(k::shifted_intersect_count(a, a, 0, ~0ull) == 64);
    CHECK(k::shifted_intersect_count(a, a, 1, ~0ull) == 63);
    CHECK(k::shifted_intersect_count(a, b, 0, ~0ull) == 32);
    CHECK(k::shifted_intersect_count(a, b, 63, ~0ull) == 32);
    CHECK(k::shifted_intersect_count(a, b, 0, 10) == 6);
    CHECK(k::shifted_intersect_count({}, b, 0, ~0ull) == 0);
    CHECK(k::shifted_intersect_count(a, {}, 0, ~0ull) == 0);
  }
}

TEST_CASE("joint count and existence match brute force") {
  BackendGuard guard;
  std::mt19937_64 rng(7151);
  for (int round = 0; round < 200; ++round) {
    auto d = random_sorted_set(rng, 160, 120);
    std::uniform_int_distribution<std::uint64_t> shift_dist(0, 60);
    std::uniform_int_distribution<int> dim_dist(1, 3);
    std::vector<std::uint64_t> shifts;
    for (int i = dim_dist(rng); i > 0; --i) shifts.push_back(shift_dist(rng));
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    const std::uint64_t x_limit = shift_dist(rng) * 3;
    const std::size_t want = brute_joint(d, shifts, x_limit);
    for (k::Backend backend : k::available_backends()) {
      k::set_backend(backend);
      CHECK(k::joint_count(d, shifts, x_limit) == want);
      CHECK(k::joint_exists(d, shifts, x_limit) == (want > 0));
    }
  }
}

TEST_CASE("materializing intersect matches filter") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 50; ++round) {
    auto a = random_sorted_set(rng, 80, 200);
    auto b = random_sorted_set(rng, 80, 200);
    const std::uint64_t shift = round % 7;
    std::vector<std::uint64_t> got;
    k::shifted_intersect_into(a, b, shift, 150, got);
    std::vector<std::uint64_t> want;
    for (std::uint64_t x : a) {
      if (x <= 150 && std::binary_search(b.begin(), b.end(), x + shift)) want.push_back(x);
    }
    CHECK(got == want);
  }
}

TEST_CASE("generic kernel instantiates for big integers") {
  using rankone::BigInt;
  std::vector<BigInt> d{0, 3, 5, 8, 11};
  std::vector<BigInt> shifts{3};
  CHECK(k::joint_count_generic<BigInt>(d, shifts, BigInt(100)) == 3);  // x in {0,5,8}
  CHECK(k::joint_count_generic<BigInt>(d, shifts, BigInt(4)) == 1);    // only x=0 within the limit
  std::vector<BigInt> two{3, 8};
  CHECK(k::joint_count_generic<BigInt>(d, two, BigInt(100)) == 1);  // only x=0 has both
  CHECK(k::joint_exists_generic<BigInt>(d, two, BigInt(100)));
  CHECK_FALSE(k::joint_exists_generic<BigInt>(d, std::vector<BigInt>{7}, BigInt(100)));
}
