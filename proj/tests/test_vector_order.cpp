#include "doctest.h"

#include <random>
#include <set>
#include <vector>

#include "rankone/analysis.hpp"
#include "rankone/builders.hpp"
#include "rankone/vector_order.hpp"

using rankone::BigInt;
using rankone::OrderDecision;
using rankone::OrderWitness;
using rankone::Rational;
using rankone::TypeVerdict;
using rankone::Vector;

namespace {

Vector vec(std::initializer_list<int> xs) {
  std::vector<BigInt> v;
  for (int x : xs) v.push_back(BigInt(x));
  return rankone::make_vector(std::move(v));
}

Vector random_vector(std::mt19937_64& rng, std::size_t max_dim, int max_value) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, max_dim);
  const std::size_t d = dim_dist(rng);
  std::set<int> picked;
  std::uniform_int_distribution<int> value_dist(1, max_value);
  while (picked.size() < d) picked.insert(value_dist(rng));
  std::vector<BigInt> comps;
  for (int x : picked) comps.push_back(BigInt(x));
  return rankone::make_vector(std::move(comps));
}

Vector scaled(const Vector& v, int k) {
  std::vector<BigInt> comps;
  for (const BigInt& c : v.components) comps.push_back(c * k);
  return rankone::make_vector(std::move(comps));
}

}  // namespace

TEST_CASE("containment order decisions") {
  auto sub = rankone::decide_le_p(vec({1, 2}), vec({1, 2, 3}));
  REQUIRE(sub.holds);
  REQUIRE(sub.witness.has_value());
  CHECK(sub.witness->n == 1);
  CHECK(sub.witness->m == 1);
  CHECK(sub.witness->c == 0);
  CHECK(rankone::verify_witness(vec({1, 2}), vec({1, 2, 3}), *sub.witness));

  CHECK(!rankone::decide_le_p(vec({1, 2}), vec({1, 3})).holds);
  CHECK(!rankone::decide_le_p(vec({1, 2, 3}), vec({1, 2})).holds);

  auto self = rankone::decide_le_p(vec({2, 5}), vec({2, 5}));
  CHECK(self.holds);
  CHECK(self.witness->n == 1);
  CHECK(self.witness->m == 1);

  auto doubled = rankone::decide_le_p(vec({1, 2}), vec({2, 4}));
  REQUIRE(doubled.holds);
  CHECK(doubled.witness->n == 2);
  CHECK(doubled.witness->m == 1);
  CHECK(rankone::verify_witness(vec({1, 2}), vec({2, 4}), *doubled.witness));

  auto halved = rankone::decide_le_p(vec({2, 4}), vec({1, 2}));
  REQUIRE(halved.holds);
  CHECK(halved.witness->n == 1);
  CHECK(halved.witness->m == 2);
}

TEST_CASE("containment order uses the shifted forms") {
  auto shifted = rankone::decide_le_p(vec({1, 3}), vec({2, 3, 5}));
  REQUIRE(shifted.holds);
  CHECK(shifted.witness->n == 1);
  CHECK(shifted.witness->m == 1);
  CHECK(shifted.witness->c == 2);
  CHECK(rankone::verify_witness(vec({1, 3}), vec({2, 3, 5}), *shifted.witness));

  // Tampering with a valid witness must fail the independent check.
  OrderWitness bad = *shifted.witness;
  bad.n += 1;
  CHECK(!rankone::verify_witness(vec({1, 3}), vec({2, 3, 5}), bad));
  OrderWitness clash = *shifted.witness;
  clash.injection = {1, 1};
  CHECK(!rankone::verify_witness(vec({1, 3}), vec({2, 3, 5}), clash));
}

TEST_CASE("signed sum order decisions") {
  auto cross = rankone::decide_le_m(vec({1, 2}), vec({1, 3}));
  REQUIRE(cross.holds);
  CHECK(rankone::verify_witness(vec({1, 2}), vec({1, 3}), *cross.witness));

  auto reverse = rankone::decide_le_m(vec({1, 3}), vec({1, 2}));
  REQUIRE(reverse.holds);
  CHECK(rankone::verify_witness(vec({1, 3}), vec({1, 2}), *reverse.witness));

  CHECK(!rankone::decide_le_m(vec({2, 5}), vec({1, 3})).holds);

  auto self = rankone::decide_le_m(vec({1, 4}), vec({1, 4}));
  CHECK(self.holds);
  CHECK(rankone::verify_witness(vec({1, 4}), vec({1, 4}), *self.witness));

  auto stretch = rankone::decide_le_m(vec({1}), vec({5}));
  REQUIRE(stretch.holds);
  CHECK(stretch.witness->n * 1 == stretch.witness->m * 5);
}

TEST_CASE("containment implies the signed sum order") {
  std::mt19937_64 rng(20240823);
  int positive_cases = 0;
  for (int round = 0; round < 200; ++round) {
    Vector v = random_vector(rng, 3, 8);
    Vector w = random_vector(rng, 3, 8);
    auto p = rankone::decide_le_p(v, w);
    if (p.holds) {
      ++positive_cases;
      CHECK(rankone::verify_witness(v, w, *p.witness));
      auto m = rankone::decide_le_m(v, w);
      CHECK(m.holds);
      CHECK(rankone::verify_witness(v, w, *m.witness));
    }
    auto m = rankone::decide_le_m(v, w);
    if (m.holds) CHECK(rankone::verify_witness(v, w, *m.witness));

    CHECK(rankone::decide_le_p(v, v).holds);
    CHECK(rankone::decide_le_m(v, v).holds);
    for (int k : {2, 3}) CHECK(rankone::decide_le_p(v, scaled(w, k)).holds == p.holds);
  }
  CHECK(positive_cases > 0);
}

TEST_CASE("certified multiplicative behavior matches the order relation") {
  const Vector v = vec({1, 2});
  auto spec = rankone::builders::build_thm72(v);
  int certified = 0;
  for (const Vector& w :
       {vec({1}), vec({2}), vec({1, 2}), vec({1, 3}), vec({2, 3}), vec({1, 2, 3})}) {
    auto cert = rankone::certify_v_alpha_lower(spec, w, rankone::height_subsequence(true), 3);
    if (cert.kind != TypeVerdict::Kind::positive_witnessed) continue;
    ++certified;
    auto order = rankone::decide_le_m(w, v);
    CHECK(order.holds);
    CHECK(rankone::verify_witness(w, v, *order.witness));
  }
  CHECK(certified >= 3);
}
