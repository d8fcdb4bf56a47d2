#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "rankone/analysis.hpp"
#include "rankone/construction.hpp"
#include "rankone/errors.hpp"
#include "rankone/measure.hpp"

using rankone::BigInt;
using rankone::ConstructionSpec;
using rankone::LevelSet;
using rankone::Limits;
using rankone::Rational;
using rankone::Stage;
using rankone::StageContext;
using rankone::TypeVerdict;
using rankone::Vector;
using rankone::WitnessPoint;

namespace {

ConstructionSpec hk_spec() {
  return ConstructionSpec(Rational(1), [](const StageContext& ctx) {
    Stage st;
    st.cuts = 2;
    st.spacers = {BigInt(0), 2 * ctx.heights[ctx.n]};
    return st;
  }, "hk");
}

ConstructionSpec four_cut_spec() {
  return ConstructionSpec(Rational(1), [](const StageContext& ctx) {
    const BigInt h = ctx.heights[ctx.n];
    Stage st;
    st.cuts = 4;
    st.spacers = {BigInt(0), 3 * h, h, 8 * h};
    return st;
  }, "four-cut");
}

ConstructionSpec odometer_spec() {
  return ConstructionSpec(Rational(1), [](const StageContext&) {
    Stage st;
    st.cuts = 2;
    st.spacers = {BigInt(0), BigInt(0)};
    return st;
  }, "odometer");
}

ConstructionSpec triple_tail_spec() {
  // Cuts in three with one trailing spacer block; carries arithmetic
  // progressions at small gaps, unlike the four-cut construction.
  return ConstructionSpec(Rational(1), [](const StageContext& ctx) {
    Stage st;
    st.cuts = 3;
    st.spacers = {BigInt(0), BigInt(0), ctx.heights[ctx.n]};
    return st;
  }, "triple-tail");
}

Vector vec(std::initializer_list<int> xs) {
  std::vector<BigInt> v;
  for (int x : xs) v.push_back(BigInt(x));
  return rankone::make_vector(std::move(v));
}

std::vector<BigInt> big_list(std::initializer_list<int> xs) {
  std::vector<BigInt> v;
  for (int x : xs) v.push_back(BigInt(x));
  return v;
}

}  // namespace

TEST_CASE("vector construction validates its invariants") {
  CHECK(vec({1, 2}).dimension() == 2);
  CHECK_THROWS_AS(rankone::make_vector({}), rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::make_vector(big_list({0, 1})), rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::make_vector(big_list({2, 1})), rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::make_vector(big_list({2, 2})), rankone::ArgumentError);
}

TEST_CASE("vector normalization") {
  auto id = rankone::normalize_vector(big_list({1, 2}));
  CHECK(id.vector == vec({1, 2}));
  CHECK(id.description == "components already positive; sorted increasing");

  CHECK(rankone::normalize_vector(big_list({3, 1})).vector == vec({1, 3}));
  CHECK(rankone::normalize_vector(big_list({-2, 1, 3})).vector == vec({2, 3, 5}));
  CHECK(rankone::normalize_vector(big_list({-1, 1})).vector == vec({1, 2}));
  CHECK(rankone::normalize_vector(big_list({-3, -1})).vector == vec({2, 3}));

  CHECK_THROWS_AS(rankone::normalize_vector({}), rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::normalize_vector(big_list({0, 2})), rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::normalize_vector(big_list({1, 1})), rankone::ArgumentError);
}

TEST_CASE("normalization preserves the shift pattern up to translation") {
  for (auto raw : {big_list({-1, 1}), big_list({-2, 1, 3}), big_list({-3, -1}),
                   big_list({-5, 2, 7})}) {
    auto reduced = rankone::normalize_vector(raw).vector;
    for (const BigInt& n : big_list({1, 2, 5})) {
      std::set<BigInt> original{BigInt(0)};
      for (const BigInt& c : raw) original.insert(c * n);
      const BigInt base = *original.begin();
      std::set<BigInt> translated;
      for (const BigInt& x : original) translated.insert(x - base);
      std::set<BigInt> normalized{BigInt(0)};
      for (const BigInt& c : reduced.components) normalized.insert(c * n);
      CHECK(translated == normalized);
    }
  }
}

TEST_CASE("joint profile along the height subsequence") {
  auto spec = hk_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  auto series = rankone::joint_profile(spec, base, vec({1}), big_list({1, 4, 16}));
  REQUIRE(series.entries.size() == 3);
  for (const auto& e : series.entries) {
    CHECK(e.fully_resolved);
    CHECK(e.within_budget);
    CHECK(e.bound.exact());
    CHECK(e.bound.lower == Rational(1, 2));
  }

  auto at_zero = rankone::joint_profile(spec, base, vec({1, 2}), big_list({0}));
  CHECK(at_zero.entries.at(0).bound.exact());
  CHECK(at_zero.entries.at(0).bound.lower == Rational(1));

  // No arithmetic progression x, x+n, x+2n exists in the doubling heights.
  auto zeros = rankone::joint_profile(spec, base, vec({1, 2}), big_list({1, 2, 3}));
  for (const auto& e : zeros.entries) {
    CHECK(e.bound.exact());
    CHECK(e.bound.lower == 0);
  }

  CHECK_THROWS_AS(rankone::joint_profile(spec, base, vec({1}), big_list({4, 1})),
                  rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::joint_profile(spec, base, vec({1}), big_list({-1, 1})),
                  rankone::ArgumentError);
}

TEST_CASE("multiplicative profile multiplies pairwise bounds") {
  auto spec42 = four_cut_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  auto series =
      rankone::multiplicative_profile(spec42, base, vec({1, 2}), big_list({16}));
  REQUIRE(series.entries.size() == 1);
  CHECK(series.entries[0].bound.exact());
  CHECK(series.entries[0].bound.lower == Rational(1, 16));

  // mu(A)^d at n = 0.
  auto spec = hk_spec();
  LevelSet deep = LevelSet::single(1, BigInt(2));
  auto at_zero = rankone::multiplicative_profile(spec, deep, vec({1, 2}), big_list({0}));
  CHECK(at_zero.entries.at(0).bound.lower == Rational(1, 4));

  // With one component the two profiles coincide.
  for (const BigInt& n : big_list({1, 4, 16})) {
    auto joint = rankone::joint_profile(spec, base, vec({3}), {n});
    auto mult = rankone::multiplicative_profile(spec, base, vec({3}), {n});
    CHECK(joint.entries[0].bound.lower == mult.entries[0].bound.lower);
    CHECK(joint.entries[0].bound.upper == mult.entries[0].bound.upper);
  }
}

TEST_CASE("profile entries survive depth caps and budget limits") {
  auto odo = odometer_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  Limits capped;
  capped.depth_cap = 5;
  auto series = rankone::joint_profile(odo, base, vec({1}), big_list({1}), capped);
  const auto& entry = series.entries.at(0);
  CHECK(!entry.fully_resolved);
  CHECK(entry.within_budget);
  CHECK(entry.bound.lower == Rational(31, 32));
  CHECK(entry.bound.upper == Rational(1));

  auto spec = hk_spec();
  Limits tiny;
  tiny.cardinality_budget = 3;
  auto blocked = rankone::joint_profile(spec, base, vec({1, 3}), big_list({1}), tiny);
  CHECK(!blocked.entries.at(0).within_budget);
  CHECK(blocked.entries.at(0).bound.lower == 0);
  CHECK(blocked.entries.at(0).bound.upper == Rational(1));
}

TEST_CASE("zero windows verify exhaustively") {
  auto spec42 = four_cut_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  for (std::uint32_t n : {1u, 2u, 3u}) {
    auto verdict = rankone::verify_zero_window(spec42, base, vec({1, 2}), n);
    CHECK(verdict.kind == TypeVerdict::Kind::zero_on_window);
    CHECK(verdict.bound == 0);
    CHECK(verdict.window_lo == spec42.height(n - 1) + 1);
    CHECK(verdict.window_hi == spec42.height(n));
  }

  // Profile entries inside a verified window agree.
  auto inside = rankone::joint_profile(spec42, base, vec({1, 2}), big_list({257, 1000, 4096}));
  for (const auto& e : inside.entries) {
    CHECK(e.bound.exact());
    CHECK(e.bound.lower == 0);
  }
}

TEST_CASE("window scan reports the first counterexample") {
  auto spec = triple_tail_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  auto verdict = rankone::verify_zero_window(spec, base, vec({1, 2}), 1);
  CHECK(verdict.kind == TypeVerdict::Kind::positive_witnessed);
  REQUIRE(verdict.witnesses.size() == 1);
  CHECK(verdict.witnesses[0] == 2);
  CHECK(verdict.bound == Rational(4, 9));

  // The same verdict arrives from the chunked scan.
  auto threaded = rankone::verify_zero_window(spec, base, vec({1, 2}), 1, Limits{}, 3);
  CHECK(threaded.kind == verdict.kind);
  CHECK(threaded.witnesses == verdict.witnesses);
  CHECK(threaded.bound == verdict.bound);

  // And the profile at the witness matches the reported measure.
  auto at_witness = rankone::joint_profile(spec, base, vec({1, 2}), big_list({2}));
  CHECK(at_witness.entries[0].bound.exact());
  CHECK(at_witness.entries[0].bound.lower == Rational(4, 9));

  CHECK_THROWS_AS(rankone::verify_zero_window(spec, base, vec({1, 2}), 0),
                  rankone::ArgumentError);
}

TEST_CASE("window verdicts degrade honestly under limits") {
  auto odo = odometer_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  Limits capped;
  capped.depth_cap = 8;
  auto verdict = rankone::verify_zero_window(odo, base, vec({1}), 1, capped);
  CHECK(verdict.kind == TypeVerdict::Kind::inconclusive);

  auto spec42 = four_cut_spec();
  Limits tiny;
  tiny.cardinality_budget = 8;
  auto blocked = rankone::verify_zero_window(spec42, base, vec({1, 2}), 2, tiny);
  CHECK(blocked.kind == TypeVerdict::Kind::inconclusive);
}

TEST_CASE("witness pair search over the doubling heights") {
  auto spec = hk_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  std::vector<WitnessPoint> series;
  for (std::uint32_t k = 0; k < 5; ++k) series.push_back({spec.height(k), Rational(1, 2)});

  auto pair = rankone::witness_pair_search(spec, base, series, Rational(1), 2, 0);
  CHECK(pair.m_index == 0);
  CHECK(pair.n_index == 1);
  CHECK(pair.a_m == 1);
  CHECK(pair.a_n == 4);
  CHECK(pair.value == Rational(1, 4));
  CHECK(pair.floor == Rational(1, 10));

  // Degenerate single-point window: the triple is the pairwise measure.
  std::vector<WitnessPoint> one{{BigInt(1), Rational(1, 2)}};
  auto degenerate = rankone::witness_pair_search(spec, base, one, Rational(1), 0, 0);
  CHECK(degenerate.m_index == 0);
  CHECK(degenerate.n_index == 0);
  CHECK(degenerate.value == Rational(1, 2));
  CHECK(degenerate.floor == 0);
}

TEST_CASE("witness pair search validates and flags anomalies") {
  auto spec = hk_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));

  std::vector<WitnessPoint> series;
  for (std::uint32_t k = 0; k < 5; ++k) series.push_back({spec.height(k), Rational(1, 2)});
  std::vector<WitnessPoint> low = series;
  low[2].pairwise = Rational(1, 3);
  CHECK_THROWS_AS(rankone::witness_pair_search(spec, base, low, Rational(1), 2, 0),
                  rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::witness_pair_search(spec, base, series, Rational(1, 2), 2, 0),
                  rankone::ArgumentError);
  CHECK_THROWS_AS(rankone::witness_pair_search(spec, base, series, Rational(1), 3, 0),
                  rankone::ArgumentError);

  // A series whose claimed pairwise floor is wrong sends every recomputed
  // triple to 0, which the search must flag rather than absorb.
  std::vector<WitnessPoint> fake;
  for (std::uint32_t k = 0; k < 5; ++k) fake.push_back({2 * spec.height(k), Rational(1, 2)});
  CHECK_THROWS_AS(rankone::witness_pair_search(spec, base, fake, Rational(1), 2, 0),
                  rankone::AnomalyError);
}

TEST_CASE("alpha certification along the height subsequence") {
  auto spec = hk_spec();
  auto verdict = rankone::certify_v_alpha_lower(spec, vec({1}), rankone::height_subsequence(true), 4);
  CHECK(verdict.kind == TypeVerdict::Kind::positive_witnessed);
  CHECK(verdict.bound == Rational(1, 2));
  CHECK(verdict.witnesses == big_list({1, 4, 16, 64, 256}));
  CHECK(verdict.note.find("n = height(m)") != std::string::npos);
  CHECK(verdict.note.find("every stage") != std::string::npos);

  // An exact zero anywhere blocks certification.
  auto zero = rankone::certify_v_alpha_lower(spec, vec({1, 2}), rankone::height_subsequence(), 2);
  CHECK(zero.kind == TypeVerdict::Kind::inconclusive);
  CHECK(zero.bound == 0);

  // Unresolvable constructions stay inconclusive.
  Limits capped;
  capped.depth_cap = 8;
  auto odo = rankone::certify_v_alpha_lower(odometer_spec(), vec({1}),
                                            rankone::height_subsequence(), 2, capped);
  CHECK(odo.kind == TypeVerdict::Kind::inconclusive);

  rankone::SubsequenceRule constant;
  constant.description = "n = 1";
  constant.n_of_m = [](const ConstructionSpec&, std::uint32_t) { return BigInt(1); };
  CHECK_THROWS_AS(rankone::certify_v_alpha_lower(spec, vec({1}), constant, 2),
                  rankone::ArgumentError);
}

TEST_CASE("levels of a column share their intersection measures") {
  std::mt19937_64 rng(20240821);
  for (int round = 0; round < 10; ++round) {
    auto spec = ConstructionSpec(Rational(1), [seed = rng()](const StageContext& ctx) {
      std::mt19937_64 local(seed + ctx.n);
      Stage st;
      st.cuts = 2 + static_cast<std::uint32_t>(local() % 3);
      st.spacers.resize(st.cuts);
      for (auto& s : st.spacers) s = BigInt(local() % 4);
      return st;
    }, "random");
    const std::uint32_t j = 1;
    const BigInt h = spec.height(j);
    std::vector<BigInt> shifts{BigInt(1 + static_cast<int>(rng() % 6))};
    const LevelSet top = LevelSet::single(j, h - 1);
    auto depth = rankone::resolve_depth(spec, top, shifts, Limits{});
    REQUIRE(depth.fully_resolved);
    rankone::MeasureBound first =
        rankone::intersection_measure(spec, LevelSet::single(j, BigInt(0)), shifts, depth.depth,
                                      Limits{});
    for (BigInt lvl = 1; lvl < h; ++lvl) {
      rankone::MeasureBound other = rankone::intersection_measure(
          spec, LevelSet::single(j, lvl), shifts, depth.depth, Limits{});
      CHECK(other.exact());
      CHECK(other.lower == first.lower);
    }
  }
}

TEST_CASE("joint measures grow with the level set") {
  std::mt19937_64 rng(20240822);
  for (int round = 0; round < 20; ++round) {
    auto spec = ConstructionSpec(Rational(1), [seed = rng()](const StageContext& ctx) {
      std::mt19937_64 local(seed + ctx.n);
      Stage st;
      st.cuts = 2 + static_cast<std::uint32_t>(local() % 2);
      st.spacers.resize(st.cuts);
      for (auto& s : st.spacers) s = BigInt(local() % 3);
      return st;
    }, "random");
    const std::uint32_t col = 1;
    const BigInt h = spec.height(col);
    LevelSet b;
    b.column = col;
    for (BigInt lvl = 0; lvl < h; ++lvl)
      if (rng() % 3 != 0) b.heights.push_back(lvl);
    if (b.heights.empty()) b.heights.push_back(0);
    LevelSet a;
    a.column = col;
    for (const BigInt& lvl : b.heights)
      if (rng() % 2 == 0) a.heights.push_back(lvl);
    if (a.heights.empty()) a.heights.push_back(b.heights.front());

    std::vector<BigInt> shifts{BigInt(1 + static_cast<int>(rng() % 5)),
                               BigInt(6 + static_cast<int>(rng() % 5))};
    try {
      auto ra = rankone::measure_at_resolved(spec, a, shifts, Limits{});
      auto rb = rankone::measure_at_resolved(spec, b, shifts, Limits{});
      if (ra.fully_resolved && rb.fully_resolved) {
        CHECK(ra.bound.lower <= rb.bound.lower);
      }
    } catch (const rankone::BudgetError&) {
      // Dense-spacer draws can exceed the cardinality budget; monotonicity
      // only applies to rounds that resolve.
    }
  }
}
