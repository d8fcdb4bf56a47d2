#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/descendants.hpp"
#include "rankone/errors.hpp"

using rankone::BigInt;
using rankone::ConstructionSpec;
using rankone::DescendantSet;
using rankone::LevelSet;
using rankone::Limits;
using rankone::Rational;
using rankone::Stage;
using rankone::StageContext;

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

std::vector<BigInt> brute_materialize(const ConstructionSpec& spec, const LevelSet& a,
                                      std::uint32_t n) {
  std::vector<BigInt> cur = a.heights;
  for (std::uint32_t m = a.column; m < n; ++m) {
    const auto offs = spec.stage_offsets(m);
    std::vector<BigInt> next;
    next.reserve(cur.size() * offs.size());
    for (const BigInt& o : offs)
      for (const BigInt& x : cur) next.push_back(x + o);
    std::sort(next.begin(), next.end());
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

TEST_CASE("descendants of the base level across two doubling stages") {
  auto spec = hk_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  DescendantSet d = rankone::descendants(spec, base, 2);
  REQUIRE(d.stage_offsets.size() == 2);
  CHECK(d.stage_offsets[0] == std::vector<BigInt>{BigInt(0), BigInt(1)});
  CHECK(d.stage_offsets[1] == std::vector<BigInt>{BigInt(0), BigInt(4)});
  CHECK(d.count() == 4);
  CHECK(d.max_height() == 5);

  auto mat = rankone::materialize(d, Limits{});
  CHECK(mat == std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(4), BigInt(5)});
}

TEST_CASE("descendants in the four-cut construction") {
  auto spec = four_cut_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));

  DescendantSet d1 = rankone::descendants(spec, base, 1);
  auto mat1 = rankone::materialize(d1, Limits{});
  CHECK(mat1 == std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(5), BigInt(7)});

  DescendantSet d2 = rankone::descendants(spec, base, 2);
  CHECK(d2.count() == 16);
  // Second-stage offsets scale the same pattern by h_1 = 16.
  CHECK(d2.stage_offsets[1] ==
        std::vector<BigInt>{BigInt(0), BigInt(16), BigInt(80), BigInt(112)});
  auto mat2 = rankone::materialize(d2, Limits{});
  REQUIRE(mat2.size() == 16);
  CHECK(mat2.front() == 0);
  CHECK(mat2.back() == 112 + 7);
  CHECK(mat2 == brute_materialize(spec, base, 2));
}

TEST_CASE("descendants of a multi-level set start from every source height") {
  auto spec = hk_spec();
  LevelSet a{1, {BigInt(0), BigInt(1)}};  // bottom two levels of the second column
  DescendantSet d = rankone::descendants(spec, a, 2);
  CHECK(d.count() == 4);
  auto mat = rankone::materialize(d, Limits{});
  CHECK(mat == std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(4), BigInt(5)});
  // Measure is conserved: each of the 2 source levels splits into 2 copies.
  CHECK(rankone::level_set_measure(spec, a) == Rational(1));
  CHECK(spec.width(2) * d.count() == Rational(1));
}

TEST_CASE("descendants at the source column are the set itself") {
  auto spec = hk_spec();
  LevelSet a{1, {BigInt(2), BigInt(3)}};
  DescendantSet d = rankone::descendants(spec, a, 1);
  CHECK(d.stage_offsets.empty());
  CHECK(d.count() == 2);
  auto mat = rankone::materialize(d, Limits{});
  CHECK(mat == a.heights);
}

TEST_CASE("push_to_column rewrites a level set at a later stage") {
  auto spec = hk_spec();
  LevelSet a{1, {BigInt(0), BigInt(1)}};
  LevelSet b = rankone::push_to_column(spec, a, 2, Limits{});
  CHECK(b.column == 2);
  CHECK(b.heights == std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(4), BigInt(5)});
  CHECK(rankone::level_set_measure(spec, b) == rankone::level_set_measure(spec, a));
  // Pushing to the same column is the identity.
  LevelSet same = rankone::push_to_column(spec, a, 1, Limits{});
  CHECK(same.column == 1);
  CHECK(same.heights == a.heights);
}

TEST_CASE("descendant counts multiply and heights never collide") {
  std::mt19937_64 rng(20240818);
  for (int round = 0; round < 12; ++round) {
    const std::uint32_t cuts = 2 + static_cast<std::uint32_t>(rng() % 3);
    auto spec = ConstructionSpec(Rational(1), [cuts, seed = rng()](const StageContext& ctx) {
      std::mt19937_64 local(seed + ctx.n);
      Stage st;
      st.cuts = cuts;
      st.spacers.resize(cuts);
      for (auto& s : st.spacers) s = BigInt(local() % 5);
      return st;
    }, "random");
    const std::uint32_t depth = 1 + static_cast<std::uint32_t>(rng() % 4);
    LevelSet base = LevelSet::single(0, BigInt(0));
    DescendantSet d = rankone::descendants(spec, base, depth);

    BigInt expect = 1;
    for (std::uint32_t m = 0; m < depth; ++m) expect *= spec.stage(m).cuts;
    CHECK(d.count() == expect);

    auto mat = rankone::materialize(d, Limits{});
    CHECK(BigInt(static_cast<std::int64_t>(mat.size())) == expect);
    CHECK(std::adjacent_find(mat.begin(), mat.end()) == mat.end());
    CHECK(std::is_sorted(mat.begin(), mat.end()));
    CHECK(mat.back() == d.max_height());
    CHECK(mat.back() < spec.height(depth));
    CHECK(mat == brute_materialize(spec, base, depth));

    // Conservation: the copies of the source level tile exactly its measure.
    CHECK(spec.width(depth) * d.count() == rankone::level_set_measure(spec, base));
  }
}

TEST_CASE("materialize respects the cardinality budget") {
  auto spec = hk_spec();
  DescendantSet d = rankone::descendants(spec, LevelSet::single(0, BigInt(0)), 8);
  CHECK(d.count() == 256);
  Limits tight;
  tight.cardinality_budget = 16;
  CHECK_THROWS_AS(rankone::materialize(d, tight), rankone::BudgetError);
  Limits enough;
  enough.cardinality_budget = 256;
  CHECK(rankone::materialize(d, enough).size() == 256);
}

TEST_CASE("materialize_u64 declines when heights approach the word size") {
  auto huge = ConstructionSpec(Rational(1), [](const StageContext&) {
    Stage st;
    st.cuts = 2;
    st.spacers = {BigInt(0), (BigInt(1) << 70)};
    return st;
  }, "huge");
  DescendantSet d = rankone::descendants(huge, LevelSet::single(0, BigInt(0)), 2);
  CHECK(!rankone::materialize_u64(d, BigInt(0), Limits{}).has_value());

  auto spec = hk_spec();
  DescendantSet small = rankone::descendants(spec, LevelSet::single(0, BigInt(0)), 2);
  auto mat = rankone::materialize_u64(small, BigInt(0), Limits{});
  REQUIRE(mat.has_value());
  CHECK(*mat == std::vector<std::uint64_t>{0, 1, 4, 5});
  // A headroom request that would overflow also declines.
  CHECK(!rankone::materialize_u64(small, (BigInt(1) << 62), Limits{}).has_value());
}

TEST_CASE("pair counts at a gap match the materialized sets") {
  auto spec = four_cut_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  for (std::uint32_t n : {1u, 2u, 3u}) {
    DescendantSet d = rankone::descendants(spec, base, n);
    auto mat = rankone::materialize(d, Limits{});
    std::map<BigInt, BigInt> diffs;
    for (std::size_t i = 0; i < mat.size(); ++i)
      for (std::size_t j = i + 1; j < mat.size(); ++j) diffs[mat[j] - mat[i]] += 1;
    for (const BigInt& gap :
         {BigInt(1), BigInt(4), BigInt(16), BigInt(96), BigInt(112), BigInt(2), BigInt(10000)}) {
      BigInt want = 0;
      if (auto it = diffs.find(gap); it != diffs.end()) want = it->second;
      CHECK(rankone::pair_count_at_gap(d, gap, Limits{}) == want);
    }
  }
}

TEST_CASE("pair counts work far beyond the materialization budget") {
  auto spec = hk_spec();
  LevelSet base = LevelSet::single(0, BigInt(0));
  DescendantSet d = rankone::descendants(spec, base, 40);
  CHECK(d.count() == BigInt(1) << 40);
  Limits tight;
  tight.cardinality_budget = 1 << 16;
  CHECK_THROWS_AS(rankone::materialize(d, tight), rankone::BudgetError);
  // Descendants are subset sums of {4^m}; a gap has a unique signed-digit
  // form, so the count is 2^(free stages).  Gap 1 and gap 4 each pin one
  // stage; gap 3 = 4 - 1 pins two.
  CHECK(rankone::pair_count_at_gap(d, BigInt(1), tight) == BigInt(1) << 39);
  CHECK(rankone::pair_count_at_gap(d, BigInt(4), tight) == BigInt(1) << 39);
  CHECK(rankone::pair_count_at_gap(d, BigInt(3), tight) == BigInt(1) << 38);
}
