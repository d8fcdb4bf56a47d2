#include "rankone/descendants.hpp"

#include <algorithm>
#include <map>

#include "rankone/errors.hpp"

namespace rankone {

BigInt DescendantSet::count() const {
  BigInt c = BigInt(source.heights.size());
  for (const auto& offsets : stage_offsets) c *= BigInt(offsets.size());
  return c;
}

BigInt DescendantSet::max_height() const {
  BigInt m = source.heights.back();
  for (const auto& offsets : stage_offsets) m += offsets.back();
  return m;
}

DescendantSet descendants(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n) {
  validate_level_set(spec, a);
  if (n < a.column) throw ArgumentError("descendants: target column above the source column");
  DescendantSet d;
  d.source = a;
  d.depth = n;
  d.stage_offsets.reserve(n - a.column);
  for (std::uint32_t m = a.column; m < n; ++m) d.stage_offsets.push_back(spec.stage_offsets(m));
  return d;
}

namespace {

template <typename Int>
std::vector<Int> materialize_as(const DescendantSet& d) {
  std::vector<Int> cur;
  cur.reserve(d.source.heights.size());
  for (const BigInt& y : d.source.heights) cur.push_back(static_cast<Int>(y));
  std::vector<Int> next;
  for (const auto& offsets : d.stage_offsets) {
    next.clear();
    next.reserve(cur.size() * offsets.size());
    for (const BigInt& o : offsets) {
      const Int oo = static_cast<Int>(o);
      for (const Int& x : cur) next.push_back(x + oo);
    }
    cur.swap(next);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

void check_budget(const DescendantSet& d, const Limits& limits) {
  if (d.count() > limits.cardinality_budget) {
    throw BudgetError("descendant set of " + rational_string(Rational(d.count())) +
                      " elements exceeds the cardinality budget");
  }
}

}  // namespace

std::vector<BigInt> materialize(const DescendantSet& d, const Limits& limits) {
  check_budget(d, limits);
  auto out = materialize_as<BigInt>(d);
  // The sums are distinct by construction (each stage places copies of the
  // column on disjoint height ranges); adjacent_find guards the invariant.
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw AnomalyError("descendant heights collided; construction invariant broken");
  }
  return out;
}

std::optional<std::vector<std::uint64_t>> materialize_u64(const DescendantSet& d,
                                                          const BigInt& headroom,
                                                          const Limits& limits) {
  check_budget(d, limits);
  if (d.max_height() + headroom >= (BigInt(1) << 62)) return std::nullopt;
  return materialize_as<std::uint64_t>(d);
}

LevelSet push_to_column(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n,
                        const Limits& limits) {
  if (n == a.column) {
    validate_level_set(spec, a);
    return a;
  }
  LevelSet out;
  out.column = n;
  out.heights = materialize(descendants(spec, a, n), limits);
  return out;
}

BigInt pair_count_at_gap(const DescendantSet& d, const BigInt& gap, const Limits& limits) {
  // Difference multiset of the whole sumset factors as the convolution of the
  // per-stage difference multisets (sums decompose uniquely).  Each factor is
  // symmetric around 0, so taking the widest factors first and discarding any
  // partial value the remaining factors cannot carry back to `gap` keeps the
  // support small without changing the count.
  using Multiset = std::map<BigInt, BigInt>;
  auto difference_multiset = [](const std::vector<BigInt>& values) {
    Multiset out;
    for (const BigInt& x : values)
      for (const BigInt& y : values) out[y - x] += 1;
    return out;
  };
  std::vector<Multiset> factors;
  factors.push_back(difference_multiset(d.source.heights));
  for (const auto& offsets : d.stage_offsets) factors.push_back(difference_multiset(offsets));
  auto spread = [](const Multiset& m) { return m.rbegin()->first; };
  std::sort(factors.begin(), factors.end(),
            [&](const Multiset& a, const Multiset& b) { return spread(a) > spread(b); });

  std::vector<BigInt> remaining(factors.size() + 1, BigInt(0));
  for (std::size_t i = factors.size(); i-- > 0;)
    remaining[i] = remaining[i + 1] + spread(factors[i]);

  Multiset acc{{BigInt(0), BigInt(1)}};
  for (std::size_t i = 0; i < factors.size(); ++i) {
    Multiset next;
    for (const auto& [da, ca] : acc) {
      for (const auto& [db, cb] : factors[i]) {
        BigInt value = da + db;
        BigInt slack = gap - value;
        if (slack < 0) slack = -slack;
        if (slack <= remaining[i + 1]) next[value] += ca * cb;
      }
    }
    if (BigInt(next.size()) > limits.cardinality_budget) {
      throw BudgetError("difference multiset support exceeds the cardinality budget");
    }
    acc.swap(next);
    if (acc.empty()) return BigInt(0);
  }
  auto it = acc.find(gap);
  return it == acc.end() ? BigInt(0) : it->second;
}

}  // namespace rankone
