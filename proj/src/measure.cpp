#include "rankone/measure.hpp"

#include <algorithm>

#include "rankone/errors.hpp"
#include "rankone/kernels.hpp"

namespace rankone {

namespace {

std::vector<BigInt> normalize_shifts(std::vector<BigInt> shifts) {
  if (shifts.empty()) throw ArgumentError("shift list is empty");
  for (const BigInt& k : shifts) {
    if (k < 0) throw ArgumentError("negative shift; reduce the vector first");
  }
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  return shifts;
}

}  // namespace

MeasureBound intersection_measure(const ConstructionSpec& spec, const LevelSet& a,
                                  std::vector<BigInt> shifts, std::uint32_t n,
                                  const Limits& limits) {
  shifts = normalize_shifts(std::move(shifts));
  const DescendantSet ds = descendants(spec, a, n);
  const BigInt h = spec.height(n);
  const Rational w = spec.width(n);
  const BigInt& k_max = shifts.back();
  const BigInt limit = h - 1 - k_max;  // x <= limit iff x is resolved
  const Rational mu_a = level_set_measure(spec, a);

  if (limit < 0) return {Rational(0), mu_a};

  const BigInt total = ds.count();
  const bool fully = ds.max_height() <= limit;

  if (total <= limits.cardinality_budget) {
    BigInt matched;
    BigInt unresolved;
    if (auto d64 = materialize_u64(ds, k_max, limits)) {
      std::vector<std::uint64_t> s64;
      s64.reserve(shifts.size());
      for (const BigInt& k : shifts) s64.push_back(k.convert_to<std::uint64_t>());
      const auto lim64 = limit.convert_to<std::uint64_t>();
      matched = BigInt(kernels::joint_count(*d64, s64, lim64));
      const auto first_unresolved =
          std::upper_bound(d64->begin(), d64->end(), lim64) - d64->begin();
      unresolved = BigInt(d64->size()) - BigInt(first_unresolved);
    } else {
      const auto d = materialize(ds, limits);
      matched = BigInt(kernels::joint_count_generic<BigInt>(d, shifts, limit));
      const auto first_unresolved = std::upper_bound(d.begin(), d.end(), limit) - d.begin();
      unresolved = BigInt(d.size()) - BigInt(first_unresolved);
    }
    const Rational lower = Rational(matched) * w;
    const Rational upper = lower + Rational(unresolved) * w;
    return {lower, upper};
  }

  if (shifts.size() == 1 && fully) {
    // Pairwise counting survives past the materialization budget: the pair
    // count at one gap comes from the per-stage difference convolution.
    const BigInt pairs = pair_count_at_gap(ds, shifts.front(), limits);
    return MeasureBound::point(Rational(pairs) * w);
  }
  throw BudgetError("intersection at depth " + std::to_string(n) +
                    " needs more than the cardinality budget");
}

DepthResult resolve_depth(const ConstructionSpec& spec, const LevelSet& a,
                          const std::vector<BigInt>& shifts, const Limits& limits) {
  const auto norm = normalize_shifts(shifts);
  validate_level_set(spec, a);
  const BigInt& k_max = norm.back();
  BigInt max_descendant = a.heights.back();
  for (std::uint32_t n = a.column;; ++n) {
    if (max_descendant + k_max <= spec.height(n) - 1) return {n, true};
    if (n >= limits.depth_cap) return {limits.depth_cap, false};
    max_descendant += spec.stage_offsets(n).back();
  }
}

ResolvedMeasure measure_at_resolved(const ConstructionSpec& spec, const LevelSet& a,
                                    std::vector<BigInt> shifts, const Limits& limits) {
  const DepthResult d = resolve_depth(spec, a, shifts, limits);
  ResolvedMeasure out;
  out.depth = d.depth;
  out.fully_resolved = d.fully_resolved;
  out.bound = intersection_measure(spec, a, std::move(shifts), d.depth, limits);
  return out;
}

}  // namespace rankone
