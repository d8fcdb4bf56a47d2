#pragma once

#include <cstdint>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/descendants.hpp"
#include "rankone/measure.hpp"
#include "rankone/numeric.hpp"

namespace rankone::oracle {

// Half-open interval [lo, hi) with rational endpoints.
struct Interval {
  Rational lo;
  Rational hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Normalized finite union of half-open intervals: sorted, pairwise disjoint,
// touching pieces merged, no empty pieces.
class IntervalSet {
 public:
  IntervalSet() = default;
  static IntervalSet from_pieces(std::vector<Interval> pieces);

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  Rational length() const;

  IntervalSet translated(const Rational& delta) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet clamp(const Rational& lo, const Rational& hi) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> pieces_;
};

// Stage-n tower coordinates: the point at level i, horizontal offset
// t in [0, w_n), sits at i*w_n + t.  The transformation is translation by
// `step` on [0, domain); `total` is the measure the stage accounts for.
struct TowerMap {
  Rational step;
  Rational domain;
  Rational total;
};

TowerMap realize(const ConstructionSpec& spec, std::uint32_t n);

// The region a level set occupies in stage-n coordinates.  Computed by
// pushing intervals through each stage's strip-to-level map, so it shares no
// machinery with the descendant sumsets.  Throws BudgetError when the piece
// count exceeds the cardinality budget.
IntervalSet embed_level_set(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n,
                            const Limits& limits = {});

// Same contract and same bound semantics as intersection_measure, evaluated
// with interval arithmetic in stage-n coordinates.
MeasureBound oracle_intersection(const ConstructionSpec& spec, const LevelSet& a,
                                 std::vector<BigInt> shifts, std::uint32_t n,
                                 const Limits& limits = {});

}  // namespace rankone::oracle
