#pragma once

#include "rankone/descendants.hpp"

namespace rankone {

// Exact rational interval. lower == upper when every descendant was resolved
// at the computing depth; otherwise the gap is exactly the measure of the
// unresolved descendants, which later stages will split between the two ends.
struct MeasureBound {
  Rational lower;
  Rational upper;

  bool exact() const { return lower == upper; }
  static MeasureBound point(Rational v) { return {v, v}; }
};

// mu(A  cap  T^{-k_1}A  cap ... cap  T^{-k_d}A) for the shift list k, computed in
// column N as w_N times the number of descendants x with x + k in D for every
// shift k. x is resolved when x + max(shifts) <= h_N - 1; unresolved
// descendants widen the upper bound by their measure.
MeasureBound intersection_measure(const ConstructionSpec& spec, const LevelSet& a,
                                  std::vector<BigInt> shifts, std::uint32_t n,
                                  const Limits& limits = {});

struct DepthResult {
  std::uint32_t depth = 0;
  bool fully_resolved = false;
};

// Smallest N <= limits.depth_cap at which intersection_measure is exact
// (every descendant resolved). Monotone: once the slack h_N - 1 - max(D) -
// max(shifts) is nonnegative it stays so. Returns the cap with
// fully_resolved=false when the cap is hit (odometer-like specs with no tail
// spacers never resolve; the interval answer is the contract).
DepthResult resolve_depth(const ConstructionSpec& spec, const LevelSet& a,
                          const std::vector<BigInt>& shifts, const Limits& limits = {});

struct ResolvedMeasure {
  MeasureBound bound;
  std::uint32_t depth = 0;
  bool fully_resolved = false;
};

// resolve_depth followed by intersection_measure at that depth.
ResolvedMeasure measure_at_resolved(const ConstructionSpec& spec, const LevelSet& a,
                                    std::vector<BigInt> shifts, const Limits& limits = {});

}  // namespace rankone
