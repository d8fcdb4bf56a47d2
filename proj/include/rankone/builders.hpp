#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rankone/analysis.hpp"
#include "rankone/construction.hpp"
#include "rankone/measure.hpp"

// Parametric generators for the construction families exercised by the
// experiment suite. Every builder returns an ordinary ConstructionSpec;
// judgment calls (tail schedules, fallbacks, stage assignments) are recorded
// in the spec's metadata so callers can audit them.
namespace rankone::builders {

// Which stages a recurring cut pattern applies to.
struct ScheduleRule {
  std::string description;
  std::function<bool(std::uint32_t)> applies;
};

ScheduleRule every_stage();
// Applies at stages n with n % period == phase.
ScheduleRule period_phase(std::uint32_t period, std::uint32_t phase);

// Strictly increasing positive integer sequence, indexed from k = 1.
struct SequenceRule {
  std::string description;
  std::function<BigInt(std::uint32_t)> value;
};

SequenceRule squares();         // k^2
SequenceRule powers_of_two();   // 2^k
SequenceRule linear(BigInt scale, BigInt offset);  // scale*k + offset

// Minimum admissible h_{n+1} as a function of the stage context and the
// running pattern weight H_n = (sum_i v_i) * (sum_{k<=n} h_k). Builders add
// their own representation-uniqueness floor on top of whatever this returns.
using GrowthRule = std::function<BigInt(const StageContext&, const BigInt&)>;

// h_{n+1} >= (n+1) * H_n.
GrowthRule default_growth();

// Cut into d+1 subcolumns at pattern stages so the subcolumn base offsets
// inside C_{n+1} are exactly {0, v_1 h_n, ..., v_d h_n}; other stages cut in
// two with a large tail. The recurring pattern makes every level set meet its
// images under T^{v_i h_n} on a fixed fraction of itself.
ConstructionSpec build_example41(const Vector& v, ScheduleRule pattern_stages = every_stage());

// Four-cut construction with spacers (0, 3h_n, h_n, 8h_n) at every stage:
// h_{n+1} = 16 h_n and subcolumn bases {0, h_n, 5h_n, 7h_n}.
ConstructionSpec build_example42();

// 2d-cut construction pairing each gap v_i h_n with a large buffer M h_n and
// a measure-balancing tail. Requires v_d / v_1 >= d; rejected otherwise with
// the failed inequality spelled out.
ConstructionSpec build_example43(const Vector& v);

// Two equal cuts with c_n spacer levels above the right subcolumn. The
// default c_n = 2 h_n gives heights 1, 4, 16, 64, ...
ConstructionSpec build_hk_skyscraper();
ConstructionSpec build_hk_skyscraper(std::function<BigInt(const StageContext&)> c_rule,
                                     std::string label);

// Two equal cuts with adaptively chosen tails c_n >= 2 h_n (so heights at
// least quadruple and signed digit expansions over the heights are unique).
// For every k with a_k or b_k inside the reachable difference set, the tail
// choices steer the heights so at most two of {a_k, b_k, a_k + b_k} are ever
// representable, forcing mu(I cap T^{a_k} I cap T^{a_k + b_k} I) = 0. Stages
// beyond the horizon continue with c_n = 3 h_n and no avoidance checks.
ConstructionSpec build_prop64_adaptive(const SequenceRule& a, const SequenceRule& b,
                                       std::uint32_t horizon);

// k equal cuts with no spacers at pattern stages; with_filler interleaves
// two-cut stages with tail 4 h_n to keep the total measure infinite.
ConstructionSpec build_fact62(std::uint32_t k, bool with_filler = true);

// d+1 cuts at every stage with base offsets {0, v_1 h_n, ..., v_d h_n} and a
// tail schedule making h_{m+1} / H_m grow without bound (default floor
// (m+1) H_m, plus the uniqueness floor (2 v_d + 1) sum_{k<=m} h_k).
ConstructionSpec build_thm72(const Vector& v, GrowthRule growth = {});

// Like build_thm72 but with base offsets {0, (v_d - v_{d-1}) h_n, ...,
// (v_d - v_1) h_n, v_d h_n} by default, or an explicit list of offset
// multipliers. After building, the joint profile along n = h_m is probed; if
// the default pattern yields an exact zero there, the builder substitutes the
// build_thm72 offsets and records the substitution in metadata.
ConstructionSpec build_thm73(const Vector& v, GrowthRule growth = {},
                             std::optional<std::vector<BigInt>> offset_multipliers = std::nullopt);

// One construction realizing the pattern of every vector in the family
// infinitely often: stage m >= 2 that is a prime power p^e uses the vector
// assigned to p (primes in increasing order, cycling through the family);
// other stages are two-cut fillers. Assignments are recorded in metadata.
ConstructionSpec build_cor74(const std::vector<Vector>& family);

// mu'(A cap T'^n A) for the k-point cyclic extension T' of the base
// transformation, with A inside a single fiber copy: exactly 0 unless k
// divides n, in which case it equals the base measure at shift n/k.
MeasureBound cyclic_extension_measure(const ConstructionSpec& base, const LevelSet& a,
                                      const BigInt& n, std::uint32_t k,
                                      const Limits& limits = {});

// Whether z is representable as sum_i eps_i * heights[i] with eps_i in
// {-1, 0, 1}. Exact greedy extraction; requires each height to exceed twice
// the sum of all earlier ones (guaranteed at quadrupling growth).
bool signed_digit_member(const std::vector<BigInt>& heights, const BigInt& z);

}  // namespace rankone::builders
