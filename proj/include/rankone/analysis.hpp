#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/descendants.hpp"
#include "rankone/measure.hpp"
#include "rankone/numeric.hpp"

namespace rankone {

// Strictly increasing positive integer components.
struct Vector {
  std::vector<BigInt> components;
  std::size_t dimension() const { return components.size(); }
  friend bool operator==(const Vector&, const Vector&) = default;
};

// Validates and wraps components. Throws ArgumentError on empty input,
// components < 1, or components out of strict increasing order.
Vector make_vector(std::vector<BigInt> components);

struct NormalizedVector {
  Vector vector;
  std::string description;
};

// Reduces a list of distinct nonzero integers to the standard positive form:
// already-positive input is sorted; otherwise every component is re-anchored
// at the most negative one (differences plus its negation), which preserves
// the intersection pattern up to translation.
NormalizedVector normalize_vector(const std::vector<BigInt>& raw);

struct SeriesEntry {
  BigInt n;
  MeasureBound bound;
  std::uint32_t depth = 0;
  bool fully_resolved = false;
  bool within_budget = true;
};

struct MeasureSeries {
  enum class Mode { joint, multiplicative };
  Mode mode = Mode::joint;
  std::vector<SeriesEntry> entries;
};

// mu(A cap T^{v1 n}A cap ... cap T^{vd n}A) at the first fully resolved
// depth, one entry per n. Entries that hit the budget record the trivial
// interval [0, mu(A)] and are marked, never skipped.
MeasureSeries joint_profile(const ConstructionSpec& spec, const LevelSet& a, const Vector& v,
                            const std::vector<BigInt>& ns, const Limits& limits = {},
                            std::uint32_t threads = 1);

// prod_i mu(A cap T^{vi n}A), with interval bounds multiplied per factor.
MeasureSeries multiplicative_profile(const ConstructionSpec& spec, const LevelSet& a,
                                     const Vector& v, const std::vector<BigInt>& ns,
                                     const Limits& limits = {}, std::uint32_t threads = 1);

struct TypeVerdict {
  enum class Kind { positive_witnessed, zero_on_window, inconclusive };
  Kind kind = Kind::inconclusive;
  // positive_witnessed: certified lower bound (a measure, or a ratio of
  // mu(I) for certify_v_alpha_lower). zero_on_window: 0.
  Rational bound;
  // n (or m) values the bound was attained or falsified at.
  std::vector<BigInt> witnesses;
  // Inclusive m-range checked by verify_zero_window.
  BigInt window_lo;
  BigInt window_hi;
  std::string note;
};

std::string to_string(TypeVerdict::Kind kind);

// Exhaustively decides whether the joint intersection along v is exactly 0
// for every m with height(n-1) < m <= height(n). A single materialized
// descendant set serves every m through membership kernels. Returns
// zero_on_window, or positive_witnessed with the first counterexample and
// its exact measure, or inconclusive when depth or budget limits interfere.
TypeVerdict verify_zero_window(const ConstructionSpec& spec, const LevelSet& a, const Vector& v,
                               std::uint32_t n, const Limits& limits = {},
                               std::uint32_t threads = 1);

struct WitnessPoint {
  BigInt shift;       // a_k
  Rational pairwise;  // mu(A cap T^{a_k}A), supplied by the caller
};

struct WitnessPair {
  std::size_t m_index;
  std::size_t n_index;
  BigInt a_m;
  BigInt a_n;
  Rational value;  // exact mu(A cap T^{a_m}A cap T^{a_n}A)
  Rational floor;  // mu(A) / C(2M+1, 2); 0 in the degenerate M = 0 case
};

// Searches the window [N, N+2M] of the series for the pair with the largest
// exact triple intersection. Requires every pairwise measure in the window
// to be at least mu(A)/M (ArgumentError otherwise; waived for M = 0). If
// every pair resolves exactly and none reaches mu(A)/C(2M+1,2), that
// contradicts the pigeonhole bound and raises AnomalyError.
WitnessPair witness_pair_search(const ConstructionSpec& spec, const LevelSet& a,
                                const std::vector<WitnessPoint>& series, const Rational& a_measure,
                                std::uint32_t M, std::size_t N, const Limits& limits = {});

// Names n as a strictly increasing function of the stage index m.
struct SubsequenceRule {
  std::string description;
  std::function<BigInt(const ConstructionSpec&, std::uint32_t)> n_of_m;
  // Set by builders whose stage pattern guarantees the rule recurs forever;
  // finite verification plus this flag is what a positive verdict records.
  bool recurs_every_stage = false;
};

// n = height(m).
SubsequenceRule height_subsequence(bool recurs_every_stage = false);

// Certifies min over columns j <= M, stages m in [j, M], of
// mu(I cap T^{v1 n(m)}I cap ...) / mu(I) taken over every level I of column
// j. Levels of a column share their descendant offsets, so one exact count
// per (column, m) covers them all. Returns positive_witnessed with the
// minimal ratio, or inconclusive on an exact zero, unresolved depth, or
// budget exhaustion.
TypeVerdict certify_v_alpha_lower(const ConstructionSpec& spec, const Vector& v,
                                  const SubsequenceRule& rule, std::uint32_t M,
                                  const Limits& limits = {});

}  // namespace rankone
