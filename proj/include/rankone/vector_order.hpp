#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rankone/analysis.hpp"

namespace rankone {

// Certificate for a decided order relation between standard-form vectors.
// For le_p: n*v_i = m*w_{injection[i]} - c with c = 0 or c = m*w_b.
// For le_m: n*v_i = sum_{j in plus_sets[i]} m*w_j - sum_{j in minus_sets[i]} m*w_j.
// Substituting the witness into its defining equations must give exact
// equalities; verify_witness checks that independently of the search.
struct OrderWitness {
  enum class Relation { le_p, le_m };
  Relation relation = Relation::le_p;
  BigInt n;
  BigInt m;
  BigInt c;                                        // le_p only; 0 otherwise
  std::vector<std::size_t> injection;              // le_p: i -> index into w
  std::vector<std::vector<std::size_t>> plus_sets;   // le_m: I(i)
  std::vector<std::vector<std::size_t>> minus_sets;  // le_m: J(i)
};

struct OrderDecision {
  bool holds = false;
  std::optional<OrderWitness> witness;
};

// Whether {n v_1, ..., n v_d} is contained in {m w_1 - c, ..., m w_d' - c}
// for some positive integers n, m and c in {0} union {m w_i}. Exact: the
// injection and c-form determine the ratio n/m, so the search space is
// finite. dim(v) > dim(w) is immediately false.
OrderDecision decide_le_p(const Vector& v, const Vector& w);

// Whether each n v_i is a signed sum of distinct m w_j. Exact over the 3^d'
// signed subset sums; the candidate matched to v_1 forces the ratio.
OrderDecision decide_le_m(const Vector& v, const Vector& w);

// Substitutes the witness into its defining equations and checks every
// structural invariant (positivity, injectivity, disjoint index sets).
bool verify_witness(const Vector& v, const Vector& w, const OrderWitness& wit);

}  // namespace rankone
