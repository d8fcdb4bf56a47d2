#pragma once

#include <cstdint>
#include <vector>

#include "rankone/construction.hpp"

namespace rankone {

// Computation limits threaded through every operation that can grow with
// depth. cardinality_budget caps how many elements any single set may
// materialize; depth_cap bounds the search in resolve_depth.
struct Limits {
  BigInt cardinality_budget = BigInt(1) << 20;
  std::uint32_t depth_cap = 64;
};

// Descendants of a level set in a deeper column, kept in sumset form: the
// heights are {y + o_c + ... + o_{N-1} : y in source, o_m in stage_offsets(m)}.
// All such sums are distinct; the descendants of a level partition it.
struct DescendantSet {
  LevelSet source;
  std::uint32_t depth = 0;                          // N >= source.column
  std::vector<std::vector<BigInt>> stage_offsets;   // O_c .. O_{N-1}

  BigInt count() const;       // |source| * prod of cut counts
  BigInt max_height() const;  // max source height + sum of max offsets
};

DescendantSet descendants(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n);

// Sorted, strictly increasing. Throws BudgetError if count() exceeds the
// budget.
std::vector<BigInt> materialize(const DescendantSet& d, const Limits& limits = {});

// Same set when every involved value fits; empty optional when the 64-bit
// precondition (max_height + headroom < 2^63) fails.
std::optional<std::vector<std::uint64_t>> materialize_u64(const DescendantSet& d,
                                                          const BigInt& headroom,
                                                          const Limits& limits = {});

// The same level set expressed in column n.
LevelSet push_to_column(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n,
                        const Limits& limits = {});

/// #{(x, y) in D x D : y - x == gap}, computed by convolving the per-stage
// difference multisets instead of materializing D. Exact for any gap; the
// budget bounds the support of the intermediate multisets.
BigInt pair_count_at_gap(const DescendantSet& d, const BigInt& gap, const Limits& limits = {});

}  // namespace rankone
