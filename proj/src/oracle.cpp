#include "rankone/oracle.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone::oracle {

namespace {

BigInt floor_nonneg(const Rational& q) {
  // Exact floor for q >= 0: cpp_int division truncates toward zero.
  return numerator(q) / denominator(q);
}

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

IntervalSet IntervalSet::from_pieces(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& p) { return !(p.lo < p.hi); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (Interval& p : pieces) {
    if (!out.pieces_.empty() && !(out.pieces_.back().hi < p.lo)) {
      Interval& last = out.pieces_.back();
      if (last.hi < p.hi) last.hi = std::move(p.hi);
    } else {
      out.pieces_.push_back(std::move(p));
    }
  }
  return out;
}

Rational IntervalSet::length() const {
  Rational total = 0;
  for (const Interval& p : pieces_) total += p.hi - p.lo;
  return total;
}

IntervalSet IntervalSet::translated(const Rational& delta) const {
  IntervalSet out;
  out.pieces_.reserve(pieces_.size());
  for (const Interval& p : pieces_) out.pieces_.push_back({p.lo + delta, p.hi + delta});
  return out;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const Interval& a = pieces_[i];
    const Interval& b = other.pieces_[j];
    const Rational lo = std::max(a.lo, b.lo);
    const Rational hi = std::min(a.hi, b.hi);
    if (lo < hi) out.pieces_.push_back({lo, hi});
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

IntervalSet IntervalSet::clamp(const Rational& lo, const Rational& hi) const {
  IntervalSet window;
  if (lo < hi) window.pieces_.push_back({lo, hi});
  return intersect(window);
}

TowerMap realize(const ConstructionSpec& spec, std::uint32_t n) {
  TowerMap map;
  map.step = spec.width(n);
  map.domain = Rational(BigInt(spec.height(n) - 1)) * map.step;
  map.total = Rational(spec.height(n)) * map.step;
  return map;
}

IntervalSet embed_level_set(const ConstructionSpec& spec, const LevelSet& a, std::uint32_t n,
                            const Limits& limits) {
  validate_level_set(spec, a);
  if (n < a.column) throw ArgumentError("embedding stage precedes the level set's column");

  std::vector<Interval> pieces;
  const Rational w0 = spec.width(a.column);
  pieces.reserve(a.heights.size());
  for (const BigInt& lvl : a.heights) {
    pieces.push_back({Rational(lvl) * w0, Rational(lvl) * w0 + w0});
  }
  IntervalSet cur = IntervalSet::from_pieces(std::move(pieces));

  for (std::uint32_t m = a.column; m < n; ++m) {
    const Rational w = spec.width(m);
    const auto& offsets = spec.stage_offsets(m);
    const auto r = static_cast<std::uint32_t>(offsets.size());
    const Rational wn = w / r;  // width after this stage

    std::vector<Interval> next;
    for (const Interval& p : cur.pieces()) {
      // Walk the (level, strip) cells the interval crosses; each cell is
      // translated to its destination level as a whole.
      BigInt level = floor_nonneg(p.lo / w);
      while (Rational(level) * w < p.hi) {
        const Rational level_lo = Rational(level) * w;
        const Rational level_hi = level_lo + w;
        const Rational in_lo = std::max(p.lo, level_lo);
        const Rational in_hi = std::min(p.hi, level_hi);
        BigInt strip = floor_nonneg((in_lo - level_lo) / wn);
        while (level_lo + Rational(strip) * wn < in_hi) {
          const Rational strip_lo = level_lo + Rational(strip) * wn;
          const Rational strip_hi = strip_lo + wn;
          const Rational lo = std::max(in_lo, strip_lo);
          const Rational hi = std::min(in_hi, strip_hi);
          const Rational delta =
              Rational(BigInt(offsets[static_cast<std::size_t>(strip)] + level)) * wn - strip_lo;
          next.push_back({lo + delta, hi + delta});
          strip += 1;
        }
        level += 1;
      }
      if (BigInt(next.size()) > limits.cardinality_budget) {
        throw BudgetError("interval pieces exceed the cardinality budget");
      }
    }
    cur = IntervalSet::from_pieces(std::move(next));
  }
  return cur;
}

MeasureBound oracle_intersection(const ConstructionSpec& spec, const LevelSet& a,
                                 std::vector<BigInt> shifts, std::uint32_t n,
                                 const Limits& limits) {
  shifts = normalize_shifts(std::move(shifts));
  const IntervalSet region = embed_level_set(spec, a, n, limits);
  const Rational w = spec.width(n);
  const BigInt h = spec.height(n);
  const BigInt& k_max = shifts.back();

  // Points at or above (h - k_max) * w cannot see the largest shift.
  const Rational resolved_hi = Rational(BigInt(h - k_max)) * w;
  IntervalSet acc = region.clamp(Rational(0), resolved_hi);
  for (const BigInt& k : shifts) {
    acc = acc.intersect(region.translated(-(Rational(k) * w)));
  }
  const Rational lower = acc.length();
  const Rational unresolved = region.clamp(resolved_hi, Rational(h) * w).length();
  return {lower, lower + unresolved};
}

}  // namespace rankone::oracle
