#include "rankone/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "rankone/errors.hpp"
#include "rankone/kernels.hpp"

namespace rankone {

namespace {

// Runs fn(0..count-1) across up to `threads` workers; each index owns its
// output slot, so the merged result is identical for any schedule. fn must
// not throw; callers convert per-item failures into recorded state.
void for_each_index(std::size_t count, std::uint32_t threads,
                    const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void validate_profile_inputs(const Vector& v, const std::vector<BigInt>& ns) {
  if (v.components.empty()) throw ArgumentError("vector is empty");
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    if (!(ns[i] < ns[i + 1])) throw ArgumentError("profile points must be strictly increasing");
  }
  if (!ns.empty() && ns.front() < 0) throw ArgumentError("profile points must be nonnegative");
}

std::vector<BigInt> shifts_for(const Vector& v, const BigInt& n) {
  std::vector<BigInt> shifts;
  shifts.reserve(v.dimension());
  for (const BigInt& c : v.components) shifts.push_back(c * n);
  return shifts;
}

SeriesEntry entry_for(const ConstructionSpec& spec, const LevelSet& a,
                      const std::vector<BigInt>& shifts, const BigInt& n, const Limits& limits) {
  SeriesEntry entry;
  entry.n = n;
  try {
    ResolvedMeasure r = measure_at_resolved(spec, a, shifts, limits);
    entry.bound = r.bound;
    entry.depth = r.depth;
    entry.fully_resolved = r.fully_resolved;
  } catch (const BudgetError&) {
    entry.bound = {Rational(0), level_set_measure(spec, a)};
    entry.within_budget = false;
  }
  return entry;
}

}  // namespace

Vector make_vector(std::vector<BigInt> components) {
  if (components.empty()) throw ArgumentError("vector is empty");
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i] < 1) throw ArgumentError("vector components must be positive");
    if (i > 0 && !(components[i - 1] < components[i])) {
      throw ArgumentError("vector components must be strictly increasing");
    }
  }
  return Vector{std::move(components)};
}

NormalizedVector normalize_vector(const std::vector<BigInt>& raw) {
  if (raw.empty()) throw ArgumentError("vector is empty");
  for (const BigInt& c : raw) {
    if (c == 0) throw ArgumentError("vector components must be nonzero");
  }
  std::vector<BigInt> sorted = raw;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("vector components must be distinct");
  }
  if (sorted.front() > 0) {
    return {make_vector(std::move(sorted)), "components already positive; sorted increasing"};
  }
  const BigInt anchor = sorted.front();
  std::vector<BigInt> reduced;
  reduced.reserve(sorted.size());
  for (std::size_t i = 1; i < sorted.size(); ++i) reduced.push_back(sorted[i] - anchor);
  reduced.push_back(-anchor);
  std::sort(reduced.begin(), reduced.end());
  std::string description = "re-anchored at v1 = " + anchor.str() +
                            ": differences v_i - v1 together with -v1, sorted increasing";
  return {make_vector(std::move(reduced)), std::move(description)};
}

MeasureSeries joint_profile(const ConstructionSpec& spec, const LevelSet& a, const Vector& v,
                            const std::vector<BigInt>& ns, const Limits& limits,
                            std::uint32_t threads) {
  validate_profile_inputs(v, ns);
  validate_level_set(spec, a);
  MeasureSeries series;
  series.mode = MeasureSeries::Mode::joint;
  series.entries.resize(ns.size());
  for_each_index(ns.size(), threads, [&](std::size_t i) {
    series.entries[i] = entry_for(spec, a, shifts_for(v, ns[i]), ns[i], limits);
  });
  return series;
}

MeasureSeries multiplicative_profile(const ConstructionSpec& spec, const LevelSet& a,
                                     const Vector& v, const std::vector<BigInt>& ns,
                                     const Limits& limits, std::uint32_t threads) {
  validate_profile_inputs(v, ns);
  validate_level_set(spec, a);
  MeasureSeries series;
  series.mode = MeasureSeries::Mode::multiplicative;
  series.entries.resize(ns.size());
  for_each_index(ns.size(), threads, [&](std::size_t i) {
    SeriesEntry entry;
    entry.n = ns[i];
    entry.bound = MeasureBound::point(Rational(1));
    entry.fully_resolved = true;
    for (const BigInt& c : v.components) {
      SeriesEntry factor = entry_for(spec, a, {c * ns[i]}, ns[i], limits);
      entry.bound.lower *= factor.bound.lower;
      entry.bound.upper *= factor.bound.upper;
      entry.depth = std::max(entry.depth, factor.depth);
      entry.fully_resolved = entry.fully_resolved && factor.fully_resolved;
      entry.within_budget = entry.within_budget && factor.within_budget;
    }
    series.entries[i] = entry;
  });
  return series;
}

std::string to_string(TypeVerdict::Kind kind) {
  switch (kind) {
    case TypeVerdict::Kind::positive_witnessed: return "positive-witnessed";
    case TypeVerdict::Kind::zero_on_window: return "zero-on-window";
    case TypeVerdict::Kind::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Smallest m in [lo, hi] with hit(m), scanning ascending. Chunks are
// assigned in order; a chunk aborts only when a lower chunk already found a
// hit, so the reported m is schedule-independent.
std::optional<BigInt> first_hit(const BigInt& lo, const BigInt& hi, std::uint32_t threads,
                                const std::function<bool(const BigInt&)>& hit) {
  if (hi < lo) return std::nullopt;
  if (threads <= 1) {
    for (BigInt m = lo; m <= hi; ++m) {
      if (hit(m)) return m;
    }
    return std::nullopt;
  }
  const BigInt span = hi - lo + 1;
  const std::size_t chunks =
      span < threads ? static_cast<std::size_t>(span.convert_to<std::uint64_t>())
                     : static_cast<std::size_t>(threads);
  const BigInt step = span / chunks;
  std::vector<std::optional<BigInt>> found(chunks);
  std::atomic<std::size_t> winner{chunks};
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      const BigInt from = lo + step * c;
      const BigInt to = (c + 1 == chunks) ? hi : from + step - 1;
      for (BigInt m = from; m <= to; ++m) {
        if (winner.load() < c) return;
        if (hit(m)) {
          found[c] = m;
          std::size_t expect = winner.load();
          while (c < expect && !winner.compare_exchange_weak(expect, c)) {
          }
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& f : found) {
    if (f) return f;
  }
  return std::nullopt;
}

}  // namespace

TypeVerdict verify_zero_window(const ConstructionSpec& spec, const LevelSet& a, const Vector& v,
                               std::uint32_t n, const Limits& limits, std::uint32_t threads) {
  if (n < 1) throw ArgumentError("window index must be at least 1");
  if (v.components.empty()) throw ArgumentError("vector is empty");
  validate_level_set(spec, a);

  TypeVerdict verdict;
  verdict.window_lo = spec.height(n - 1) + 1;
  verdict.window_hi = spec.height(n);

  const BigInt k_top = v.components.back() * verdict.window_hi;
  const DepthResult depth = resolve_depth(spec, a, {k_top}, limits);
  if (!depth.fully_resolved) {
    verdict.kind = TypeVerdict::Kind::inconclusive;
    verdict.note = "window shifts do not resolve within the depth cap";
    return verdict;
  }
  DescendantSet ds = descendants(spec, a, depth.depth);
  const Rational w = spec.width(depth.depth);

  std::vector<std::uint64_t> d64;
  std::vector<BigInt> dbig;
  try {
    if (auto fast = materialize_u64(ds, k_top, limits)) {
      d64 = std::move(*fast);
    } else {
      dbig = materialize(ds, limits);
    }
  } catch (const BudgetError&) {
    verdict.kind = TypeVerdict::Kind::inconclusive;
    verdict.note = "descendant set exceeds the cardinality budget";
    return verdict;
  }

  // Fully resolved for the top of the window, hence for every m in it: no
  // copy needs clipping, and one membership scan per m decides positivity.
  std::function<bool(const BigInt&)> positive_at;
  std::vector<std::uint64_t> v64;
  if (!d64.empty()) {
    for (const BigInt& c : v.components) v64.push_back(c.convert_to<std::uint64_t>());
    positive_at = [&](const BigInt& m) {
      const auto m64 = m.convert_to<std::uint64_t>();
      std::vector<std::uint64_t> shifts(v64.size());
      for (std::size_t i = 0; i < v64.size(); ++i) shifts[i] = v64[i] * m64;
      return kernels::joint_exists(d64, shifts, d64.back());
    };
  } else {
    positive_at = [&](const BigInt& m) {
      return kernels::joint_exists_generic<BigInt>(dbig, shifts_for(v, m), dbig.back());
    };
  }

  const auto counterexample = first_hit(verdict.window_lo, verdict.window_hi, threads, positive_at);
  if (!counterexample) {
    verdict.kind = TypeVerdict::Kind::zero_on_window;
    verdict.bound = 0;
    verdict.note = "joint intersection is exactly 0 for every m in the window";
    return verdict;
  }

  BigInt count;
  if (!d64.empty()) {
    const auto m64 = counterexample->convert_to<std::uint64_t>();
    std::vector<std::uint64_t> shifts(v64.size());
    for (std::size_t i = 0; i < v64.size(); ++i) shifts[i] = v64[i] * m64;
    count = BigInt(kernels::joint_count(d64, shifts, d64.back()));
  } else {
    count = BigInt(
        kernels::joint_count_generic<BigInt>(dbig, shifts_for(v, *counterexample), dbig.back()));
  }
  verdict.kind = TypeVerdict::Kind::positive_witnessed;
  verdict.bound = Rational(count) * w;
  verdict.witnesses = {*counterexample};
  verdict.note = "first m in the window with a positive joint intersection";
  return verdict;
}

WitnessPair witness_pair_search(const ConstructionSpec& spec, const LevelSet& a,
                                const std::vector<WitnessPoint>& series, const Rational& a_measure,
                                std::uint32_t M, std::size_t N, const Limits& limits) {
  validate_level_set(spec, a);
  if (a_measure != level_set_measure(spec, a)) {
    throw ArgumentError("stated measure differs from the level set's measure");
  }
  const std::size_t last = N + 2 * static_cast<std::size_t>(M);
  if (series.empty() || last >= series.size()) {
    throw ArgumentError("series does not cover the window");
  }
  for (std::size_t k = N; k < last; ++k) {
    if (!(series[k].shift < series[k + 1].shift)) {
      throw ArgumentError("series shifts must be strictly increasing");
    }
  }

  if (M == 0) {
    ResolvedMeasure r = measure_at_resolved(spec, a, {series[N].shift}, limits);
    if (!r.fully_resolved) throw BudgetError("the degenerate window did not resolve");
    return {N, N, series[N].shift, series[N].shift, r.bound.lower, Rational(0)};
  }

  for (std::size_t k = N; k <= last; ++k) {
    if (series[k].pairwise * M < a_measure) {
      throw ArgumentError("pairwise measure at index " + std::to_string(k) +
                          " is below mu(A)/M");
    }
  }
  const BigInt binom = BigInt(2 * M + 1) * M;  // C(2M+1, 2)
  const Rational floor_value = a_measure / Rational(binom);

  bool unresolved = false;
  std::optional<WitnessPair> best;
  for (std::size_t m = N; m <= last; ++m) {
    for (std::size_t n = m + 1; n <= last; ++n) {
      try {
        ResolvedMeasure r =
            measure_at_resolved(spec, a, {series[m].shift, series[n].shift}, limits);
        if (!r.fully_resolved) {
          unresolved = true;
          continue;
        }
        if (!best || best->value < r.bound.lower) {
          best = WitnessPair{m, n, series[m].shift, series[n].shift, r.bound.lower, floor_value};
        }
      } catch (const BudgetError&) {
        unresolved = true;
      }
    }
  }
  if (best && !(best->value < floor_value)) return *best;
  if (unresolved) {
    throw BudgetError("triple intersections in the window did not all resolve");
  }
  throw AnomalyError("no pair in a window satisfying the pairwise floor reaches mu(A)/C(2M+1,2)");
}

SubsequenceRule height_subsequence(bool recurs_every_stage) {
  SubsequenceRule rule;
  rule.description = "n = height(m)";
  rule.n_of_m = [](const ConstructionSpec& spec, std::uint32_t m) { return spec.height(m); };
  rule.recurs_every_stage = recurs_every_stage;
  return rule;
}

TypeVerdict certify_v_alpha_lower(const ConstructionSpec& spec, const Vector& v,
                                  const SubsequenceRule& rule, std::uint32_t M,
                                  const Limits& limits) {
  if (v.components.empty()) throw ArgumentError("vector is empty");
  if (!rule.n_of_m) throw ArgumentError("subsequence rule is empty");

  std::vector<BigInt> ns(M + 1);
  for (std::uint32_t m = 0; m <= M; ++m) {
    ns[m] = rule.n_of_m(spec, m);
    if (ns[m] < 1 || (m > 0 && !(ns[m - 1] < ns[m]))) {
      throw ArgumentError("subsequence rule must be strictly increasing");
    }
  }

  TypeVerdict verdict;
  std::vector<std::pair<BigInt, Rational>> ratios;  // (n, ratio)
  for (std::uint32_t j = 0; j <= M; ++j) {
    const Rational w_col = spec.width(j);
    const LevelSet top = LevelSet::single(j, spec.height(j) - 1);
    std::optional<std::uint32_t> cached_depth;
    std::vector<BigInt> d0;
    for (std::uint32_t m = j; m <= M; ++m) {
      const auto shifts = shifts_for(v, ns[m]);
      DepthResult depth = resolve_depth(spec, top, shifts, limits);
      if (!depth.fully_resolved) {
        verdict.kind = TypeVerdict::Kind::inconclusive;
        verdict.note = "column " + std::to_string(j) + " does not resolve within the depth cap";
        return verdict;
      }
      try {
        if (!cached_depth || *cached_depth != depth.depth) {
          d0 = materialize(descendants(spec, LevelSet::single(j, BigInt(0)), depth.depth), limits);
          cached_depth = depth.depth;
        }
      } catch (const BudgetError&) {
        verdict.kind = TypeVerdict::Kind::inconclusive;
        verdict.note = "column " + std::to_string(j) + " exceeds the cardinality budget";
        return verdict;
      }
      // Levels of column j share these offsets, so the count for level 0
      // with an inactive limit covers every level exactly.
      const BigInt count = BigInt(kernels::joint_count_generic<BigInt>(d0, shifts, d0.back()));
      const Rational ratio = Rational(count) * spec.width(depth.depth) / w_col;
      if (ratio == 0) {
        verdict.kind = TypeVerdict::Kind::inconclusive;
        verdict.bound = 0;
        verdict.witnesses = {ns[m]};
        verdict.note = "exact zero at column " + std::to_string(j) +
                       "; no positive bound along this rule";
        return verdict;
      }
      ratios.emplace_back(ns[m], ratio);
    }
  }

  Rational alpha = ratios.front().second;
  for (const auto& [n, r] : ratios) alpha = std::min(alpha, r);
  verdict.kind = TypeVerdict::Kind::positive_witnessed;
  verdict.bound = alpha;
  for (const auto& [n, r] : ratios) {
    if (r == alpha) verdict.witnesses.push_back(n);
  }
  std::sort(verdict.witnesses.begin(), verdict.witnesses.end());
  verdict.witnesses.erase(std::unique(verdict.witnesses.begin(), verdict.witnesses.end()),
                          verdict.witnesses.end());
  verdict.note = rule.description + (rule.recurs_every_stage
                                         ? "; the builder guarantees the pattern at every stage"
                                         : "; finite evidence only");
  return verdict;
}

}  // namespace rankone
