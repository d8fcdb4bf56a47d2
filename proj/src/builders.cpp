#include "rankone/builders.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <utility>

#include "rankone/errors.hpp"

namespace rankone::builders {
namespace {

std::string vector_label(const Vector& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.components.size(); ++i) {
    if (i) out << ",";
    out << v.components[i];
  }
  out << ")";
  return out.str();
}

std::string multiplier_label(const std::vector<BigInt>& mult) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < mult.size(); ++i) {
    if (i) out << ", ";
    out << mult[i] << "h";
  }
  out << "}";
  return out.str();
}

// Spacers realizing base offsets {mult[0]*h, ..., mult[d]*h} (mult[0] = 0,
// strictly increasing, consecutive gaps >= 1), with `tail` above the last
// subcolumn.
Stage stage_for_multipliers(const std::vector<BigInt>& mult, const BigInt& h,
                            const BigInt& tail) {
  Stage st;
  st.cuts = static_cast<std::uint32_t>(mult.size());
  for (std::size_t j = 1; j < mult.size(); ++j)
    st.spacers.push_back((mult[j] - mult[j - 1] - 1) * h);
  st.spacers.push_back(tail);
  return st;
}

std::vector<BigInt> offsets_of(const Vector& v) {
  std::vector<BigInt> mult{BigInt(0)};
  for (const BigInt& c : v.components) mult.push_back(c);
  return mult;
}

BigInt component_sum(const Vector& v) {
  BigInt s = 0;
  for (const BigInt& c : v.components) s += c;
  return s;
}

// Shared tail schedule for the fixed-pattern builders: h_{n+1} is the least
// height at least `growth(ctx, H_n)`, at least the uniqueness floor
// (2*top+1) * sum_{k<=n} h_k, at least the stacked height, and strictly
// increasing as a multiple of H_n.
struct TailState {
  BigInt height_sum = 0;
  Rational prev_ratio = 0;
};

BigInt scheduled_height(const StageContext& ctx, const std::shared_ptr<TailState>& state,
                        const BigInt& weight, const BigInt& top, const GrowthRule& growth) {
  const BigInt& h = ctx.heights[ctx.n];
  state->height_sum += h;
  const BigInt big_h = weight * state->height_sum;
  BigInt need = growth ? growth(ctx, big_h) : BigInt((ctx.n + 1) * big_h);
  const BigInt floor_u = (2 * top + 1) * state->height_sum;
  if (need < floor_u) need = floor_u;
  const BigInt stacked = (top + 1) * h;
  if (need < stacked) need = stacked;
  Rational ratio(need, big_h);
  if (ratio <= state->prev_ratio) {
    const Rational scaled = state->prev_ratio * Rational(big_h);
    need = BigInt(numerator(scaled) / denominator(scaled)) + 1;
    ratio = Rational(need, big_h);
  }
  state->prev_ratio = ratio;
  return need;
}

ConstructionSpec fixed_pattern_spec(std::vector<BigInt> mult, BigInt weight, GrowthRule growth,
                                    std::string name) {
  auto state = std::make_shared<TailState>();
  const BigInt top = mult.back();
  return ConstructionSpec(
      Rational(1),
      [state, mult = std::move(mult), weight = std::move(weight), top,
       growth = std::move(growth)](const StageContext& ctx) {
        const BigInt& h = ctx.heights[ctx.n];
        const BigInt need = scheduled_height(ctx, state, weight, top, growth);
        return stage_for_multipliers(mult, h, need - (top + 1) * h);
      },
      std::move(name));
}

// Ceiling of p/q for positive q.
BigInt ceil_div(const BigInt& p, const BigInt& q) { return (p + q - 1) / q; }

// m >= 2 and m = p^e for a single prime p: returns p. Otherwise nullopt.
std::optional<std::uint32_t> prime_power_base(std::uint32_t m) {
  if (m < 2) return std::nullopt;
  for (std::uint32_t f = 2; f * f <= m; ++f) {
    if (m % f != 0) continue;
    while (m % f == 0) m /= f;
    if (m != 1) return std::nullopt;
    return f;
  }
  return m;
}

// 2 -> 0, 3 -> 1, 5 -> 2, ... (p must be prime).
std::uint32_t prime_index(std::uint32_t p) {
  std::uint32_t idx = 0;
  for (std::uint32_t q = 2; q < p; ++q) {
    bool is_prime = true;
    for (std::uint32_t f = 2; f * f <= q; ++f)
      if (q % f == 0) {
        is_prime = false;
        break;
      }
    if (is_prime) ++idx;
  }
  return idx;
}

std::uint32_t nth_prime(std::uint32_t idx) {
  std::uint32_t found = 0;
  for (std::uint32_t q = 2;; ++q) {
    bool is_prime = true;
    for (std::uint32_t f = 2; f * f <= q; ++f)
      if (q % f == 0) {
        is_prime = false;
        break;
      }
    if (!is_prime) continue;
    if (found == idx) return q;
    ++found;
  }
}

}  // namespace

ScheduleRule every_stage() {
  return {"every stage", [](std::uint32_t) { return true; }};
}

ScheduleRule period_phase(std::uint32_t period, std::uint32_t phase) {
  if (period == 0) throw ArgumentError("schedule period must be positive");
  std::ostringstream out;
  out << "stages with n % " << period << " == " << phase % period;
  return {out.str(), [period, phase](std::uint32_t n) { return n % period == phase % period; }};
}

SequenceRule squares() {
  return {"k^2", [](std::uint32_t k) { return BigInt(k) * k; }};
}

SequenceRule powers_of_two() {
  return {"2^k", [](std::uint32_t k) { return BigInt(1) << k; }};
}

SequenceRule linear(BigInt scale, BigInt offset) {
  std::ostringstream out;
  out << scale << "k + " << offset;
  return {out.str(), [scale = std::move(scale), offset = std::move(offset)](std::uint32_t k) {
            return scale * k + offset;
          }};
}

GrowthRule default_growth() {
  return [](const StageContext& ctx, const BigInt& big_h) { return BigInt((ctx.n + 1) * big_h); };
}

ConstructionSpec build_example41(const Vector& v, ScheduleRule pattern_stages) {
  if (!pattern_stages.applies) throw ArgumentError("schedule rule has no predicate");
  const auto mult = offsets_of(v);
  std::string name = "example41[v=" + vector_label(v) + "; " + pattern_stages.description + "]";
  auto spec = ConstructionSpec(
      Rational(1),
      [mult, applies = pattern_stages.applies](const StageContext& ctx) {
        const BigInt& h = ctx.heights[ctx.n];
        if (applies(ctx.n)) return stage_for_multipliers(mult, h, 4 * h);
        Stage st;
        st.cuts = 2;
        st.spacers = {BigInt(0), 4 * h};
        return st;
      },
      std::move(name));
  spec.set_metadata("pattern_offsets", multiplier_label(mult));
  spec.set_metadata("pattern_stages", pattern_stages.description);
  spec.set_metadata("tail", "4h at pattern stages and filler stages alike");
  return spec;
}

ConstructionSpec build_example42() {
  return ConstructionSpec(
      Rational(1),
      [](const StageContext& ctx) {
        const BigInt& h = ctx.heights[ctx.n];
        Stage st;
        st.cuts = 4;
        st.spacers = {BigInt(0), 3 * h, h, 8 * h};
        return st;
      },
      "example42");
}

ConstructionSpec build_example43(const Vector& v) {
  const std::size_t d = v.dimension();
  const BigInt& v1 = v.components.front();
  const BigInt& vd = v.components.back();
  if (vd < BigInt(d) * v1) {
    std::ostringstream out;
    out << "build_example43 requires v_d >= d * v_1; got v_d = " << vd << ", v_1 = " << v1
        << ", d = " << d;
    throw ArgumentError(out.str());
  }
  // Smallest integer M with M >= (v_d / v_1)(v_d + 1) v_d and
  // M >= d (v_d + 1) v_1 / (v_d - (d - 1) v_1).
  const BigInt m_bound1 = ceil_div(vd * (vd + 1) * vd, v1);
  const BigInt m_bound2 = ceil_div(BigInt(d) * (vd + 1) * v1, vd - BigInt(d - 1) * v1);
  const BigInt m = std::max(m_bound1, m_bound2);
  // Tail multiplier balancing the final spacer block against everything
  // below it: k h_n = 2d h_n + sum_i (v_i - 1) h_n + (d - 1) M h_n.
  const BigInt tail = BigInt(d) + component_sum(v) + BigInt(d - 1) * m;

  std::string name = "example43[v=" + vector_label(v) + "]";
  auto spec = ConstructionSpec(
      Rational(1),
      [components = v.components, m, tail, d](const StageContext& ctx) {
        const BigInt& h = ctx.heights[ctx.n];
        Stage st;
        st.cuts = static_cast<std::uint32_t>(2 * d);
        for (std::size_t i = 0; i < d; ++i) {
          st.spacers.push_back((components[i] - 1) * h);
          st.spacers.push_back((i + 1 < d ? m : tail) * h);
        }
        return st;
      },
      std::move(name));
  std::ostringstream meta;
  meta << m;
  spec.set_metadata("buffer_multiplier", meta.str());
  std::ostringstream tmeta;
  tmeta << tail;
  spec.set_metadata("tail_multiplier", tmeta.str());
  return spec;
}

ConstructionSpec build_hk_skyscraper() {
  return build_hk_skyscraper(
      [](const StageContext& ctx) { return BigInt(2 * ctx.heights[ctx.n]); }, "hk-skyscraper");
}

ConstructionSpec build_hk_skyscraper(std::function<BigInt(const StageContext&)> c_rule,
                                     std::string label) {
  if (!c_rule) throw ArgumentError("spacer rule has no evaluator");
  return ConstructionSpec(
      Rational(1),
      [c_rule = std::move(c_rule)](const StageContext& ctx) {
        BigInt c = c_rule(ctx);
        if (c < 0) throw ArgumentError("spacer rule produced a negative count");
        Stage st;
        st.cuts = 2;
        st.spacers = {BigInt(0), std::move(c)};
        return st;
      },
      std::move(label));
}

bool signed_digit_member(const std::vector<BigInt>& heights, const BigInt& z) {
  std::vector<BigInt> prefix(heights.size() + 1, BigInt(0));
  for (std::size_t i = 0; i < heights.size(); ++i) prefix[i + 1] = prefix[i] + heights[i];
  BigInt r = z;
  for (std::size_t i = heights.size(); i-- > 0;) {
    const BigInt mag = r < 0 ? BigInt(-r) : r;
    if (mag <= prefix[i]) continue;  // a nonzero digit here would overshoot
    if (r > 0)
      r -= heights[i];
    else
      r += heights[i];
    const BigInt after = r < 0 ? BigInt(-r) : r;
    if (after > prefix[i]) return false;
  }
  return r == 0;
}

ConstructionSpec build_prop64_adaptive(const SequenceRule& a, const SequenceRule& b,
                                       std::uint32_t horizon) {
  if (!a.value || !b.value) throw ArgumentError("sequence rule has no evaluator");
  if (horizon == 0) throw ArgumentError("horizon must be at least 1");

  std::vector<BigInt> av, bv;
  auto extend_sequences = [&](const BigInt& bound) {
    while (av.empty() || av.back() <= bound || bv.back() <= bound) {
      const std::uint32_t k = static_cast<std::uint32_t>(av.size()) + 1;
      if (k > (1u << 20))
        throw ArgumentError("sequence stays below the height sum for too many indices");
      BigInt na = a.value(k);
      BigInt nb = b.value(k);
      if (na <= 0 || nb <= 0) throw ArgumentError("sequence values must be positive");
      if (!av.empty() && (na <= av.back() || nb <= bv.back()))
        throw ArgumentError("sequence values must be strictly increasing");
      av.push_back(std::move(na));
      bv.push_back(std::move(nb));
    }
  };

  std::vector<BigInt> heights{BigInt(1)};
  std::vector<BigInt> tails;
  BigInt height_sum = 1;
  for (std::uint32_t n = 0; n < horizon; ++n) {
    extend_sequences(height_sum);
    // Values that must stay unrepresentable once h_{n+1} joins the ladder:
    // pending partners of an already representable value, and pending sums
    // whose two parts are both representable.
    std::vector<BigInt> forbidden;
    for (std::size_t i = 0; i < av.size(); ++i) {
      const bool has_a = signed_digit_member(heights, av[i]);
      const bool has_b = signed_digit_member(heights, bv[i]);
      if (has_a && !has_b)
        forbidden.push_back(bv[i]);
      else if (!has_a && has_b)
        forbidden.push_back(av[i]);
      else if (has_a && has_b && !signed_digit_member(heights, av[i] + bv[i]))
        forbidden.push_back(av[i] + bv[i]);
    }
    const BigInt& h = heights.back();
    BigInt c = 3 * h;
    for (;;) {
      std::vector<BigInt> extended = heights;
      extended.push_back(2 * h + c);
      bool clean = true;
      for (const BigInt& f : forbidden)
        if (signed_digit_member(extended, f)) {
          clean = false;
          break;
        }
      if (clean) break;
      ++c;
    }
    tails.push_back(c);
    heights.push_back(2 * h + c);
    height_sum += heights.back();
  }

  std::ostringstream name;
  name << "prop64[a=" << a.description << "; b=" << b.description << "; horizon=" << horizon
       << "]";
  auto spec = ConstructionSpec(
      Rational(1),
      [tails](const StageContext& ctx) {
        Stage st;
        st.cuts = 2;
        if (ctx.n < tails.size())
          st.spacers = {BigInt(0), tails[ctx.n]};
        else
          st.spacers = {BigInt(0), BigInt(3 * ctx.heights[ctx.n])};
        return st;
      },
      name.str());
  std::ostringstream chosen;
  for (std::size_t i = 0; i < tails.size(); ++i) {
    if (i) chosen << ", ";
    chosen << tails[i];
  }
  spec.set_metadata("tails", chosen.str());
  return spec;
}

ConstructionSpec build_fact62(std::uint32_t k, bool with_filler) {
  if (k < 2) throw ArgumentError("cut count must be at least 2");
  std::ostringstream name;
  name << "fact62[k=" << k << (with_filler ? "" : "; no filler") << "]";
  return ConstructionSpec(
      Rational(1),
      [k, with_filler](const StageContext& ctx) {
        Stage st;
        if (!with_filler || ctx.n % 2 == 0) {
          st.cuts = k;
          st.spacers.assign(k, BigInt(0));
        } else {
          st.cuts = 2;
          st.spacers = {BigInt(0), BigInt(4 * ctx.heights[ctx.n])};
        }
        return st;
      },
      name.str());
}

ConstructionSpec build_thm72(const Vector& v, GrowthRule growth) {
  auto spec = fixed_pattern_spec(offsets_of(v), component_sum(v), std::move(growth),
                                 "thm72[v=" + vector_label(v) + "]");
  spec.set_metadata("pattern_offsets", multiplier_label(offsets_of(v)));
  spec.set_metadata("tail", "least height >= (m+1) H_m, >= (2 v_d + 1) sum h_k, strictly "
                            "increasing as a multiple of H_m");
  return spec;
}

ConstructionSpec build_thm73(const Vector& v, GrowthRule growth,
                             std::optional<std::vector<BigInt>> offset_multipliers) {
  const std::size_t d = v.dimension();
  const bool overridden = offset_multipliers.has_value();
  std::vector<BigInt> mult;
  if (overridden) {
    mult = *offset_multipliers;
    if (mult.size() < 2 || mult.front() != 0)
      throw ArgumentError("offset multipliers must start at 0 and list at least two entries");
    for (std::size_t j = 1; j < mult.size(); ++j)
      if (mult[j] <= mult[j - 1])
        throw ArgumentError("offset multipliers must be strictly increasing");
  } else {
    // {0, v_d - v_{d-1}, ..., v_d - v_1, v_d} with v_0 := 0.
    mult.push_back(BigInt(0));
    for (std::size_t j = 1; j <= d; ++j) mult.push_back(v.components[d - 1] - (j < d ? v.components[d - 1 - j] : BigInt(0)));
  }

  auto build = [&](std::vector<BigInt> m, const std::string& tag) {
    return fixed_pattern_spec(std::move(m), component_sum(v), growth,
                              "thm73[v=" + vector_label(v) + "; " + tag + "]");
  };

  // A pattern witnesses the vector when the joint profile along n = h_m stays
  // exactly positive over the probe window.
  auto witnesses = [&](const ConstructionSpec& s) {
    std::vector<BigInt> ns;
    for (std::uint32_t m = 1; m <= 3; ++m) ns.push_back(s.height(m));
    auto series = joint_profile(s, LevelSet::base(), v, ns);
    for (const auto& e : series.entries)
      if (!e.bound.exact() || e.bound.lower == 0) return false;
    return true;
  };

  auto spec = build(mult, overridden ? "override" : "descending-gap pattern");
  const bool positive = witnesses(spec);
  spec.set_metadata("pattern_offsets", multiplier_label(mult));
  if (positive) {
    spec.set_metadata("verdict", "joint profile along n = h_m positive for m = 1..3");
    return spec;
  }
  if (overridden) {
    spec.set_metadata("verdict",
                      "joint profile along n = h_m hit an exact zero; override kept as given");
    return spec;
  }
  auto fallback = build(offsets_of(v), "increasing-gap pattern");
  fallback.set_metadata("pattern_offsets", multiplier_label(offsets_of(v)));
  fallback.set_metadata("substitution",
                        "descending-gap offsets " + multiplier_label(mult) +
                            " gave an exact zero along n = h_m; substituted the "
                            "increasing-gap offsets");
  fallback.set_metadata("verdict", witnesses(fallback)
                                       ? "joint profile along n = h_m positive for m = 1..3"
                                       : "joint profile along n = h_m not positive");
  return fallback;
}

ConstructionSpec build_cor74(const std::vector<Vector>& family) {
  if (family.empty()) throw ArgumentError("family is empty");
  BigInt top_max = 0;
  for (const auto& v : family) top_max = std::max(top_max, v.components.back());

  struct CorState {
    BigInt height_sum = 0;
    BigInt weight_sum = 0;  // sum over scheduled stages of sum_i v_i
  };
  auto state = std::make_shared<CorState>();

  std::ostringstream name;
  name << "cor74[";
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (i) name << "; ";
    name << vector_label(family[i]);
  }
  name << "]";

  auto spec = ConstructionSpec(
      Rational(1),
      [family, state, top_max](const StageContext& ctx) {
        const BigInt& h = ctx.heights[ctx.n];
        state->height_sum += h;
        const auto base = prime_power_base(ctx.n);
        const Vector* chosen =
            base ? &family[prime_index(*base) % family.size()] : nullptr;
        if (chosen) state->weight_sum += component_sum(*chosen);
        BigInt need = state->weight_sum * state->height_sum;
        const BigInt floor_u = (2 * top_max + 1) * state->height_sum;
        if (need < floor_u) need = floor_u;
        if (chosen) {
          const BigInt& top = chosen->components.back();
          const BigInt stacked = (top + 1) * h;
          if (need < stacked) need = stacked;
          return stage_for_multipliers(offsets_of(*chosen), h, need - stacked);
        }
        BigInt tail = 4 * h;
        if (need > 2 * h + tail) tail = need - 2 * h;
        Stage st;
        st.cuts = 2;
        st.spacers = {BigInt(0), std::move(tail)};
        return st;
      },
      name.str());

  std::ostringstream sched;
  sched << "stage m >= 2 equal to a prime power p^e uses the vector assigned to p; primes in "
           "increasing order, cycling: ";
  const std::size_t shown = std::max<std::size_t>(2 * family.size(), 4);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) sched << ", ";
    sched << nth_prime(static_cast<std::uint32_t>(i)) << " -> "
          << vector_label(family[i % family.size()]);
  }
  sched << ", ...";
  spec.set_metadata("schedule", sched.str());
  return spec;
}

MeasureBound cyclic_extension_measure(const ConstructionSpec& base, const LevelSet& a,
                                      const BigInt& n, std::uint32_t k, const Limits& limits) {
  if (k < 1) throw ArgumentError("extension order must be at least 1");
  if (n < 0) throw ArgumentError("negative shift; reduce the vector first");
  if (n % k != 0) {
    validate_level_set(base, a);
    return MeasureBound::point(Rational(0));
  }
  return measure_at_resolved(base, a, {BigInt(n / k)}, limits).bound;
}

}  // namespace rankone::builders
