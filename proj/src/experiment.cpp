#include "rankone/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "rankone/analysis.hpp"
#include "rankone/builders.hpp"
#include "rankone/construction.hpp"
#include "rankone/errors.hpp"
#include "rankone/measure.hpp"
#include "rankone/oracle.hpp"
#include "rankone/vector_order.hpp"

namespace rankone::experiment {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ArgumentError("config " + where + ": " + what);
}

void require_object(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void check_keys(const ordered_json& j, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  require_object(j, where);
  for (const char* key : required)
    if (!j.contains(key)) fail(where, std::string("missing required key '") + key + "'");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const auto matches = [&key](const char* k) { return key == k; };
    if (!std::any_of(required.begin(), required.end(), matches) &&
        !std::any_of(optional.begin(), optional.end(), matches))
      fail(where, "unknown key '" + key + "'");
  }
}

std::string get_string(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_string()) fail(where, std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::uint32_t get_u32(const ordered_json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 0x7fffffffLL)
    fail(where, std::string("'") + key + "' must be a non-negative integer");
  return static_cast<std::uint32_t>(v.get<long long>());
}

bool get_bool(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_boolean()) fail(where, std::string("'") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

BigInt json_bigint(const ordered_json& v, const std::string& where) {
  if (v.is_number_integer()) return BigInt(v.get<long long>());
  if (v.is_string()) {
    try {
      return BigInt(v.get<std::string>());
    } catch (const std::exception&) {
      fail(where, "malformed integer string '" + v.get<std::string>() + "'");
    }
  }
  fail(where, "expected an integer (or a decimal string for large values)");
}

Rational json_rational(const ordered_json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(BigInt(v.get<long long>()));
  if (v.is_string()) {
    if (auto parsed = parse_rational(v.get<std::string>())) return *parsed;
    fail(where, "malformed rational '" + v.get<std::string>() + "'");
  }
  fail(where, "expected a rational as an integer or \"p/q\" string");
}

Vector json_vector(const ordered_json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of positive integers");
  std::vector<BigInt> comps;
  for (const auto& x : v) comps.push_back(json_bigint(x, where));
  try {
    return make_vector(std::move(comps));
  } catch (const ArgumentError& e) {
    fail(where, e.what());
  }
}

std::vector<BigInt> json_bigint_list(const ordered_json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of integers");
  std::vector<BigInt> out;
  for (const auto& x : v) out.push_back(json_bigint(x, where));
  return out;
}

// The construction experiments act on: a plain spec, or the k-point cyclic
// extension of a base spec (cyclic_k >= 1 marks the extension).
struct Construction {
  std::optional<ConstructionSpec> spec;
  std::uint32_t cyclic_k = 0;
};

builders::SequenceRule json_sequence(const ordered_json& j, const std::string& where) {
  check_keys(j, where, {"rule"}, {"scale", "offset"});
  const std::string rule = get_string(j, "rule", where);
  if (rule == "squares") return builders::squares();
  if (rule == "powers_of_two") return builders::powers_of_two();
  if (rule == "linear") {
    const BigInt scale = j.contains("scale") ? json_bigint(j.at("scale"), where) : BigInt(1);
    const BigInt offset = j.contains("offset") ? json_bigint(j.at("offset"), where) : BigInt(0);
    return builders::linear(scale, offset);
  }
  fail(where, "unknown rule '" + rule + "' (expected squares, powers_of_two or linear)");
}

Construction parse_construction(const ordered_json& j, const std::string& where) {
  require_object(j, where);
  if (!j.contains("builder")) fail(where, "missing required key 'builder'");
  const std::string b = get_string(j, "builder", where);
  Construction out;
  if (b == "example41") {
    check_keys(j, where, {"builder", "v"}, {"pattern"});
    const Vector v = json_vector(j.at("v"), where + ".v");
    if (j.contains("pattern")) {
      const auto& p = j.at("pattern");
      check_keys(p, where + ".pattern", {"period"}, {"phase"});
      const std::uint32_t period = get_u32(p, "period", where + ".pattern");
      const std::uint32_t phase = p.contains("phase") ? get_u32(p, "phase", where + ".pattern") : 0;
      out.spec = builders::build_example41(v, builders::period_phase(period, phase));
    } else {
      out.spec = builders::build_example41(v);
    }
  } else if (b == "example42") {
    check_keys(j, where, {"builder"}, {});
    out.spec = builders::build_example42();
  } else if (b == "example43") {
    check_keys(j, where, {"builder", "v"}, {});
    out.spec = builders::build_example43(json_vector(j.at("v"), where + ".v"));
  } else if (b == "hk_skyscraper") {
    check_keys(j, where, {"builder"}, {});
    out.spec = builders::build_hk_skyscraper();
  } else if (b == "prop64_adaptive") {
    check_keys(j, where, {"builder", "a", "b", "horizon"}, {});
    out.spec = builders::build_prop64_adaptive(json_sequence(j.at("a"), where + ".a"),
                                               json_sequence(j.at("b"), where + ".b"),
                                               get_u32(j, "horizon", where));
  } else if (b == "fact62_kcut") {
    check_keys(j, where, {"builder", "k"}, {"with_filler"});
    const bool filler = j.contains("with_filler") ? get_bool(j, "with_filler", where) : true;
    out.spec = builders::build_fact62(get_u32(j, "k", where), filler);
  } else if (b == "thm72") {
    check_keys(j, where, {"builder", "v"}, {});
    out.spec = builders::build_thm72(json_vector(j.at("v"), where + ".v"));
  } else if (b == "thm73") {
    check_keys(j, where, {"builder", "v"}, {"offset_multipliers"});
    std::optional<std::vector<BigInt>> mults;
    if (j.contains("offset_multipliers"))
      mults = json_bigint_list(j.at("offset_multipliers"), where + ".offset_multipliers");
    out.spec = builders::build_thm73(json_vector(j.at("v"), where + ".v"), {}, std::move(mults));
  } else if (b == "cor74_family") {
    check_keys(j, where, {"builder", "family"}, {});
    const auto& fam = j.at("family");
    if (!fam.is_array() || fam.empty()) fail(where, "'family' must be a non-empty array of vectors");
    std::vector<Vector> family;
    for (std::size_t i = 0; i < fam.size(); ++i)
      family.push_back(json_vector(fam[i], where + ".family[" + std::to_string(i) + "]"));
    out.spec = builders::build_cor74(family);
  } else if (b == "fact61_cyclic_extension") {
    check_keys(j, where, {"builder", "k", "base"}, {});
    const std::uint32_t k = get_u32(j, "k", where);
    if (k < 1) fail(where, "'k' must be at least 1");
    Construction base = parse_construction(j.at("base"), where + ".base");
    if (base.cyclic_k != 0) fail(where + ".base", "nested cyclic extensions are not supported");
    out.spec = std::move(base.spec);
    out.cyclic_k = k;
  } else if (b == "stages") {
    check_keys(j, where, {"builder", "initial_width", "stages"}, {"label"});
    const auto& st = j.at("stages");
    if (!st.is_array() || st.empty()) fail(where, "'stages' must be a non-empty array");
    std::vector<Stage> stages;
    for (std::size_t i = 0; i < st.size(); ++i) {
      const std::string sw = where + ".stages[" + std::to_string(i) + "]";
      check_keys(st[i], sw, {"cuts", "spacers"}, {});
      Stage stage;
      stage.cuts = get_u32(st[i], "cuts", sw);
      stage.spacers = json_bigint_list(st[i].at("spacers"), sw);
      stages.push_back(std::move(stage));
    }
    const std::string label =
        j.contains("label") ? get_string(j, "label", where) : std::string("explicit-stages");
    out.spec = ConstructionSpec::from_stages(json_rational(j.at("initial_width"), where), stages,
                                             label);
  } else {
    fail(where, "unknown builder '" + b + "'");
  }
  return out;
}

LevelSet parse_level(const ordered_json& j, const std::string& where) {
  check_keys(j, where, {"column", "heights"}, {});
  LevelSet a;
  a.column = get_u32(j, "column", where);
  a.heights = json_bigint_list(j.at("heights"), where + ".heights");
  return a;
}

std::vector<BigInt> parse_ns(const ordered_json& j, const ConstructionSpec& spec,
                             const std::string& where) {
  std::vector<BigInt> out;
  if (j.is_array()) {
    out = json_bigint_list(j, where);
    for (const BigInt& n : out)
      if (n < 0) fail(where, "shift values must be non-negative");
    return out;
  }
  check_keys(j, where, {"heights"}, {});
  const auto& h = j.at("heights");
  check_keys(h, where + ".heights", {"from", "to"}, {"step", "scale"});
  const std::uint32_t from = get_u32(h, "from", where + ".heights");
  const std::uint32_t to = get_u32(h, "to", where + ".heights");
  const std::uint32_t step = h.contains("step") ? get_u32(h, "step", where + ".heights") : 1;
  const BigInt scale =
      h.contains("scale") ? json_bigint(h.at("scale"), where + ".heights") : BigInt(1);
  if (to < from) fail(where + ".heights", "'to' must be >= 'from'");
  if (step < 1) fail(where + ".heights", "'step' must be at least 1");
  if (scale < 1) fail(where + ".heights", "'scale' must be at least 1");
  for (std::uint32_t m = from; m <= to; m += step) out.push_back(BigInt(scale * spec.height(m)));
  return out;
}

std::size_t count_ns(const ordered_json& j, const std::string& where) {
  if (j.is_array()) return j.size();
  // Mirrors parse_ns without touching the spec.
  const auto& h = j.at("heights");
  const std::uint32_t from = get_u32(h, "from", where);
  const std::uint32_t to = get_u32(h, "to", where);
  const std::uint32_t step = h.contains("step") ? get_u32(h, "step", where) : 1;
  if (to < from || step < 1) return 0;
  return (to - from) / step + 1;
}

struct RowData {
  BigInt n;
  std::vector<BigInt> shifts;
  MeasureBound bound;
  bool within_budget = true;
};

std::string shifts_string(const std::vector<BigInt>& shifts) {
  std::string out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (i) out += ';';
    out += shifts[i].str();
  }
  return out;
}

std::string series_csv(const std::vector<RowData>& rows) {
  std::string out = "n,shifts,mu_lower,mu_upper\n";
  for (const RowData& r : rows) {
    out += r.n.str();
    out += ',';
    out += shifts_string(r.shifts);
    out += ',';
    out += rational_string(r.bound.lower);
    out += ',';
    out += rational_string(r.bound.upper);
    out += '\n';
  }
  return out;
}

std::string series_json(const std::vector<RowData>& rows) {
  ordered_json arr = ordered_json::array();
  for (const RowData& r : rows) {
    ordered_json row;
    row["n"] = r.n.str();
    ordered_json shifts = ordered_json::array();
    for (const BigInt& s : r.shifts) shifts.push_back(s.str());
    row["shifts"] = std::move(shifts);
    row["mu_lower"] = rational_string(r.bound.lower);
    row["mu_upper"] = rational_string(r.bound.upper);
    arr.push_back(std::move(row));
  }
  ordered_json doc;
  doc["series"] = std::move(arr);
  return doc.dump(2) + "\n";
}

// Expectation outcome: ok unless a row contradicts the claim (falsified) or
// cannot certify it within the limits (budget).
struct Verdict {
  std::string status = "ok";
  std::string detail;
};

void note_budget(Verdict& v, const std::string& detail) {
  if (v.status == "ok") {
    v.status = "budget";
    v.detail = detail;
  }
}

void falsify(Verdict& v, const std::string& detail) {
  v.status = "falsified";
  v.detail = detail;
}

std::string row_name(const RowData& r) {
  return "entry n=" + r.n.str() + " (shifts " + shifts_string(r.shifts) + ")";
}

Verdict eval_profile_expect(const ordered_json* expect, const std::vector<RowData>& rows,
                            const std::string& where) {
  Verdict v;
  if (!expect) {
    v.detail = std::to_string(rows.size()) + " entries computed";
    return v;
  }
  if (expect->contains("zero") && expect->at("zero").get<bool>()) {
    for (const RowData& r : rows) {
      if (r.bound.lower > 0) {
        falsify(v, row_name(r) + " measures " + rational_string(r.bound.lower) + ", expected 0");
        return v;
      }
      if (!r.bound.exact())
        note_budget(v, row_name(r) + " unresolved in [" + rational_string(r.bound.lower) + ", " +
                           rational_string(r.bound.upper) + "]");
    }
  }
  if (expect->contains("positive") && expect->at("positive").get<bool>()) {
    for (const RowData& r : rows) {
      if (r.bound.upper == 0) {
        falsify(v, row_name(r) + " is exactly 0, expected positive");
        return v;
      }
      if (r.bound.lower == 0) note_budget(v, row_name(r) + " not certified positive");
    }
  }
  if (expect->contains("at_least")) {
    const Rational floor = json_rational(expect->at("at_least"), where + ".expect.at_least");
    for (const RowData& r : rows) {
      if (r.bound.upper < floor) {
        falsify(v, row_name(r) + " is at most " + rational_string(r.bound.upper) +
                       ", expected >= " + rational_string(floor));
        return v;
      }
      if (r.bound.lower < floor)
        note_budget(v, row_name(r) + " only certified >= " + rational_string(r.bound.lower));
    }
  }
  if (expect->contains("equals")) {
    const auto& eq = expect->at("equals");
    if (eq.size() != rows.size())
      fail(where + ".expect.equals", "expected " + std::to_string(rows.size()) + " values, got " +
                                         std::to_string(eq.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational want = json_rational(eq[i], where + ".expect.equals");
      const RowData& r = rows[i];
      if (r.bound.exact()) {
        if (r.bound.lower != want) {
          falsify(v, row_name(r) + " measures " + rational_string(r.bound.lower) +
                         ", expected " + rational_string(want));
          return v;
        }
      } else if (want < r.bound.lower || want > r.bound.upper) {
        falsify(v, row_name(r) + " lies in [" + rational_string(r.bound.lower) + ", " +
                       rational_string(r.bound.upper) + "], excluding expected " +
                       rational_string(want));
        return v;
      } else {
        note_budget(v, row_name(r) + " unresolved, expected value not certified");
      }
    }
  }
  if (v.status == "ok" && v.detail.empty())
    v.detail = "expectation held over " + std::to_string(rows.size()) + " entries";
  return v;
}

// One experiment's outputs: the manifest row plus any data files to write.
struct OutputFile {
  std::string name;
  std::string content;
};

struct ExpOutput {
  ExperimentResult result;
  std::vector<OutputFile> files;
};

struct RunContext {
  const Construction* con = nullptr;  // null when the config has no construction
  RunOptions opts;
  std::uint32_t inner_threads = 1;
  std::string format;     // csv | json, for series files
  std::string base_name;  // "NN-label", extension appended per file
};

const ConstructionSpec& require_spec(const RunContext& ctx, const std::string& where) {
  if (!ctx.con || !ctx.con->spec) fail(where, "this experiment type requires a construction");
  return *ctx.con->spec;
}

LevelSet experiment_level(const ordered_json& exp, const ConstructionSpec& spec,
                          const std::string& where) {
  LevelSet a = exp.contains("level") ? parse_level(exp.at("level"), where + ".level")
                                     : LevelSet::base();
  validate_level_set(spec, a);
  return a;
}

const ordered_json* expect_of(const ordered_json& exp) {
  return exp.contains("expect") ? &exp.at("expect") : nullptr;
}

ExpOutput run_profile(const ordered_json& exp, const RunContext& ctx, const std::string& where) {
  ExpOutput out;
  const ConstructionSpec& spec = require_spec(ctx, where);
  const bool multiplicative = exp.contains("mode") && exp.at("mode") == "multiplicative";
  const LevelSet a = experiment_level(exp, spec, where);
  const Rational mu_a = level_set_measure(spec, a);
  std::vector<RowData> rows;

  if (ctx.con->cyclic_k > 0) {
    const std::vector<BigInt> ns = parse_ns(exp.at("ns"), spec, where + ".ns");
    for (const BigInt& n : ns) {
      RowData r;
      r.n = n;
      r.shifts = {n};
      try {
        r.bound = builders::cyclic_extension_measure(spec, a, n, ctx.con->cyclic_k,
                                                     ctx.opts.limits);
      } catch (const BudgetError&) {
        r.bound = {Rational(0), mu_a};
        r.within_budget = false;
      }
      rows.push_back(std::move(r));
    }
  } else if (exp.contains("shift_sets")) {
    const auto& sets = exp.at("shift_sets");
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const std::vector<BigInt> shifts =
          json_bigint_list(sets[k], where + ".shift_sets[" + std::to_string(k) + "]");
      RowData r;
      r.n = BigInt(k + 1);
      r.shifts = shifts;
      if (multiplicative) {
        MeasureBound product = MeasureBound::point(Rational(1));
        for (const BigInt& s : shifts) {
          MeasureBound factor;
          try {
            factor = measure_at_resolved(spec, a, {s}, ctx.opts.limits).bound;
          } catch (const BudgetError&) {
            factor = {Rational(0), mu_a};
            r.within_budget = false;
          }
          product.lower *= factor.lower;
          product.upper *= factor.upper;
        }
        r.bound = product;
      } else {
        try {
          r.bound = measure_at_resolved(spec, a, shifts, ctx.opts.limits).bound;
        } catch (const BudgetError&) {
          r.bound = {Rational(0), mu_a};
          r.within_budget = false;
        }
      }
      rows.push_back(std::move(r));
    }
  } else {
    const Vector v = json_vector(exp.at("v"), where + ".v");
    const std::vector<BigInt> ns = parse_ns(exp.at("ns"), spec, where + ".ns");
    const MeasureSeries series =
        multiplicative
            ? multiplicative_profile(spec, a, v, ns, ctx.opts.limits, ctx.inner_threads)
            : joint_profile(spec, a, v, ns, ctx.opts.limits, ctx.inner_threads);
    for (const SeriesEntry& e : series.entries) {
      RowData r;
      r.n = e.n;
      for (const BigInt& c : v.components) r.shifts.push_back(BigInt(c * e.n));
      r.bound = e.bound;
      r.within_budget = e.within_budget;
      rows.push_back(std::move(r));
    }
  }

  Verdict verdict = eval_profile_expect(expect_of(exp), rows, where);
  for (const RowData& r : rows)
    if (!r.within_budget) note_budget(verdict, row_name(r) + " exceeded the cardinality budget");
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  const bool json_format = ctx.format == "json";
  out.files.push_back({ctx.base_name + (json_format ? ".json" : ".csv"),
                       json_format ? series_json(rows) : series_csv(rows)});
  return out;
}

ExpOutput run_verify_zero(const ordered_json& exp, const RunContext& ctx,
                          const std::string& where) {
  ExpOutput out;
  const ConstructionSpec& spec = require_spec(ctx, where);
  const LevelSet a = experiment_level(exp, spec, where);
  const Vector v = json_vector(exp.at("v"), where + ".v");
  const std::vector<BigInt> windows = json_bigint_list(exp.at("windows"), where + ".windows");

  std::string expected;
  if (const ordered_json* expect = expect_of(exp))
    expected = get_string(*expect, "verdict", where + ".expect");

  Verdict verdict;
  ordered_json rows = ordered_json::array();
  for (const BigInt& wn : windows) {
    if (wn < 1 || wn > 1000000) fail(where + ".windows", "window indices must be in [1, 10^6]");
    const auto n = static_cast<std::uint32_t>(wn);
    const TypeVerdict t =
        verify_zero_window(spec, a, v, n, ctx.opts.limits, ctx.inner_threads);
    ordered_json row;
    row["n"] = n;
    row["verdict"] = to_string(t.kind);
    row["window_lo"] = t.window_lo.str();
    row["window_hi"] = t.window_hi.str();
    if (t.kind == TypeVerdict::Kind::positive_witnessed && !t.witnesses.empty()) {
      row["counterexample_m"] = t.witnesses.front().str();
      row["measure"] = rational_string(t.bound);
    }
    if (!t.note.empty()) row["note"] = t.note;
    rows.push_back(std::move(row));

    if (!expected.empty() && to_string(t.kind) != expected) {
      const std::string d = "window " + std::to_string(n) + " returned " + to_string(t.kind) +
                            ", expected " + expected;
      if (t.kind == TypeVerdict::Kind::inconclusive)
        note_budget(verdict, d + (t.note.empty() ? "" : " (" + t.note + ")"));
      else
        falsify(verdict, d);
    }
  }
  if (verdict.status == "ok")
    verdict.detail = std::to_string(windows.size()) + " windows checked";

  ordered_json doc;
  ordered_json vec = ordered_json::array();
  for (const BigInt& c : v.components) vec.push_back(c.str());
  doc["v"] = std::move(vec);
  doc["windows"] = std::move(rows);
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  out.files.push_back({ctx.base_name + ".json", doc.dump(2) + "\n"});
  return out;
}

ExpOutput run_certify_alpha(const ordered_json& exp, const RunContext& ctx,
                            const std::string& where) {
  ExpOutput out;
  const ConstructionSpec& spec = require_spec(ctx, where);
  const Vector v = json_vector(exp.at("v"), where + ".v");
  const std::uint32_t M = get_u32(exp, "M", where);
  const bool recurs =
      exp.contains("recurs_every_stage") && get_bool(exp, "recurs_every_stage", where);
  const TypeVerdict t =
      certify_v_alpha_lower(spec, v, height_subsequence(recurs), M, ctx.opts.limits);

  Verdict verdict;
  if (const ordered_json* expect = expect_of(exp)) {
    const std::string expected = get_string(*expect, "verdict", where + ".expect");
    if (to_string(t.kind) != expected) {
      const std::string d = "verdict " + to_string(t.kind) + ", expected " + expected;
      if (t.kind == TypeVerdict::Kind::inconclusive)
        note_budget(verdict, d + (t.note.empty() ? "" : " (" + t.note + ")"));
      else
        falsify(verdict, d);
    } else {
      if (expect->contains("at_least")) {
        const Rational floor = json_rational(expect->at("at_least"), where + ".expect.at_least");
        if (t.bound < floor)
          falsify(verdict, "certified bound " + rational_string(t.bound) + " below " +
                               rational_string(floor));
      }
      if (expect->contains("equals")) {
        const Rational want = json_rational(expect->at("equals"), where + ".expect.equals");
        if (t.bound != want)
          falsify(verdict, "certified bound " + rational_string(t.bound) + ", expected " +
                               rational_string(want));
      }
    }
  }
  if (verdict.status == "ok")
    verdict.detail = to_string(t.kind) + " with bound " + rational_string(t.bound);

  ordered_json doc;
  ordered_json vec = ordered_json::array();
  for (const BigInt& c : v.components) vec.push_back(c.str());
  doc["v"] = std::move(vec);
  doc["M"] = M;
  doc["verdict"] = to_string(t.kind);
  doc["bound"] = rational_string(t.bound);
  ordered_json wits = ordered_json::array();
  for (const BigInt& w : t.witnesses) wits.push_back(w.str());
  doc["witnesses"] = std::move(wits);
  if (!t.note.empty()) doc["note"] = t.note;
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  out.files.push_back({ctx.base_name + ".json", doc.dump(2) + "\n"});
  return out;
}

ordered_json witness_json(const OrderWitness& w) {
  ordered_json doc;
  doc["relation"] = w.relation == OrderWitness::Relation::le_p ? "le_p" : "le_m";
  doc["n"] = w.n.str();
  doc["m"] = w.m.str();
  if (w.relation == OrderWitness::Relation::le_p) {
    doc["c"] = w.c.str();
    ordered_json inj = ordered_json::array();
    for (std::size_t i : w.injection) inj.push_back(i);
    doc["injection"] = std::move(inj);
  } else {
    ordered_json plus = ordered_json::array();
    for (const auto& set : w.plus_sets) {
      ordered_json s = ordered_json::array();
      for (std::size_t i : set) s.push_back(i);
      plus.push_back(std::move(s));
    }
    doc["plus_sets"] = std::move(plus);
    ordered_json minus = ordered_json::array();
    for (const auto& set : w.minus_sets) {
      ordered_json s = ordered_json::array();
      for (std::size_t i : set) s.push_back(i);
      minus.push_back(std::move(s));
    }
    doc["minus_sets"] = std::move(minus);
  }
  return doc;
}

ExpOutput run_order(const ordered_json& exp, const RunContext& ctx, const std::string& where) {
  ExpOutput out;
  const auto& pairs = exp.at("pairs");
  Verdict verdict;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string pw = where + ".pairs[" + std::to_string(i) + "]";
    const Vector v = json_vector(pairs[i].at("v"), pw + ".v");
    const Vector w = json_vector(pairs[i].at("w"), pw + ".w");
    const OrderDecision p = decide_le_p(v, w);
    const OrderDecision m = decide_le_m(v, w);
    const std::string pair_name = "(" + shifts_string(v.components) + ") vs (" +
                                  shifts_string(w.components) + ")";
    for (const OrderDecision* d : {&p, &m}) {
      if (d->holds && !verify_witness(v, w, *d->witness))
        falsify(verdict, pair_name + ": returned witness failed the independent check");
    }
    if (pairs[i].contains("expect")) {
      const auto& expect = pairs[i].at("expect");
      if (expect.contains("le_p") && expect.at("le_p").get<bool>() != p.holds)
        falsify(verdict, pair_name + ": le_p is " + (p.holds ? "true" : "false") +
                             ", expected " + (p.holds ? "false" : "true"));
      if (expect.contains("le_m") && expect.at("le_m").get<bool>() != m.holds)
        falsify(verdict, pair_name + ": le_m is " + (m.holds ? "true" : "false") +
                             ", expected " + (m.holds ? "false" : "true"));
    }
    ordered_json row;
    ordered_json vj = ordered_json::array();
    for (const BigInt& c : v.components) vj.push_back(c.str());
    ordered_json wj = ordered_json::array();
    for (const BigInt& c : w.components) wj.push_back(c.str());
    row["v"] = std::move(vj);
    row["w"] = std::move(wj);
    ordered_json pj;
    pj["holds"] = p.holds;
    if (p.holds) pj["witness"] = witness_json(*p.witness);
    row["le_p"] = std::move(pj);
    ordered_json mj;
    mj["holds"] = m.holds;
    if (m.holds) mj["witness"] = witness_json(*m.witness);
    row["le_m"] = std::move(mj);
    rows.push_back(std::move(row));
  }
  if (verdict.status == "ok") verdict.detail = std::to_string(pairs.size()) + " pairs decided";
  ordered_json doc;
  doc["pairs"] = std::move(rows);
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  out.files.push_back({ctx.base_name + ".json", doc.dump(2) + "\n"});
  return out;
}

ExpOutput run_oracle_audit(const ordered_json& exp, const RunContext& ctx,
                           const std::string& where) {
  ExpOutput out;
  const ConstructionSpec& spec = require_spec(ctx, where);
  const std::uint32_t columns = get_u32(exp, "columns", where);
  const std::uint32_t depth = get_u32(exp, "depth", where);
  const auto& shift_lists = exp.at("shifts");
  std::vector<std::vector<BigInt>> shifts;
  for (std::size_t i = 0; i < shift_lists.size(); ++i)
    shifts.push_back(
        json_bigint_list(shift_lists[i], where + ".shifts[" + std::to_string(i) + "]"));

  AuditReport report;
  for (std::uint32_t col = 0; col <= columns; ++col) {
    const BigInt h = spec.height(col);
    if (h > 512)
      fail(where, "column " + std::to_string(col) + " has " + h.str() +
                      " levels; audits are capped at 512 per column");
    for (BigInt level = 0; level < h; ++level) {
      LevelSet a;
      a.column = col;
      a.heights = {level};
      for (const auto& s : shifts) {
        const std::uint32_t n = std::max(depth, col + 1);
        try {
          const MeasureBound direct = intersection_measure(spec, a, s, n, ctx.opts.limits);
          const MeasureBound geo = oracle::oracle_intersection(spec, a, s, n, ctx.opts.limits);
          ++report.cases;
          if (direct.lower != geo.lower || direct.upper != geo.upper)
            report.mismatches.push_back(
                "column " + std::to_string(col) + " level " + level.str() + " shifts " +
                shifts_string(s) + " depth " + std::to_string(n) + ": direct [" +
                rational_string(direct.lower) + ", " + rational_string(direct.upper) +
                "] vs oracle [" + rational_string(geo.lower) + ", " +
                rational_string(geo.upper) + "]");
        } catch (const BudgetError&) {
          ++report.skipped;
        }
      }
    }
  }

  Verdict verdict;
  if (!report.mismatches.empty())
    falsify(verdict, std::to_string(report.mismatches.size()) +
                         " disagreements between the two computation paths");
  if (const ordered_json* expect = expect_of(exp)) {
    if (expect->contains("min_cases")) {
      const auto min_cases = static_cast<std::size_t>(get_u32(*expect, "min_cases", where));
      if (verdict.status == "ok" && report.cases < min_cases)
        falsify(verdict, "only " + std::to_string(report.cases) + " cases ran, expected >= " +
                             std::to_string(min_cases));
    }
  }
  if (verdict.status == "ok")
    verdict.detail = std::to_string(report.cases) + " cases agreed exactly" +
                     (report.skipped ? " (" + std::to_string(report.skipped) + " over budget)"
                                     : "");

  ordered_json doc;
  doc["columns"] = columns;
  doc["depth"] = depth;
  doc["cases"] = report.cases;
  doc["skipped"] = report.skipped;
  ordered_json mm = ordered_json::array();
  for (const std::string& s : report.mismatches) mm.push_back(s);
  doc["mismatches"] = std::move(mm);
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  out.files.push_back({ctx.base_name + ".json", doc.dump(2) + "\n"});
  return out;
}

ExpOutput run_witness_search(const ordered_json& exp, const RunContext& ctx,
                             const std::string& where) {
  ExpOutput out;
  const ConstructionSpec& spec = require_spec(ctx, where);
  const LevelSet a = experiment_level(exp, spec, where);
  const std::vector<BigInt> shifts = parse_ns(exp.at("shifts"), spec, where + ".shifts");
  const std::uint32_t M = get_u32(exp, "M", where);
  const std::uint32_t N = get_u32(exp, "N", where);
  const Rational mu_a = level_set_measure(spec, a);

  std::vector<WitnessPoint> points;
  for (const BigInt& s : shifts) {
    const ResolvedMeasure r = measure_at_resolved(spec, a, {s}, ctx.opts.limits);
    if (!r.fully_resolved) {
      out.result.status = "budget";
      out.result.detail = "pairwise measure at shift " + s.str() + " did not resolve exactly";
      return out;
    }
    points.push_back({s, r.bound.lower});
  }
  const WitnessPair pair = witness_pair_search(spec, a, points, mu_a, M, N, ctx.opts.limits);

  Verdict verdict;
  if (const ordered_json* expect = expect_of(exp)) {
    if (expect->contains("floor")) {
      const Rational want = json_rational(expect->at("floor"), where + ".expect.floor");
      if (pair.floor != want)
        falsify(verdict, "pigeonhole floor " + rational_string(pair.floor) + ", expected " +
                             rational_string(want));
    }
    if (expect->contains("value_at_least")) {
      const Rational want =
          json_rational(expect->at("value_at_least"), where + ".expect.value_at_least");
      if (pair.value < want)
        falsify(verdict, "pair value " + rational_string(pair.value) + " below " +
                             rational_string(want));
    }
  }
  if (verdict.status == "ok")
    verdict.detail = "pair (" + pair.a_m.str() + ", " + pair.a_n.str() + ") at " +
                     rational_string(pair.value) + " >= floor " + rational_string(pair.floor);

  ordered_json doc;
  doc["M"] = M;
  doc["N"] = N;
  ordered_json sj = ordered_json::array();
  for (const BigInt& s : shifts) sj.push_back(s.str());
  doc["shifts"] = std::move(sj);
  ordered_json pw = ordered_json::array();
  for (const WitnessPoint& p : points) pw.push_back(rational_string(p.pairwise));
  doc["pairwise"] = std::move(pw);
  ordered_json pj;
  pj["m_index"] = pair.m_index;
  pj["n_index"] = pair.n_index;
  pj["a_m"] = pair.a_m.str();
  pj["a_n"] = pair.a_n.str();
  pj["value"] = rational_string(pair.value);
  pj["floor"] = rational_string(pair.floor);
  doc["pair"] = std::move(pj);
  out.result.status = verdict.status;
  out.result.detail = verdict.detail;
  out.files.push_back({ctx.base_name + ".json", doc.dump(2) + "\n"});
  return out;
}

// Schema pass over one experiment; throws on any structural problem so that
// bad configs are rejected before anything runs.
void validate_experiment(const ordered_json& exp, const Construction* con,
                         const std::string& where) {
  require_object(exp, where);
  if (!exp.contains("type")) fail(where, "missing required key 'type'");
  const std::string type = get_string(exp, "type", where);
  const bool has_spec = con && con->spec;
  if (type != "order" && !has_spec) fail(where, "type '" + type + "' requires a construction");

  if (type == "profile") {
    check_keys(exp, where, {"type"}, {"label", "mode", "v", "ns", "shift_sets", "level", "expect"});
    if (exp.contains("mode")) {
      const std::string mode = get_string(exp, "mode", where);
      if (mode != "joint" && mode != "multiplicative")
        fail(where, "'mode' must be joint or multiplicative");
    }
    std::size_t entry_count = 0;
    if (con->cyclic_k > 0) {
      if (exp.contains("v") || exp.contains("shift_sets"))
        fail(where, "cyclic extension profiles take plain 'ns' shifts only");
      if (exp.contains("mode") && exp.at("mode") == "multiplicative")
        fail(where, "cyclic extension profiles are joint only");
      if (!exp.contains("ns")) fail(where, "missing required key 'ns'");
      entry_count = count_ns(exp.at("ns"), where + ".ns");
    } else if (exp.contains("shift_sets")) {
      if (exp.contains("v") || exp.contains("ns"))
        fail(where, "'shift_sets' excludes 'v' and 'ns'");
      const auto& sets = exp.at("shift_sets");
      if (!sets.is_array() || sets.empty())
        fail(where + ".shift_sets", "expected a non-empty array of shift lists");
      for (const auto& s : sets)
        if (!s.is_array() || s.empty())
          fail(where + ".shift_sets", "each entry must be a non-empty array");
      entry_count = sets.size();
    } else {
      if (!exp.contains("v")) fail(where, "missing required key 'v' (or use 'shift_sets')");
      if (!exp.contains("ns")) fail(where, "missing required key 'ns'");
      json_vector(exp.at("v"), where + ".v");
      entry_count = count_ns(exp.at("ns"), where + ".ns");
    }
    if (const ordered_json* expect = expect_of(exp)) {
      check_keys(*expect, where + ".expect", {}, {"zero", "positive", "at_least", "equals"});
      if (expect->contains("equals")) {
        const auto& eq = expect->at("equals");
        if (!eq.is_array() || eq.size() != entry_count)
          fail(where + ".expect.equals",
               "expected an array of exactly " + std::to_string(entry_count) + " values");
      }
    }
  } else if (type == "verify-zero") {
    check_keys(exp, where, {"type", "v", "windows"}, {"label", "level", "expect"});
    json_vector(exp.at("v"), where + ".v");
    if (!exp.at("windows").is_array() || exp.at("windows").empty())
      fail(where + ".windows", "expected a non-empty array of window indices");
    if (const ordered_json* expect = expect_of(exp)) {
      check_keys(*expect, where + ".expect", {"verdict"}, {});
      const std::string v = get_string(*expect, "verdict", where + ".expect");
      if (v != "zero_on_window" && v != "positive_witnessed" && v != "inconclusive")
        fail(where + ".expect", "unknown verdict '" + v + "'");
    }
  } else if (type == "certify-alpha") {
    check_keys(exp, where, {"type", "v", "M"}, {"label", "recurs_every_stage", "expect"});
    json_vector(exp.at("v"), where + ".v");
    get_u32(exp, "M", where);
    if (const ordered_json* expect = expect_of(exp))
      check_keys(*expect, where + ".expect", {"verdict"}, {"at_least", "equals"});
  } else if (type == "order") {
    check_keys(exp, where, {"type", "pairs"}, {"label"});
    const auto& pairs = exp.at("pairs");
    if (!pairs.is_array() || pairs.empty())
      fail(where + ".pairs", "expected a non-empty array of {v, w} pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string pw = where + ".pairs[" + std::to_string(i) + "]";
      check_keys(pairs[i], pw, {"v", "w"}, {"expect"});
      json_vector(pairs[i].at("v"), pw + ".v");
      json_vector(pairs[i].at("w"), pw + ".w");
      if (pairs[i].contains("expect"))
        check_keys(pairs[i].at("expect"), pw + ".expect", {}, {"le_p", "le_m"});
    }
  } else if (type == "oracle-audit") {
    check_keys(exp, where, {"type", "columns", "depth", "shifts"}, {"label", "expect"});
    get_u32(exp, "columns", where);
    get_u32(exp, "depth", where);
    if (!exp.at("shifts").is_array() || exp.at("shifts").empty())
      fail(where + ".shifts", "expected a non-empty array of shift lists");
    if (const ordered_json* expect = expect_of(exp))
      check_keys(*expect, where + ".expect", {}, {"min_cases"});
  } else if (type == "witness-search") {
    check_keys(exp, where, {"type", "shifts", "M", "N"}, {"label", "level", "expect"});
    get_u32(exp, "M", where);
    get_u32(exp, "N", where);
    if (const ordered_json* expect = expect_of(exp))
      check_keys(*expect, where + ".expect", {}, {"floor", "value_at_least"});
  } else {
    fail(where, "unknown experiment type '" + type + "'");
  }
}

ExpOutput dispatch_experiment(const ordered_json& exp, const RunContext& ctx,
                              const std::string& where) {
  const std::string type = exp.at("type").get<std::string>();
  ExpOutput out;
  try {
    if (type == "profile")
      out = run_profile(exp, ctx, where);
    else if (type == "verify-zero")
      out = run_verify_zero(exp, ctx, where);
    else if (type == "certify-alpha")
      out = run_certify_alpha(exp, ctx, where);
    else if (type == "order")
      out = run_order(exp, ctx, where);
    else if (type == "oracle-audit")
      out = run_oracle_audit(exp, ctx, where);
    else
      out = run_witness_search(exp, ctx, where);
  } catch (const BudgetError& e) {
    out.result.status = "budget";
    out.result.detail = e.what();
  } catch (const AnomalyError& e) {
    out.result.status = "falsified";
    out.result.detail = e.what();
  } catch (const std::exception& e) {
    out.result.status = "error";
    out.result.detail = e.what();
  }
  return out;
}

std::string slug(const std::string& text, const std::string& fallback) {
  std::string out;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? fallback : out;
}

struct ParsedConfig {
  ordered_json doc;
  std::string name;
  std::string out_dir;
  std::string format = "csv";
  std::optional<Construction> construction;
};

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig cfg;
  try {
    cfg.doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  check_keys(cfg.doc, "root", {"experiments"}, {"name", "construction", "output"});
  cfg.name = cfg.doc.contains("name") ? get_string(cfg.doc, "name", "root") : "config";
  cfg.out_dir = "out/" + slug(cfg.name, "config");
  if (cfg.doc.contains("output")) {
    const auto& o = cfg.doc.at("output");
    check_keys(o, "output", {}, {"path", "format"});
    if (o.contains("path")) cfg.out_dir = get_string(o, "path", "output");
    if (o.contains("format")) {
      cfg.format = get_string(o, "format", "output");
      if (cfg.format != "csv" && cfg.format != "json")
        fail("output", "'format' must be csv or json");
    }
  }
  if (cfg.doc.contains("construction"))
    cfg.construction = parse_construction(cfg.doc.at("construction"), "construction");

  const auto& exps = cfg.doc.at("experiments");
  if (!exps.is_array()) fail("experiments", "expected an array");
  for (std::size_t i = 0; i < exps.size(); ++i)
    validate_experiment(exps[i], cfg.construction ? &*cfg.construction : nullptr,
                        "experiments[" + std::to_string(i) + "]");
  return cfg;
}

}  // namespace

void validate_config_text(const std::string& json_text) { parse_config(json_text); }

RunOutcome run_config_text(const std::string& json_text, const RunOptions& opts) {
  ParsedConfig cfg = parse_config(json_text);
  if (opts.output_override) cfg.out_dir = *opts.output_override;
  const auto& exps = cfg.doc.at("experiments");

  std::vector<ExpOutput> outputs(exps.size());
  const bool parallel = opts.threads > 1 && exps.size() > 1;
  const auto run_one = [&](std::size_t i) {
    const ordered_json& exp = exps[i];
    RunContext ctx;
    ctx.con = cfg.construction ? &*cfg.construction : nullptr;
    ctx.opts = opts;
    ctx.inner_threads = parallel ? 1 : std::max<std::uint32_t>(opts.threads, 1);
    ctx.format = cfg.format;
    const std::string type = exp.at("type").get<std::string>();
    const std::string label =
        exp.contains("label") ? exp.at("label").get<std::string>() : type;
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu-", i + 1);
    ctx.base_name = prefix + slug(label, type);
    ExpOutput out = dispatch_experiment(exp, ctx, "experiments[" + std::to_string(i) + "]");
    out.result.index = i + 1;
    out.result.type = type;
    out.result.label = label;
    if (!out.files.empty()) out.result.file = out.files.front().name;
    outputs[i] = std::move(out);
  };
  if (parallel) {
    std::size_t next = 0;
    while (next < outputs.size()) {
      const std::size_t batch = std::min<std::size_t>(opts.threads, outputs.size() - next);
      std::vector<std::future<void>> futures;
      for (std::size_t k = 0; k < batch; ++k)
        futures.push_back(std::async(std::launch::async, run_one, next + k));
      for (auto& f : futures) f.get();
      next += batch;
    }
  } else {
    for (std::size_t i = 0; i < outputs.size(); ++i) run_one(i);
  }

  RunOutcome outcome;
  outcome.config_name = cfg.name;
  outcome.output_dir = cfg.out_dir;
  std::filesystem::create_directories(cfg.out_dir);
  const auto write_file = [&](const OutputFile& f) {
    const std::string path = cfg.out_dir + "/" + f.name;
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) throw ArgumentError("cannot write output file " + path);
    stream << f.content;
    outcome.files.push_back(path);
  };

  bool any_falsified = false;
  bool any_degraded = false;
  ordered_json manifest_rows = ordered_json::array();
  for (ExpOutput& out : outputs) {
    for (const OutputFile& f : out.files) write_file(f);
    any_falsified = any_falsified || out.result.status == "falsified";
    any_degraded =
        any_degraded || out.result.status == "budget" || out.result.status == "error";
    ordered_json row;
    row["index"] = out.result.index;
    row["type"] = out.result.type;
    row["label"] = out.result.label;
    row["status"] = out.result.status;
    row["detail"] = out.result.detail;
    if (!out.result.file.empty()) row["file"] = out.result.file;
    manifest_rows.push_back(std::move(row));
    outcome.results.push_back(std::move(out.result));
  }
  outcome.exit_code = any_falsified ? 2 : (any_degraded ? 1 : 0);

  ordered_json manifest;
  manifest["config"] = cfg.name;
  manifest["status"] = any_falsified ? "falsified" : (any_degraded ? "degraded" : "ok");
  manifest["exit_code"] = outcome.exit_code;
  manifest["experiments"] = std::move(manifest_rows);
  write_file({"manifest.json", manifest.dump(2) + "\n"});
  return outcome;
}

RunOutcome run_config_file(const std::string& path, const RunOptions& opts) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw ArgumentError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return run_config_text(buffer.str(), opts);
}

const BundledConfig& bundled_config(const std::string& name) {
  for (const BundledConfig& c : bundled_configs())
    if (c.name == name) return c;
  throw ArgumentError("unknown bundled config '" + name + "'");
}

RunOutcome run_bundled(const std::string& name, const RunOptions& opts) {
  return run_config_text(bundled_config(name).text, opts);
}

AuditReport standard_audit_battery(const Limits& limits) {
  std::vector<ConstructionSpec> specs;
  specs.push_back(builders::build_hk_skyscraper());
  specs.push_back(builders::build_example41(make_vector({BigInt(1), BigInt(2)})));
  specs.push_back(builders::build_example42());
  specs.push_back(builders::build_fact62(3));
  specs.push_back(builders::build_thm72(make_vector({BigInt(1), BigInt(2)})));

  AuditReport report;
  for (const ConstructionSpec& spec : specs) {
    const BigInt h1 = spec.height(1);
    const BigInt h2 = spec.height(2);
    const std::vector<std::vector<BigInt>> shift_sets = {
        {BigInt(1)},       {BigInt(2)}, {BigInt(3)},          {h1},
        {h1, BigInt(2 * h1)}, {h2},     {h2, BigInt(2 * h2)}};
    for (std::uint32_t col = 0; col <= 3; ++col) {
      const BigInt h = spec.height(col);
      if (h > 96) break;
      for (BigInt level = 0; level < h; ++level) {
        LevelSet a;
        a.column = col;
        a.heights = {level};
        for (const auto& shifts : shift_sets) {
          const std::uint32_t max_depth = std::min<std::uint32_t>(col + 3, 5);
          for (std::uint32_t n = col + 1; n <= max_depth; ++n) {
            try {
              const MeasureBound direct = intersection_measure(spec, a, shifts, n, limits);
              const MeasureBound geo = oracle::oracle_intersection(spec, a, shifts, n, limits);
              ++report.cases;
              if (direct.lower != geo.lower || direct.upper != geo.upper)
                report.mismatches.push_back(
                    spec.name() + ": column " + std::to_string(col) + " level " + level.str() +
                    " shifts " + shifts_string(shifts) + " depth " + std::to_string(n) +
                    ": direct [" + rational_string(direct.lower) + ", " +
                    rational_string(direct.upper) + "] vs oracle [" +
                    rational_string(geo.lower) + ", " + rational_string(geo.upper) + "]");
            } catch (const BudgetError&) {
              ++report.skipped;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace rankone::experiment
