#include "rankone/construction.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "rankone/errors.hpp"

namespace rankone {

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  // cpp_rational's string constructor accepts forms we do not want (spaces,
  // hex); validate the shape first.
  auto is_digits = [](std::string_view s) {
    if (s.empty()) return false;
    return std::ranges::all_of(s, [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string_view body = text;
  bool negative = false;
  if (body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  std::string_view num = body;
  std::string_view den = "1";
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    num = body.substr(0, slash);
    den = body.substr(slash + 1);
  }
  if (!is_digits(num) || !is_digits(den)) return std::nullopt;
  BigInt p{std::string(num)};
  BigInt q{std::string(den)};
  if (q == 0) return std::nullopt;
  Rational r(p, q);
  if (negative) r = -r;
  return r;
}

std::optional<std::uint64_t> to_u64(const BigInt& value) {
  if (value < 0) return std::nullopt;
  if (value > BigInt(std::numeric_limits<std::uint64_t>::max())) return std::nullopt;
  return value.convert_to<std::uint64_t>();
}

namespace {

void validate_stage(const Stage& stage, std::uint32_t n) {
  if (stage.cuts < 2) {
    throw ArgumentError("stage " + std::to_string(n) + ": cuts must be >= 2");
  }
  if (stage.spacers.size() != stage.cuts) {
    throw ArgumentError("stage " + std::to_string(n) + ": expected one spacer count per subcolumn");
  }
  for (const BigInt& s : stage.spacers) {
    if (s < 0) {
      throw ArgumentError("stage " + std::to_string(n) + ": spacer counts must be >= 0");
    }
  }
}

}  // namespace

ConstructionSpec::ConstructionSpec(Rational initial_width, Generator generator, std::string name)
    : initial_width_(std::move(initial_width)),
      generator_(std::move(generator)),
      name_(std::move(name)),
      state_(std::make_shared<State>()),
      metadata_(std::make_shared<std::map<std::string, std::string>>()) {
  if (initial_width_ <= 0) throw ArgumentError("initial width must be positive");
  state_->widths.push_back(initial_width_);
}

ConstructionSpec ConstructionSpec::from_stages(Rational initial_width, std::vector<Stage> stages,
                                               std::string name) {
  auto shared = std::make_shared<std::vector<Stage>>(std::move(stages));
  Generator gen = [shared](const StageContext& ctx) -> Stage {
    if (ctx.n >= shared->size()) {
      throw SpecError("stage " + std::to_string(ctx.n) + " requested from a spec defining " +
                      std::to_string(shared->size()) + " stages");
    }
    return (*shared)[ctx.n];
  };
  return ConstructionSpec(std::move(initial_width), std::move(gen), std::move(name));
}

void ConstructionSpec::ensure_stage(std::uint32_t n) const {
  if (n >= kMaxStage) throw ArgumentError("stage index exceeds the hard ceiling");
  State& st = *state_;
  std::lock_guard lock(st.mutex);
  while (st.stages.size() <= n) {
    auto k = static_cast<std::uint32_t>(st.stages.size());
    Stage stage = generator_(StageContext{k, std::span<const BigInt>(st.heights)});
    validate_stage(stage, k);

    std::vector<BigInt> offsets;
    offsets.reserve(stage.cuts);
    BigInt running = 0;
    BigInt spacer_total = 0;
    const BigInt& h = st.heights[k];
    for (std::uint32_t i = 0; i < stage.cuts; ++i) {
      offsets.push_back(running);
      running += h + stage.spacers[i];
      spacer_total += stage.spacers[i];
    }
    // running == h_{k+1} = cuts*h_k + sum of spacers
    st.heights.push_back(running);
    st.widths.push_back(st.widths.back() / stage.cuts);
    st.spacer_counts.push_back(spacer_total);
    st.offsets.push_back(std::move(offsets));
    st.stages.push_back(std::move(stage));
  }
}

const Stage& ConstructionSpec::stage(std::uint32_t n) const {
  ensure_stage(n);
  return state_->stages[n];
}

BigInt ConstructionSpec::height(std::uint32_t n) const {
  if (n > 0) ensure_stage(n - 1);
  std::lock_guard lock(state_->mutex);
  return state_->heights[n];
}

Rational ConstructionSpec::width(std::uint32_t n) const {
  if (n > 0) ensure_stage(n - 1);
  std::lock_guard lock(state_->mutex);
  return state_->widths[n];
}

ColumnStats ConstructionSpec::column_stats(std::uint32_t n) const {
  if (n > 0) ensure_stage(n - 1);
  std::lock_guard lock(state_->mutex);
  ColumnStats cs;
  cs.index = n;
  cs.height = state_->heights[n];
  cs.width = state_->widths[n];
  cs.spacers_added = state_->spacer_counts[n];
  cs.measure_added = Rational(cs.spacers_added) * cs.width;
  cs.total_measure = Rational(cs.height) * cs.width;
  return cs;
}

const std::vector<BigInt>& ConstructionSpec::stage_offsets(std::uint32_t n) const {
  ensure_stage(n);
  return state_->offsets[n];
}

void ConstructionSpec::set_metadata(std::string key, std::string value) {
  (*metadata_)[std::move(key)] = std::move(value);
}

LevelSet LevelSet::single(std::uint32_t column, BigInt height) {
  LevelSet a;
  a.column = column;
  a.heights.push_back(std::move(height));
  return a;
}

void validate_level_set(const ConstructionSpec& spec, const LevelSet& a) {
  if (a.heights.empty()) throw ArgumentError("level set is empty");
  const BigInt h = spec.height(a.column);
  const BigInt* prev = nullptr;
  for (const BigInt& y : a.heights) {
    if (y < 0 || y >= h) throw ArgumentError("level height out of range for its column");
    if (prev && !(*prev < y)) throw ArgumentError("level heights must be strictly increasing");
    prev = &y;
  }
}

Rational level_set_measure(const ConstructionSpec& spec, const LevelSet& a) {
  return Rational(BigInt(a.heights.size())) * spec.width(a.column);
}

}  // namespace rankone
