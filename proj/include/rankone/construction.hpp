#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "rankone/numeric.hpp"

namespace rankone {

// One cutting-and-stacking step applied to column C_n: cut into `cuts` equal
// subcolumns, put spacers[i] spacer levels above subcolumn i (0-indexed from
// the bottom of the stacking order), then stack left under right.
struct Stage {
  std::uint32_t cuts = 2;
  std::vector<BigInt> spacers;  // size == cuts, each >= 0
};

struct ColumnStats {
  std::uint32_t index = 0;
  BigInt height;             // h_n
  Rational width;            // w_n
  BigInt spacers_added;      // spacer levels added by the stage into C_n (0 for n=0)
  Rational measure_added;    // spacers_added * w_n
  Rational total_measure;    // h_n * w_n
};

// Everything a stage generator may depend on: the index and the heights
// computed so far. heights[i] = h_i for i <= n.
struct StageContext {
  std::uint32_t n;
  std::span<const BigInt> heights;
};

// A rank-one construction: initial width plus the stage sequence. Stages come
// from a generator so that rules like "add 3·h_n spacers" can look at the
// heights they themselves produced. Stages are generated strictly in order,
// each exactly once, and memoized; a generator closure may therefore keep
// incremental state of its own. All accessors are thread-safe and, once a
// stage is produced, immutable.
class ConstructionSpec {
 public:
  using Generator = std::function<Stage(const StageContext&)>;

  ConstructionSpec(Rational initial_width, Generator generator, std::string name);

  // Fixed finite stage list; asking beyond it throws SpecError.
  static ConstructionSpec from_stages(Rational initial_width, std::vector<Stage> stages,
                                      std::string name);

  const std::string& name() const { return name_; }

  const Stage& stage(std::uint32_t n) const;
  BigInt height(std::uint32_t n) const;    // h_n
  Rational width(std::uint32_t n) const;   // w_n
  ColumnStats column_stats(std::uint32_t n) const;

  // Base offsets of the copies of C_n inside C_{n+1}:
  //   O_n[i] = i*h_n + sum_{j<i} spacers[j], strictly increasing.
  const std::vector<BigInt>& stage_offsets(std::uint32_t n) const;

  // Free-form annotations written by builders (pattern descriptions, fallback
  // notes, schedule guarantees). Fixed at construction time.
  const std::map<std::string, std::string>& metadata() const { return *metadata_; }
  void set_metadata(std::string key, std::string value);

  // Hard ceiling on stage indices; a runaway depth loop is a bug, not a
  // legitimate request.
  static constexpr std::uint32_t kMaxStage = 100000;

 private:
  struct State {
    std::mutex mutex;
    std::vector<Stage> stages;
    std::vector<std::vector<BigInt>> offsets;
    std::vector<BigInt> heights{BigInt(1)};  // h_0 = 1
    std::vector<Rational> widths;
    std::vector<BigInt> spacer_counts{BigInt(0)};
  };

  void ensure_stage(std::uint32_t n) const;

  Rational initial_width_;
  Generator generator_;
  std::string name_;
  std::shared_ptr<State> state_;
  std::shared_ptr<std::map<std::string, std::string>> metadata_;
};

// A finite union of levels of one column. heights sorted strictly increasing,
// each in [0, h_column).
struct LevelSet {
  std::uint32_t column = 0;
  std::vector<BigInt> heights;

  static LevelSet single(std::uint32_t column, BigInt height);
  static LevelSet base() { return single(0, 0); }  // the level of C_0
};

// Throws ArgumentError unless A is sorted, duplicate-free and within the
// column's height range.
void validate_level_set(const ConstructionSpec& spec, const LevelSet& a);

Rational level_set_measure(const ConstructionSpec& spec, const LevelSet& a);

}  // namespace rankone
