#include "rankone/experiment.hpp"

namespace rankone::experiment {
namespace {

// Each config carries its expected outcome in expect blocks; running a
// bundled config re-verifies every stored claim from scratch.
const BundledConfig kConfigs[] = {
    {"ex41-positive",
     "example41 with v = (1, 2): the joint intersection along pattern heights "
     "equals 1/3 of the base measure, certified as a limit bound",
     "ok",
     R"json({
  "name": "ex41-positive",
  "construction": {"builder": "example41", "v": [1, 2]},
  "experiments": [
    {
      "type": "profile",
      "label": "joint-at-heights",
      "v": [1, 2],
      "ns": {"heights": {"from": 1, "to": 3}},
      "expect": {"equals": ["1/3", "1/3", "1/3"]}
    },
    {
      "type": "certify-alpha",
      "label": "certify-one-third",
      "v": [1, 2],
      "M": 3,
      "recurs_every_stage": true,
      "expect": {"verdict": "positive_witnessed", "equals": "1/3"}
    }
  ]
})json"},

    {"ex42-mult-not-positive",
     "example42: pairwise intersections stay above 1/4 along heights while "
     "the joint measure for v = (1, 2) vanishes on every checked window",
     "ok",
     R"json({
  "name": "ex42-mult-not-positive",
  "construction": {"builder": "example42"},
  "experiments": [
    {
      "type": "verify-zero",
      "label": "joint-vanishes",
      "v": [1, 2],
      "windows": [1, 2, 3, 4],
      "expect": {"verdict": "zero_on_window"}
    },
    {
      "type": "profile",
      "label": "pairwise-at-heights",
      "v": [1],
      "ns": {"heights": {"from": 0, "to": 5}},
      "expect": {"at_least": "1/4"}
    },
    {
      "type": "profile",
      "label": "pairwise-at-double-heights",
      "v": [1],
      "ns": {"heights": {"from": 0, "to": 5, "scale": 2}},
      "expect": {"at_least": "1/4"}
    },
    {
      "type": "profile",
      "label": "product-at-heights",
      "mode": "multiplicative",
      "v": [1, 2],
      "ns": {"heights": {"from": 0, "to": 5}},
      "expect": {"at_least": "1/16"}
    }
  ]
})json"},

    {"ex43-general",
     "example43 with v = (1, 2): the same vanishing-joint behavior produced "
     "by the general construction recipe",
     "ok",
     R"json({
  "name": "ex43-general",
  "construction": {"builder": "example43", "v": [1, 2]},
  "experiments": [
    {
      "type": "verify-zero",
      "label": "joint-vanishes",
      "v": [1, 2],
      "windows": [1, 2],
      "expect": {"verdict": "zero_on_window"}
    },
    {
      "type": "profile",
      "label": "product-at-heights",
      "mode": "multiplicative",
      "v": [1, 2],
      "ns": {"heights": {"from": 1, "to": 3}},
      "expect": {"at_least": "1/16"}
    }
  ]
})json"},

    {"hk-positive",
     "hk_skyscraper: pairwise intersections equal 1/2 at every height, "
     "certified as a limit bound, plus a pigeonhole triple witness",
     "ok",
     R"json({
  "name": "hk-positive",
  "construction": {"builder": "hk_skyscraper"},
  "experiments": [
    {
      "type": "profile",
      "label": "pairwise-at-heights",
      "v": [1],
      "ns": {"heights": {"from": 0, "to": 8}},
      "expect": {"at_least": "1/2"}
    },
    {
      "type": "certify-alpha",
      "label": "certify-one-half",
      "v": [1],
      "M": 4,
      "expect": {"verdict": "positive_witnessed", "equals": "1/2"}
    },
    {
      "type": "witness-search",
      "label": "triple-witness",
      "shifts": {"heights": {"from": 0, "to": 4}},
      "M": 2,
      "N": 0,
      "expect": {"floor": "1/10", "value_at_least": "1/10"}
    }
  ]
})json"},

    {"prop64-avoid",
     "prop64_adaptive over squares and powers of two: every triple "
     "intersection and every triple product vanishes up to the horizon",
     "ok",
     R"json({
  "name": "prop64-avoid",
  "construction": {
    "builder": "prop64_adaptive",
    "a": {"rule": "squares"},
    "b": {"rule": "powers_of_two"},
    "horizon": 8
  },
  "experiments": [
    {
      "type": "profile",
      "label": "triple-joint",
      "shift_sets": [
        [1, 3], [4, 8], [9, 17], [16, 32], [25, 57], [36, 100],
        [49, 177], [64, 320], [81, 593], [100, 1124], [121, 2169],
        [144, 4240], [169, 8361], [196, 16580], [225, 32993],
        [256, 65792], [289, 131361], [324, 262468]
      ],
      "expect": {"zero": true}
    },
    {
      "type": "profile",
      "label": "triple-product",
      "mode": "multiplicative",
      "shift_sets": [
        [1, 2, 3], [4, 4, 8], [9, 8, 17], [16, 16, 32], [25, 32, 57],
        [36, 64, 100], [49, 128, 177], [64, 256, 320], [81, 512, 593],
        [100, 1024, 1124], [121, 2048, 2169], [144, 4096, 4240],
        [169, 8192, 8361], [196, 16384, 16580], [225, 32768, 32993],
        [256, 65536, 65792], [289, 131072, 131361], [324, 262144, 262468]
      ],
      "expect": {"zero": true}
    }
  ]
})json"},

    {"fact61-cyclic",
     "fact61_cyclic_extension of hk_skyscraper with k = 2: shifts outside "
     "2Z vanish and even shifts reproduce the base measures",
     "ok",
     R"json({
  "name": "fact61-cyclic",
  "construction": {
    "builder": "fact61_cyclic_extension",
    "k": 2,
    "base": {"builder": "hk_skyscraper"}
  },
  "experiments": [
    {
      "type": "profile",
      "label": "extension-profile",
      "ns": [1, 2, 3, 6, 8, 32, 129],
      "expect": {"equals": ["0", "1/2", "0", "1/4", "1/2", "1/2", "0"]}
    }
  ]
})json"},

    {"fact62-kcut",
     "fact62_kcut with k = 3: the joint intersection for v = (1, 3) stays "
     "at 1/2 of the base measure along pattern-stage heights",
     "ok",
     R"json({
  "name": "fact62-kcut",
  "construction": {"builder": "fact62_kcut", "k": 3},
  "experiments": [
    {
      "type": "profile",
      "label": "joint-at-pattern-heights",
      "v": [1, 3],
      "ns": {"heights": {"from": 0, "to": 4, "step": 2}},
      "expect": {"equals": ["1/2", "1/2", "1/2"]}
    }
  ]
})json"},

    {"thm72",
     "thm72 with v = (1, 2): the pairwise product stays above 1/9 along "
     "heights and the joint limit is certified to equal 1/3",
     "ok",
     R"json({
  "name": "thm72",
  "construction": {"builder": "thm72", "v": [1, 2]},
  "experiments": [
    {
      "type": "profile",
      "label": "product-at-heights",
      "mode": "multiplicative",
      "v": [1, 2],
      "ns": {"heights": {"from": 1, "to": 5}},
      "expect": {"at_least": "1/9"}
    },
    {
      "type": "certify-alpha",
      "label": "certify-one-third",
      "v": [1, 2],
      "M": 3,
      "expect": {"verdict": "positive_witnessed", "equals": "1/3"}
    }
  ]
})json"},

    {"thm73",
     "thm73 with v = (1, 3): joint intersections along heights equal 1/3 "
     "of the base measure",
     "ok",
     R"json({
  "name": "thm73",
  "construction": {"builder": "thm73", "v": [1, 3]},
  "experiments": [
    {
      "type": "profile",
      "label": "joint-at-heights",
      "v": [1, 3],
      "ns": {"heights": {"from": 1, "to": 3}},
      "expect": {"equals": ["1/3", "1/3", "1/3"]}
    }
  ]
})json"},

    {"cor74",
     "cor74_family over {(1, 2), (1, 3)}: stage-aligned heights give a "
     "positive product for (1, 2) and a positive joint value for (1, 3)",
     "ok",
     R"json({
  "name": "cor74",
  "construction": {"builder": "cor74_family", "family": [[1, 2], [1, 3]]},
  "experiments": [
    {
      "type": "profile",
      "label": "product-for-first-member",
      "mode": "multiplicative",
      "v": [1, 2],
      "ns": {"heights": {"from": 2, "to": 2}},
      "expect": {"equals": ["2/9"]}
    },
    {
      "type": "profile",
      "label": "joint-for-second-member",
      "v": [1, 3],
      "ns": {"heights": {"from": 3, "to": 3}},
      "expect": {"positive": true}
    }
  ]
})json"},

    {"order-matrix",
     "decide_le_p and decide_le_m across a reference battery of vector "
     "pairs, every returned witness re-verified by substitution",
     "ok",
     R"json({
  "name": "order-matrix",
  "experiments": [
    {
      "type": "order",
      "label": "reference-pairs",
      "pairs": [
        {"v": [1, 2], "w": [1, 2, 3], "expect": {"le_p": true, "le_m": true}},
        {"v": [1, 2], "w": [1, 3], "expect": {"le_p": false, "le_m": true}},
        {"v": [1, 3], "w": [1, 2], "expect": {"le_p": false, "le_m": true}},
        {"v": [2, 5], "w": [1, 3], "expect": {"le_p": false, "le_m": false}},
        {"v": [1, 3], "w": [2, 3, 5], "expect": {"le_p": true, "le_m": true}},
        {"v": [2], "w": [1, 2], "expect": {"le_p": true, "le_m": true}},
        {"v": [1], "w": [5], "expect": {"le_p": true, "le_m": true}}
      ]
    }
  ],
  "output": {"format": "json"}
})json"},
};

}  // namespace

const std::vector<BundledConfig>& bundled_configs() {
  static const std::vector<BundledConfig> configs(std::begin(kConfigs), std::end(kConfigs));
  return configs;
}

}  // namespace rankone::experiment
