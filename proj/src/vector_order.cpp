#include "rankone/vector_order.hpp"

#include <algorithm>
#include <map>

#include "rankone/errors.hpp"

namespace rankone {
namespace {

// Reduced positive ratio p/q -> the minimal integral (n, m) with n/m = ratio.
std::pair<BigInt, BigInt> minimal_pair(const Rational& ratio) {
  return {BigInt(numerator(ratio)), BigInt(denominator(ratio))};
}

// Signed subset sums of w, each mapped to one realizing coefficient vector
// (-1, 0, +1 per component). 3^d values; first realization wins.
std::map<BigInt, std::vector<int>> signed_sums(const Vector& w) {
  const std::size_t d = w.dimension();
  if (d > 14) throw BudgetError("signed subset enumeration needs more than the cardinality budget");
  std::map<BigInt, std::vector<int>> sums;
  std::vector<int> coeffs(d, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    BigInt value = 0;
    for (std::size_t i = 0; i < d; ++i) {
      coeffs[i] = static_cast<int>(c % 3) - 1;
      c /= 3;
      value += BigInt(coeffs[i]) * w.components[i];
    }
    sums.emplace(value, coeffs);
  }
  return sums;
}

bool next_injection(std::vector<std::size_t>& sigma, std::size_t range) {
  // Odometer over injective maps [d] -> [range], lexicographic.
  const std::size_t d = sigma.size();
  auto valid_from = [&](std::size_t pos) {
    for (std::size_t i = pos; i < d; ++i) {
      while (sigma[i] < range &&
             std::find(sigma.begin(), sigma.begin() + i, sigma[i]) != sigma.begin() + i)
        ++sigma[i];
      if (sigma[i] >= range) return false;
    }
    return true;
  };
  std::size_t pos = d;
  while (pos-- > 0) {
    ++sigma[pos];
    for (std::size_t i = pos + 1; i < d; ++i) sigma[i] = 0;
    if (valid_from(pos)) return true;
  }
  return false;
}

std::vector<std::size_t> first_injection(std::size_t d, std::size_t range) {
  std::vector<std::size_t> sigma(d);
  for (std::size_t i = 0; i < d; ++i) sigma[i] = i;
  (void)range;
  return sigma;
}

}  // namespace

OrderDecision decide_le_p(const Vector& v, const Vector& w) {
  const std::size_t d = v.dimension();
  const std::size_t dp = w.dimension();
  if (d > dp) return {};
  if (dp > 14) throw BudgetError("injection enumeration needs more than the cardinality budget");
  unsigned long long space = dp + 1;
  for (std::size_t i = 0; i < d; ++i) space *= dp - i;
  if (space > 5'000'000ull)
    throw BudgetError("injection enumeration needs more than the cardinality budget");

  // base = dp means c = 0 and is tried first so the plain containment
  // witness wins over a shifted one; base = b means c = m w_b.
  for (std::size_t step = 0; step <= dp; ++step) {
    const std::size_t base = step == 0 ? dp : step - 1;
    const BigInt shift = base < dp ? w.components[base] : BigInt(0);
    std::vector<std::size_t> sigma = first_injection(d, dp);
    do {
      Rational ratio;
      bool consistent = true;
      for (std::size_t i = 0; i < d && consistent; ++i) {
        const BigInt num = w.components[sigma[i]] - shift;
        if (num <= 0) {
          consistent = false;
          break;
        }
        Rational r(num, v.components[i]);
        if (i == 0)
          ratio = r;
        else if (r != ratio)
          consistent = false;
      }
      if (consistent) {
        auto [n, m] = minimal_pair(ratio);
        OrderWitness wit;
        wit.relation = OrderWitness::Relation::le_p;
        wit.n = n;
        wit.m = m;
        wit.c = base < dp ? BigInt(m * w.components[base]) : BigInt(0);
        wit.injection = sigma;
        return {true, std::move(wit)};
      }
    } while (next_injection(sigma, dp));
  }
  return {};
}

OrderDecision decide_le_m(const Vector& v, const Vector& w) {
  const auto sums = signed_sums(w);
  for (const auto& [value, coeffs] : sums) {
    if (value <= 0) continue;
    const Rational t(value, v.components[0]);
    std::vector<std::vector<std::size_t>> plus(v.dimension()), minus(v.dimension());
    bool ok = true;
    for (std::size_t i = 0; i < v.dimension() && ok; ++i) {
      const Rational target = t * Rational(v.components[i]);
      if (denominator(target) != 1) {
        ok = false;
        break;
      }
      auto it = sums.find(BigInt(numerator(target)));
      if (it == sums.end()) {
        ok = false;
        break;
      }
      for (std::size_t j = 0; j < it->second.size(); ++j) {
        if (it->second[j] > 0) plus[i].push_back(j);
        if (it->second[j] < 0) minus[i].push_back(j);
      }
    }
    if (!ok) continue;
    auto [n, m] = minimal_pair(t);
    OrderWitness wit;
    wit.relation = OrderWitness::Relation::le_m;
    wit.n = n;
    wit.m = m;
    wit.c = 0;
    wit.plus_sets = std::move(plus);
    wit.minus_sets = std::move(minus);
    return {true, std::move(wit)};
  }
  return {};
}

bool verify_witness(const Vector& v, const Vector& w, const OrderWitness& wit) {
  if (wit.n <= 0 || wit.m <= 0) return false;
  const std::size_t d = v.dimension();
  const std::size_t dp = w.dimension();
  if (wit.relation == OrderWitness::Relation::le_p) {
    if (wit.injection.size() != d) return false;
    for (std::size_t i = 0; i < d; ++i) {
      if (wit.injection[i] >= dp) return false;
      for (std::size_t j = i + 1; j < d; ++j)
        if (wit.injection[i] == wit.injection[j]) return false;
    }
    if (wit.c != 0) {
      bool matches_component = false;
      for (std::size_t b = 0; b < dp; ++b)
        if (wit.c == wit.m * w.components[b]) matches_component = true;
      if (!matches_component) return false;
    }
    for (std::size_t i = 0; i < d; ++i)
      if (wit.n * v.components[i] != wit.m * w.components[wit.injection[i]] - wit.c)
        return false;
    return true;
  }
  if (wit.plus_sets.size() != d || wit.minus_sets.size() != d) return false;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<bool> used(dp, false);
    BigInt sum = 0;
    for (std::size_t j : wit.plus_sets[i]) {
      if (j >= dp || used[j]) return false;
      used[j] = true;
      sum += w.components[j];
    }
    for (std::size_t j : wit.minus_sets[i]) {
      if (j >= dp || used[j]) return false;
      used[j] = true;
      sum -= w.components[j];
    }
    if (wit.n * v.components[i] != wit.m * sum) return false;
  }
  return true;
}

}  // namespace rankone
