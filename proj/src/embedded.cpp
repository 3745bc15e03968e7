#include "disq/embedded.hpp"

#include <stdexcept>

namespace disq {

Rational EmbeddedTable::at(int n, int k) const {
  if (n < 0 || n > n_max) throw std::out_of_range("step index out of range");
  if (k < 0 || k > n) return 0;
  return p[n][k];
}

namespace {

std::vector<Rational> up_probabilities(const BirthDeathRates& rates, int count) {
  if (rates.k_max() < count - 1)
    throw std::invalid_argument("rates table too short: need entries up to k = " +
                                std::to_string(count - 1));
  std::vector<Rational> up(count);
  for (int k = 0; k < count; ++k) up[k] = rates.up_probability(k);
  return up;
}

}  // namespace

EmbeddedTable embedded_recursion(const BirthDeathRates& rates, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  EmbeddedTable t;
  t.n_max = n_max;
  t.up = up_probabilities(rates, n_max + 2);
  t.p.push_back({Rational(1)});
  for (int n = 0; n < n_max; ++n) {
    const auto& prev = t.p.back();
    auto get = [&](int k) -> Rational {
      return (k < 0 || k > n) ? Rational(0) : prev[k];
    };
    std::vector<Rational> next(n + 2);
    for (int k = 0; k <= n + 1; ++k) {
      Rational from_below = k >= 1 ? t.up[k - 1] * get(k - 1) : Rational(0);
      next[k] = from_below + (1 - t.up[k + 1]) * get(k + 1);
    }
    t.p.push_back(std::move(next));
  }
  return t;
}

ClosedFormResult closed_form(const BirthDeathRates& rates, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const int h_max = n_max / 2;
  const int k_cols = n_max + h_max + 1;  // T[h] is consumed up to column n_max + (h_max - h)
  auto up = up_probabilities(rates, k_cols + 1);

  ClosedFormTables tables;
  tables.d.resize(n_max + 1);
  tables.d[0] = 1;
  for (int k = 1; k <= n_max; ++k) tables.d[k] = tables.d[k - 1] * up[k - 1];

  tables.T.assign(h_max + 1, std::vector<Rational>(k_cols, Rational(0)));
  for (int k = 0; k < k_cols; ++k) tables.T[0][k] = 1;
  for (int h = 1; h <= h_max; ++h) {
    Rational acc = 0;
    for (int k = 0; k < k_cols - h; ++k) {
      acc += up[k] * (1 - up[k + 1]) * tables.T[h - 1][k + 1];
      tables.T[h][k] = acc;
    }
  }

  EmbeddedTable t;
  t.n_max = n_max;
  t.up.assign(up.begin(), up.begin() + std::min<int>(n_max + 2, up.size()));
  for (int n = 0; n <= n_max; ++n) {
    std::vector<Rational> row(n + 1, Rational(0));
    for (int k = n % 2; k <= n; k += 2) row[k] = tables.d[k] * tables.T[(n - k) / 2][k];
    t.p.push_back(std::move(row));
  }
  return {std::move(tables), std::move(t)};
}

ClosedFormResult discouragement_embedded(const ModelParams& p, int n_max) {
  const int h_max = n_max / 2;
  auto rates = BirthDeathRates::discouragement(p, n_max + h_max + 2);
  auto result = closed_form(rates, n_max);

  // Corollary cross-checks: alpha_k = 1/(1 + k(k+1) alpha^2) and
  // d_k = prod_{i=0}^k 1/(1 + i(i-1) alpha^2).
  for (int k = 0; k < static_cast<int>(result.table.up.size()); ++k)
    if (result.table.up[k] != Rational(1) / (1 + k * (k + 1) * p.alpha_sq))
      throw std::logic_error("up-probability disagrees with the closed form");
  Rational prod = 1;
  for (int k = 0; k <= n_max; ++k) {
    prod *= Rational(1) / (1 + k * (k - 1) * p.alpha_sq);
    if (result.tables.d[k] != prod)
      throw std::logic_error("d_k disagrees with the product formula");
  }
  return result;
}

bool parity_check(const EmbeddedTable& t) {
  for (int n = 0; n <= t.n_max; ++n)
    for (int k = 0; k <= n; ++k)
      if ((n + k) % 2 == 1 && t.p[n][k] != 0) return false;
  return true;
}

bool normalization_check(const EmbeddedTable& t) {
  for (int n = 0; n <= t.n_max; ++n) {
    Rational sum = 0;
    for (int k = 0; k <= n; ++k) sum += t.p[n][k];
    if (sum != 1) return false;
  }
  return true;
}

}  // namespace disq
