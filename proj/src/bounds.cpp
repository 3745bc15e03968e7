#include "disq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace disq {

CoefficientTriangle build_m_triangle(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  std::vector<std::vector<Rational>> rows;
  rows.reserve(depth + 1);
  rows.push_back({Rational(1)});
  for (int i = 0; i < depth; ++i) {
    const auto& prev = rows.back();
    auto get = [&](int k) -> Rational {
      return (k < 0 || k > i) ? Rational(0) : prev[k];
    };
    std::vector<Rational> next(i + 2);
    for (int k = 0; k <= i + 1; ++k)
      next[k] = get(k - 1) + (1 + k) * get(k) + get(k + 1);
    if (next[i + 1] != 1) throw std::logic_error("M diagonal did not emerge as 1");
    rows.push_back(std::move(next));
  }
  return CoefficientTriangle(TriangleKind::M, Rational(1), std::move(rows));
}

std::vector<Integer> bessel_numbers(int depth) {
  auto m = build_m_triangle(depth);
  std::vector<Integer> b;
  b.reserve(depth + 1);
  for (int i = 0; i <= depth; ++i) {
    Rational e = m.at(i, 0);
    if (denominator(e) != 1) throw std::logic_error("M entry is not an integer");
    b.push_back(numerator(e));
  }
  return b;
}

BoundReport verify_bound(const CoefficientTriangle& l_tri, const CoefficientTriangle& m_tri,
                         const ModelParams& p) {
  if (l_tri.depth() != m_tri.depth())
    throw std::invalid_argument("triangle depth mismatch");
  const Rational gamma_sq = p.gamma * p.gamma;
  BoundReport rep;
  for (int i = 0; i <= l_tri.depth(); ++i) {
    Rational factor = 1;  // gamma^(2(i-k)) walked downward from k = i
    for (int k = i; k >= 0; --k) {
      if (l_tri.at(i, k) > m_tri.at(i, k) * factor) {
        rep.pass = false;
        rep.first_i = i;
        rep.first_k = k;
        return rep;
      }
      factor *= gamma_sq;
    }
  }
  return rep;
}

namespace {

// Positive root of i + 2 = 2 w ln w; monotone on [1, i] for i >= 3.
double solve_root(int i) {
  double lo = 1.0, hi = static_cast<double>(i);
  auto f = [&](double w) { return 2.0 * w * std::log(w) - (i + 2.0); };
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<AsymptoticEstimate> asymptotic_check(const std::vector<int>& i_values) {
  int max_i = 0;
  for (int i : i_values) {
    if (i < 3) throw std::invalid_argument("asymptotic check requires i >= 3");
    max_i = std::max(max_i, i);
  }
  auto bessel = bessel_numbers(max_i);
  std::vector<AsymptoticEstimate> out;
  out.reserve(i_values.size());
  for (int i : i_values) {
    AsymptoticEstimate a;
    a.i = i;
    a.w_root = solve_root(i);
    a.root_residual = std::fabs(i + 2.0 - 2.0 * a.w_root * std::log(a.w_root));
    a.log_estimate = -0.5 * std::log(2.0 * M_PI * i) + (i + 3.0) * std::log(a.w_root) -
                     2.0 * std::lgamma(a.w_root + 1.0);
    a.log_crude = i * std::log(i / (2.0 * M_E * std::log(i)));
    a.log_exact = log_abs(bessel[i]);
    a.estimate = std::exp(a.log_estimate);
    a.crude = std::exp(a.log_crude);
    a.normalized_root_ratio =
        std::exp(a.log_exact / i) * (2.0 * M_E * std::log(i)) / i;
    out.push_back(a);
  }
  return out;
}

namespace {

double logaddexp(double a, double b) {
  if (a == -HUGE_VAL) return b;
  if (b == -HUGE_VAL) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

struct LogMCache {
  std::mutex mutex;
  std::vector<double> cols;  // rows 0..depth, stride kLogMColumns
  std::vector<double> row;   // full current row, ln M^(k)_depth
  int depth = -1;
};

LogMCache& log_m_cache() {
  static LogMCache c;
  return c;
}

}  // namespace

std::vector<double> log_m_columns(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  auto& c = log_m_cache();
  std::lock_guard lock(c.mutex);
  if (c.depth < 0) {
    c.row = {0.0};
    c.cols.assign(kLogMColumns, -HUGE_VAL);
    c.cols[0] = 0.0;
    c.depth = 0;
  }
  while (c.depth < depth) {
    const int i = c.depth;
    auto get = [&](int k) { return (k < 0 || k > i) ? -HUGE_VAL : c.row[k]; };
    std::vector<double> next(i + 2);
    for (int k = 0; k <= i + 1; ++k)
      next[k] = logaddexp(get(k - 1), logaddexp(std::log1p(k) + get(k), get(k + 1)));
    c.row = std::move(next);
    ++c.depth;
    for (int k = 0; k < kLogMColumns; ++k)
      c.cols.push_back(k <= i + 1 ? c.row[k] : -HUGE_VAL);
  }
  return std::vector<double>(c.cols.begin(), c.cols.begin() + (depth + 1) * kLogMColumns);
}

CertificateResult streamed_certificate(double tau, double gamma, double epsilon, int max_depth) {
  if (tau < 0) throw std::domain_error("negative tau");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (tau == 0) return {true, 1, -1};

  const double log_eps = std::log(epsilon);
  const double log_tau = std::log(tau);
  const double log_gamma = std::log(gamma);
  const int window = 5;
  int depth = std::min(256, max_depth);
  for (;;) {
    auto cols = log_m_columns(depth);
    auto lm = [&](int i) {
      return i * log_tau + 2.0 * i * log_gamma - std::lgamma(i + 1.0) + cols[i * kLogMColumns];
    };
    for (int n = 0; n + window - 1 <= depth; ++n) {
      if (lm(n) >= log_eps) continue;
      bool monotone = true;
      for (int j = n; j < n + window - 1; ++j)
        if (lm(j + 1) > lm(j)) {
          monotone = false;
          break;
        }
      if (monotone) return {true, n, -1};
    }
    if (depth >= max_depth) return {false, -1, -1};
    depth = std::min(2 * depth, max_depth);
  }
}

CertificateResult convergence_certificate(const CoefficientTriangle& m_tri, double tau,
                                          double gamma, double epsilon) {
  if (tau < 0) throw std::domain_error("negative tau");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (tau == 0) return {true, 1, -1};

  const int depth = m_tri.depth();
  const double log_eps = std::log(epsilon);
  std::vector<double> lm(depth + 1);
  for (int i = 0; i <= depth; ++i)
    lm[i] = i * std::log(tau) + 2.0 * i * std::log(gamma) - std::lgamma(i + 1.0) +
            log_abs(numerator(m_tri.at(i, 0)));

  const int window = 5;
  for (int n = 0; n + window - 1 <= depth; ++n) {
    if (lm[n] >= log_eps) continue;
    bool monotone = true;
    for (int j = n; j + 1 <= n + window - 1; ++j)
      if (lm[j + 1] > lm[j]) {
        monotone = false;
        break;
      }
    if (monotone) return {true, n, -1};
  }

  // The built depth is too shallow; find a sufficient one on the streamed
  // majorant (the growth regime can extend thousands of rows past any depth
  // for which exact integer entries are practical).
  CertificateResult r;
  auto deep = streamed_certificate(tau, gamma, epsilon, 1 << 14);
  if (deep.ok) r.recommended_depth = deep.order + 2 * window;
  return r;
}

}  // namespace disq
