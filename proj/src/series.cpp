#include "disq/series.hpp"

#include "disq/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace disq {

Rational b_coefficient(const ModelParams& p, int k) {
  return Rational(1) / (k + 1) + k * p.alpha_sq;
}

CoefficientTriangle build_l_triangle(const ModelParams& p, int depth) {
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
    for (int k = 0; k <= i + 1; ++k) {
      next[k] = get(k - 1) + b_coefficient(p, k) * get(k) + p.alpha_sq * get(k + 1);
      if (next[k] < 0) throw std::logic_error("negative L entry");
    }
    if (next[i + 1] != 1) throw std::logic_error("L diagonal did not emerge as 1");
    rows.push_back(std::move(next));
  }
  return CoefficientTriangle(TriangleKind::L, p.alpha_sq, std::move(rows));
}

SeriesCoefficients s_coefficients(const CoefficientTriangle& l_tri, const ModelParams& p, int k) {
  if (l_tri.kind() != TriangleKind::L) throw std::invalid_argument("expected an L triangle");
  if (k < 0 || k > l_tri.depth()) throw std::out_of_range("state index exceeds triangle depth");
  SeriesCoefficients s;
  s.k = k;
  s.terms.resize(l_tri.depth() + 1, Rational(0));
  const Rational scale = rational_pow(p.alpha_sq, k);
  for (int i = k; i <= l_tri.depth(); ++i) {
    Rational v = scale * l_tri.at(i, k);
    s.terms[i] = ((i - k) % 2 == 0) ? v : Rational(-v);
  }
  return s;
}

RecursionReport check_dual_recursion(const CoefficientTriangle& l_tri, const ModelParams& p,
                                     int max_i) {
  if (max_i > l_tri.depth() - 1)
    throw std::out_of_range("max_i exceeds triangle depth - 1");
  RecursionReport rep;
  if (max_i < 0) return rep;

  // Route 1: S from the L-triangle.
  auto s_from_l = [&](int i, int k) -> Rational {
    if (k < 0 || k > i) return 0;
    Rational v = rational_pow(p.alpha_sq, k) * l_tri.at(i, k);
    return ((i - k) % 2 == 0) ? v : Rational(-v);
  };

  // Route 2: the stepwise recursion, row i+1 from row i.
  std::vector<std::vector<Rational>> step;
  step.push_back({Rational(1)});
  for (int i = 0; i < max_i; ++i) {
    const auto& prev = step.back();
    auto get = [&](int k) -> Rational {
      return (k < 0 || k > i) ? Rational(0) : prev[k];
    };
    std::vector<Rational> next(i + 2);
    for (int k = 0; k <= i + 1; ++k)
      next[k] = p.alpha_sq * get(k - 1) - b_coefficient(p, k) * get(k) + get(k + 1);
    step.push_back(std::move(next));
  }

  // Route 3: diagonal (alpha^2)^k plus the summed form for everything below it.
  std::vector<std::vector<Rational>> summed;
  summed.push_back({Rational(1)});
  for (int n = 1; n <= max_i; ++n) {
    std::vector<Rational> row(n + 1);
    row[n] = rational_pow(p.alpha_sq, n);
    for (int k = 0; k < n; ++k) {
      const int h = n - k - 1;
      Rational acc = 0;
      for (int i = 0; i <= k; ++i) {
        Rational upper = (i + 1 <= i + h) ? summed[i + h][i + 1] : Rational(0);
        acc += rational_pow(p.alpha_sq, k - i) *
               (-b_coefficient(p, i) * summed[i + h][i] + upper);
      }
      row[k] = acc;
    }
    summed.push_back(std::move(row));
  }

  for (int i = 0; i <= max_i; ++i)
    for (int k = 0; k <= i; ++k) {
      Rational ref = s_from_l(i, k);
      if (step[i][k] != ref || summed[i][k] != ref) {
        rep.pass = false;
        rep.first_i = i;
        rep.first_k = k;
        std::ostringstream os;
        os << "S^(" << k << ")_" << i << ": L-derived " << to_fraction_string(ref)
           << ", stepwise " << to_fraction_string(step[i][k]) << ", summed "
           << to_fraction_string(summed[i][k]);
        rep.detail = os.str();
        return rep;
      }
    }
  return rep;
}

namespace {

// ln of the majorant term (tau^i/i!) M^(k)_i gamma^(2(i-k)).
double log_majorant(const CoefficientTriangle& m_tri, double log_tau, double log_gamma, int i,
                    int k) {
  Rational m = m_tri.at(i, k);
  if (m == 0) return -HUGE_VAL;
  return i * log_tau - std::lgamma(i + 1.0) + log_abs(numerator(m)) +
         2.0 * (i - k) * log_gamma;
}

constexpr int kWindow = 5;
constexpr int kStreamDepthCap = 16384;

// Same majorant term, read from the streamed log-M columns.
double lm_at(const std::vector<double>& cols, double log_tau, double log_gamma, int i, int k) {
  double base = cols[i * kLogMColumns + k];
  if (base == -HUGE_VAL) return -HUGE_VAL;
  return i * log_tau - std::lgamma(i + 1.0) + base + 2.0 * (i - k) * log_gamma;
}

double logaddexp(double a, double b) {
  if (a == -HUGE_VAL) return b;
  if (b == -HUGE_VAL) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Smallest n >= k with majorant/k! below eps and a non-increasing 5-term
// window, or -1 if the streamed depth does not reach it.
int certified_order(const std::vector<double>& cols, int depth, double log_tau, double log_gamma,
                    int k, double eps) {
  const double limit = std::log(eps) + std::lgamma(k + 1.0);
  for (int n = k; n + kWindow - 1 <= depth; ++n) {
    if (lm_at(cols, log_tau, log_gamma, n, k) >= limit) continue;
    bool monotone = true;
    for (int j = n; j < n + kWindow - 1; ++j)
      if (lm_at(cols, log_tau, log_gamma, j + 1, k) >
          lm_at(cols, log_tau, log_gamma, j, k)) {
        monotone = false;
        break;
      }
    if (monotone) return n;
  }
  return -1;
}

// Bits that keep the rounding error of the alternating sum below eps: the
// terms reach sum(majorant) in magnitude while the result is O(1), so the lost
// leading bits are log2(sum/eps), plus headroom.
unsigned precision_bits_for(const std::vector<double>& cols, double log_tau, double log_gamma,
                            int order, double eps) {
  double log_sum = -HUGE_VAL;
  for (int i = 0; i <= order; ++i)
    log_sum = logaddexp(log_sum, lm_at(cols, log_tau, log_gamma, i, 0));
  return 64 + static_cast<unsigned>(
                  std::max(0.0, std::ceil((log_sum - std::log(eps)) / M_LN2)));
}

// Depth certifying every state up to k_max on the streamed majorant, with the
// usual window margin; -1 if the stream cap cannot reach it.
int certified_depth_all_k(double log_tau, double log_gamma, int k_max, double eps) {
  int depth = 256;
  for (;;) {
    auto cols = log_m_columns(depth);
    int order = 0;
    bool all = true;
    for (int k = 0; k <= k_max; ++k) {
      int n = certified_order(cols, depth, log_tau, log_gamma, k, eps);
      if (n < 0) {
        all = false;
        break;
      }
      order = std::max(order, n);
    }
    if (all) return order + 2 * kWindow;
    if (depth >= kStreamDepthCap) return -1;
    depth = std::min(2 * depth, kStreamDepthCap);
  }
}

}  // namespace

int required_depth(const ModelParams& p, const Rational& tau, double eps) {
  if (tau == 0) return 8;
  auto cert = streamed_certificate(to_double(tau), to_double(p.gamma), eps, kStreamDepthCap);
  if (!cert.ok)
    throw std::runtime_error("no certifiable depth below " + std::to_string(kStreamDepthCap));
  return cert.order + 2 * kWindow;
}

double tail_bound(int k, const Rational& tau, int from_index, const CoefficientTriangle& m_tri,
                  const ModelParams& p) {
  if (tau < 0) throw std::domain_error("negative tau");
  if (k < 0 || from_index < 0) throw std::out_of_range("negative index");
  if (tau == 0) return from_index > 0 ? 0.0 : (k == 0 ? 1.0 : 0.0);
  if (from_index + kWindow - 1 > m_tri.depth())
    throw InsufficientDepth("M-triangle too shallow to verify the majorant window",
                            from_index + kWindow - 1);
  const double log_tau = std::log(to_double(tau));
  const double log_gamma = std::log(to_double(p.gamma));
  for (int j = from_index; j < from_index + kWindow - 1; ++j)
    if (log_majorant(m_tri, log_tau, log_gamma, j + 1, k) >
        log_majorant(m_tri, log_tau, log_gamma, j, k))
      throw InsufficientDepth("majorant not yet monotone at the requested truncation order",
                              required_depth(p, tau, 1e-12));
  return std::exp(log_majorant(m_tri, log_tau, log_gamma, from_index, k) -
                  std::lgamma(k + 1.0));
}

TransientResult evaluate_transient(const CoefficientTriangle& l_tri, const ModelParams& p,
                                   const Rational& tau, int k_max, const PrecisionPolicy& policy) {
  if (tau < 0) throw std::domain_error("negative tau");
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (l_tri.kind() != TriangleKind::L) throw std::invalid_argument("expected an L triangle");
  if (policy.mode == PrecisionMode::BigFloat && policy.float_precision_bits < 64)
    throw std::invalid_argument("big-float mode requires at least 64 bits");

  TransientResult res;
  res.tau = to_double(tau);
  res.precision = policy;

  if (tau == 0) {
    res.probabilities.assign(k_max + 1, 0.0);
    res.probabilities[0] = 1.0;
    res.tail_bounds.assign(k_max + 1, 0.0);
    res.truncation_order = 0;
    return res;
  }

  const int depth = l_tri.depth();
  if (k_max > depth)
    throw InsufficientDepth("k_max exceeds triangle depth", k_max + 2 * kWindow);
  if (k_max >= kLogMColumns)
    throw std::invalid_argument("k_max exceeds the streamed majorant columns");
  auto cols = log_m_columns(depth);
  const double eps = policy.target_tolerance;
  const double log_tau = std::log(to_double(tau));
  const double log_gamma = std::log(to_double(p.gamma));

  int order = 0;
  for (int k = 0; k <= k_max; ++k) {
    int n = certified_order(cols, depth, log_tau, log_gamma, k, eps);
    if (n < 0)
      throw InsufficientDepth("depth " + std::to_string(depth) +
                                  " cannot certify tolerance; increase depth",
                              certified_depth_all_k(log_tau, log_gamma, k_max, eps));
    order = std::max(order, n);
  }
  res.truncation_order = order;

  res.probabilities.resize(k_max + 1);
  res.tail_bounds.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k)
    res.tail_bounds[k] =
        std::exp(lm_at(cols, log_tau, log_gamma, order, k) - std::lgamma(k + 1.0));

  if (policy.mode == PrecisionMode::ExactRational) {
    for (int k = 0; k <= k_max; ++k) {
      Rational acc = 0;
      Rational pw = rational_pow(tau, k) / Rational(factorial(k));  // tau^i/i!
      for (int i = k; i < order; ++i) {
        Rational term = pw * l_tri.at(i, k);
        acc += ((i - k) % 2 == 0) ? term : Rational(-term);
        pw *= tau;
        pw /= (i + 1);
      }
      res.probabilities[k] = to_double(acc / Rational(factorial(k)));
    }
    return res;
  }

  // Big-float path: pick working precision from the majorant so that the
  // rounding error stays below the target tolerance despite cancellation.
  unsigned needed = precision_bits_for(cols, log_tau, log_gamma, order, eps);
  unsigned bits = std::max(policy.float_precision_bits, needed);
  res.working_precision_bits = bits;
  BigFloat::default_precision(static_cast<unsigned>(bits / 3.3219) + 4);

  const BigFloat tau_f(tau);
  for (int k = 0; k <= k_max; ++k) {
    BigFloat acc = 0;
    BigFloat pw = BigFloat(rational_pow(tau, k)) / BigFloat(factorial(k));
    for (int i = k; i < order; ++i) {
      BigFloat term = pw * BigFloat(l_tri.at(i, k));
      if ((i - k) % 2 == 0)
        acc += term;
      else
        acc -= term;
      pw *= tau_f;
      pw /= (i + 1);
    }
    res.probabilities[k] = (acc / BigFloat(factorial(k))).convert_to<double>();
  }
  return res;
}

TransientResult evaluate_transient_auto(const ModelParams& p, const Rational& tau, int k_max,
                                        const PrecisionPolicy& policy, int max_depth) {
  if (tau < 0) throw std::domain_error("negative tau");
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (k_max >= kLogMColumns)
    throw std::invalid_argument("k_max exceeds the streamed majorant columns");
  if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (policy.mode == PrecisionMode::BigFloat && policy.float_precision_bits < 64)
    throw std::invalid_argument("big-float mode requires at least 64 bits");

  TransientResult res;
  res.tau = to_double(tau);
  res.precision = policy;

  if (tau == 0) {
    res.probabilities.assign(k_max + 1, 0.0);
    res.probabilities[0] = 1.0;
    res.tail_bounds.assign(k_max + 1, 0.0);
    res.truncation_order = 0;
    return res;
  }

  const double eps = policy.target_tolerance;
  const double log_tau = std::log(to_double(tau));
  const double log_gamma = std::log(to_double(p.gamma));
  const int cap = max_depth > 0 ? max_depth : kStreamDepthCap;

  // Certify a truncation order for every requested state, growing the
  // streamed majorant until the 5-term window closes for all of them.
  std::vector<double> cols;
  int depth = std::min(cap, 256);
  int order = -1;
  for (;;) {
    cols = log_m_columns(depth);
    order = 0;
    bool certified = true;
    for (int k = 0; k <= k_max; ++k) {
      int n = certified_order(cols, depth, log_tau, log_gamma, k, eps);
      if (n < 0) {
        certified = false;
        break;
      }
      order = std::max(order, n);
    }
    if (certified) break;
    if (depth >= cap) {
      int rec = certified_depth_all_k(log_tau, log_gamma, k_max, eps);
      unsigned rec_bits = 0;
      if (rec > 0) {
        auto deep_cols = log_m_columns(rec);
        rec_bits = precision_bits_for(deep_cols, log_tau, log_gamma, rec, eps);
      }
      char eps_text[32];
      std::snprintf(eps_text, sizeof(eps_text), "%g", eps);
      throw InsufficientDepth("depth " + std::to_string(cap) + " cannot certify tolerance " +
                                  eps_text + " at this tau",
                              rec, rec_bits);
    }
    depth = std::min(2 * depth, cap);
  }
  res.truncation_order = order;

  res.probabilities.resize(k_max + 1);
  res.tail_bounds.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k)
    res.tail_bounds[k] =
        std::exp(lm_at(cols, log_tau, log_gamma, order, k) - std::lgamma(k + 1.0));

  if (policy.mode == PrecisionMode::ExactRational && order > kExactOrderLimit) {
    unsigned rec_bits = precision_bits_for(cols, log_tau, log_gamma, order, eps);
    throw InsufficientDepth(
        "truncation order " + std::to_string(order) +
            " is past the exact-rational regime; rerun with big-float precision",
        order + 2 * kWindow, rec_bits);
  }

  if (policy.mode == PrecisionMode::ExactRational) {
    std::vector<Rational> bcoef(order + 1);
    for (int k = 0; k <= order; ++k) bcoef[k] = b_coefficient(p, k);
    std::vector<Rational> acc(k_max + 1, Rational(0));
    std::vector<Rational> row{Rational(1)}, next;
    Rational pw = 1;  // tau^i / i!
    for (int i = 0; i < order; ++i) {
      for (int k = 0; k <= std::min(i, k_max); ++k) {
        Rational term = pw * row[k];
        if ((i - k) % 2 == 0)
          acc[k] += term;
        else
          acc[k] -= term;
      }
      next.assign(i + 2, Rational(0));
      for (int k = 0; k <= i + 1; ++k) {
        Rational v = k > 0 ? row[k - 1] : Rational(0);
        if (k <= i) v += bcoef[k] * row[k];
        if (k + 1 <= i) v += p.alpha_sq * row[k + 1];
        next[k] = v;
      }
      row.swap(next);
      pw *= tau;
      pw /= (i + 1);
    }
    for (int k = 0; k <= k_max; ++k)
      res.probabilities[k] = to_double(acc[k] / Rational(factorial(k)));
    return res;
  }

  unsigned needed = precision_bits_for(cols, log_tau, log_gamma, order, eps);
  unsigned bits = std::max(policy.float_precision_bits, needed);
  res.working_precision_bits = bits;
  BigFloat::default_precision(static_cast<unsigned>(bits / 3.3219) + 4);

  const BigFloat asq(p.alpha_sq);
  const BigFloat tau_f(tau);
  std::vector<BigFloat> bcoef(order + 1);
  for (int k = 0; k <= order; ++k) bcoef[k] = BigFloat(b_coefficient(p, k));
  std::vector<BigFloat> acc(k_max + 1, BigFloat(0));
  std::vector<BigFloat> row{BigFloat(1)}, next;
  BigFloat pw(1);
  for (int i = 0; i < order; ++i) {
    for (int k = 0; k <= std::min(i, k_max); ++k) {
      BigFloat term = pw * row[k];
      if ((i - k) % 2 == 0)
        acc[k] += term;
      else
        acc[k] -= term;
    }
    next.assign(i + 2, BigFloat(0));
    for (int k = 0; k <= i + 1; ++k) {
      BigFloat v = k > 0 ? row[k - 1] : BigFloat(0);
      if (k <= i) v += bcoef[k] * row[k];
      if (k + 1 <= i) v += asq * row[k + 1];
      next[k] = v;
    }
    row.swap(next);
    pw *= tau_f;
    pw /= (i + 1);
  }
  for (int k = 0; k <= k_max; ++k)
    res.probabilities[k] = (acc[k] / BigFloat(factorial(k))).convert_to<double>();
  return res;
}

}  // namespace disq
