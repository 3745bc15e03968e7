#include "disq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace disq {

TruncatedGenerator make_generator(const BirthDeathRates& rates, int boundary) {
  if (boundary < 1) throw std::invalid_argument("boundary must be >= 1");
  if (rates.k_max() < boundary) throw std::invalid_argument("rates table shorter than boundary");
  TruncatedGenerator g;
  g.up.resize(boundary + 1);
  g.down.resize(boundary + 1);
  for (int k = 0; k <= boundary; ++k) {
    g.up[k] = k < boundary ? to_double(rates.birth(k)) : 0.0;
    g.down[k] = to_double(rates.death(k));
  }
  return g;
}

TruncatedGenerator discouragement_generator(const ModelParams& p, int boundary) {
  return make_generator(BirthDeathRates::discouragement(p, boundary), boundary);
}

UniformizationResult transient_uniformization(const TruncatedGenerator& gen, double t,
                                              double epsilon) {
  if (t < 0) throw std::domain_error("negative time");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const int n = gen.size();

  UniformizationResult res;
  res.p.assign(n, 0.0);
  if (t == 0) {
    res.p[0] = 1.0;
    res.terms = 1;
    return res;
  }

  double rate = 0;
  for (int k = 0; k < n; ++k) rate = std::max(rate, gen.up[k] + gen.down[k]);
  const double a = rate * t;

  // P = I + Q/rate applied from the left: v <- vP.
  std::vector<double> v(n, 0.0), next(n);
  v[0] = 1.0;
  const double log_a = std::log(a);
  double cum = 0;
  int m = 0;
  for (;; ++m) {
    double w = std::exp(-a + m * log_a - std::lgamma(m + 1.0));
    cum += w;
    for (int k = 0; k < n; ++k) res.p[k] += w * v[k];
    if (cum >= 1.0 - epsilon) break;
    for (int k = 0; k < n; ++k) {
      double stay = 1.0 - (gen.up[k] + gen.down[k]) / rate;
      double x = stay * v[k];
      if (k > 0) x += gen.up[k - 1] / rate * v[k - 1];
      if (k + 1 < n) x += gen.down[k + 1] / rate * v[k + 1];
      next[k] = x;
    }
    v.swap(next);
  }
  res.terms = m + 1;
  res.poisson_tail = std::max(0.0, 1.0 - cum);
  res.boundary_mass = res.p[n - 1];
  return res;
}

double EmpiricalDistribution::p_hat(int k) const {
  if (k < 0 || k >= static_cast<int>(counts.size())) return 0.0;
  return static_cast<double>(counts[k]) / static_cast<double>(paths);
}

double EmpiricalDistribution::standard_error(int k) const {
  double p = p_hat(k);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(paths));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

EmpiricalDistribution simulate_paths(const ModelParams& p, const SimConfig& cfg, SimMode mode) {
  if (cfg.paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (mode == SimMode::Continuous && cfg.t_end < 0) throw std::domain_error("negative t_end");
  if (mode == SimMode::Embedded && cfg.steps < 0) throw std::domain_error("negative steps");

  const double lambda = to_double(p.lambda);
  const double mu = to_double(p.mu);
  const double asq = to_double(p.alpha_sq);

  EmpiricalDistribution emp;
  emp.paths = cfg.paths;
  auto record = [&](int k) {
    if (k >= static_cast<int>(emp.counts.size())) emp.counts.resize(k + 1, 0);
    ++emp.counts[k];
  };

  for (long path = 0; path < cfg.paths; ++path) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(path))));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int k = 0;
    if (mode == SimMode::Continuous) {
      double t = 0;
      for (;;) {
        double birth = lambda / (1 + k);
        double death = mu * k;
        double total = birth + death;
        double dt = -std::log1p(-unif(rng)) / total;
        if (t + dt > cfg.t_end) break;
        t += dt;
        k += unif(rng) < birth / total ? 1 : -1;
      }
    } else {
      for (int n = 0; n < cfg.steps; ++n) {
        // alpha_k = 1/(1 + k(k+1) alpha^2); state 0 always jumps up
        double up = 1.0 / (1.0 + k * (k + 1) * asq);
        k += unif(rng) < up ? 1 : -1;
      }
    }
    record(k);
  }
  return emp;
}

std::vector<double> stationary_distribution(const ModelParams& p, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const double rho = to_double(p.lambda / p.mu);
  std::vector<double> pi(k_max + 1);
  double term = 1.0, sum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    pi[k] = term;
    sum += term;
    term *= rho / ((k + 1.0) * (k + 1.0));
  }
  // Dropped tail is bounded by a geometric series from the next term ratio.
  double ratio = rho / ((k_max + 2.0) * (k_max + 2.0));
  double tail = term / (1.0 - std::min(ratio, 0.5));
  if (tail / sum > 1e-15)
    throw std::invalid_argument("k_max too small for a 1e-15 tail; increase to at least " +
                                std::to_string(k_max + 8));
  for (auto& x : pi) x /= sum;
  return pi;
}

int choose_truncation(const ModelParams& p, double t, double epsilon) {
  if (t < 0) throw std::domain_error("negative time");
  if (t == 0) return 1;
  for (int boundary = 8; boundary <= 1 << 14; boundary *= 2) {
    auto res = transient_uniformization(discouragement_generator(p, boundary), t, epsilon / 10);
    if (res.boundary_mass < epsilon / 10) return boundary;
  }
  throw std::runtime_error("no adequate truncation below 16384 states");
}

}  // namespace disq
