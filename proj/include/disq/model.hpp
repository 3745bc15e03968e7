#pragma once

#include "disq/rational.hpp"

#include <iosfwd>
#include <vector>

namespace disq {

// Discouragement queue: arrivals at lambda/(1+k), services at mu*k.
// alpha_sq = mu/lambda and gamma = max(1, alpha_sq) are kept exact.
struct ModelParams {
  Rational lambda;
  Rational mu;
  Rational alpha_sq;
  Rational gamma;
};

ModelParams make_params(const Rational& lambda, const Rational& mu);

// tau = lambda * t
double rescale_time(const ModelParams& p, double t);
Rational rescale_time(const ModelParams& p, const Rational& t);

// p(k,tau) = w(k,tau) / (alpha^k k!). Diagnostic map; uses sqrt(alpha_sq)
// in double precision, the exact pipeline never needs alpha itself.
double w_to_p(int k, double w_value, const ModelParams& p);

// General state-dependent rate sequences, stored as finite exact tables.
class BirthDeathRates {
 public:
  BirthDeathRates(std::vector<Rational> birth, std::vector<Rational> death);

  // lambda_k = lambda/(1+k), mu_k = mu*k for k = 0..k_max.
  static BirthDeathRates discouragement(const ModelParams& p, int k_max);

  // {"birth": ["1", "1/2", ...], "death": ["0", "1", ...]} or
  // {"preset": "discouragement", "lambda": "...", "mu": "...", "count": N}
  static BirthDeathRates from_json(std::istream& in);
  static BirthDeathRates from_json_file(const std::string& path);

  const Rational& birth(int k) const;
  const Rational& death(int k) const;
  int k_max() const { return static_cast<int>(birth_.size()) - 1; }

  // alpha_k = lambda_k/(lambda_k + mu_k); alpha_0 = 1 since mu_0 = 0.
  Rational up_probability(int k) const;

 private:
  std::vector<Rational> birth_;
  std::vector<Rational> death_;
};

enum class PrecisionMode { ExactRational, BigFloat };

struct PrecisionPolicy {
  PrecisionMode mode = PrecisionMode::ExactRational;
  unsigned float_precision_bits = 128;  // big-float mode only, >= 64
  double target_tolerance = 1e-10;
};

}  // namespace disq
