#include "disq/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace disq {

ModelParams make_params(const Rational& lambda, const Rational& mu) {
  if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
  if (mu <= 0) throw std::invalid_argument("mu must be positive");
  ModelParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.alpha_sq = mu / lambda;
  p.gamma = p.alpha_sq > 1 ? p.alpha_sq : Rational(1);
  return p;
}

double rescale_time(const ModelParams& p, double t) {
  if (t < 0) throw std::domain_error("negative time");
  return to_double(p.lambda) * t;
}

Rational rescale_time(const ModelParams& p, const Rational& t) {
  if (t < 0) throw std::domain_error("negative time");
  return p.lambda * t;
}

double w_to_p(int k, double w_value, const ModelParams& p) {
  if (k < 0) throw std::domain_error("negative state index");
  double alpha = std::sqrt(to_double(p.alpha_sq));
  return w_value / (std::pow(alpha, k) * to_double(Rational(factorial(k))));
}

BirthDeathRates::BirthDeathRates(std::vector<Rational> birth, std::vector<Rational> death)
    : birth_(std::move(birth)), death_(std::move(death)) {
  if (birth_.empty() || birth_.size() != death_.size())
    throw std::invalid_argument("birth/death sequences must be nonempty and equal length");
  if (death_[0] != 0) throw std::invalid_argument("mu_0 must be 0");
  for (size_t k = 0; k < birth_.size(); ++k) {
    if (birth_[k] <= 0) throw std::invalid_argument("lambda_k must be positive");
    if (k >= 1 && death_[k] <= 0) throw std::invalid_argument("mu_k must be positive for k >= 1");
  }
}

BirthDeathRates BirthDeathRates::discouragement(const ModelParams& p, int k_max) {
  std::vector<Rational> birth, death;
  birth.reserve(k_max + 1);
  death.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    birth.push_back(p.lambda / (1 + k));
    death.push_back(p.mu * k);
  }
  return BirthDeathRates(std::move(birth), std::move(death));
}

BirthDeathRates BirthDeathRates::from_json(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.contains("preset")) {
    if (j["preset"].get<std::string>() != "discouragement")
      throw std::invalid_argument("unknown preset '" + j["preset"].get<std::string>() + "'");
    auto params = make_params(parse_rational(j.at("lambda").get<std::string>()),
                              parse_rational(j.at("mu").get<std::string>()));
    int count = j.value("count", 128);
    return discouragement(params, count);
  }
  std::vector<Rational> birth, death;
  for (const auto& s : j.at("birth")) birth.push_back(parse_rational(s.get<std::string>()));
  for (const auto& s : j.at("death")) death.push_back(parse_rational(s.get<std::string>()));
  return BirthDeathRates(std::move(birth), std::move(death));
}

BirthDeathRates BirthDeathRates::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rates file '" + path + "'");
  return from_json(in);
}

const Rational& BirthDeathRates::birth(int k) const {
  if (k < 0 || k > k_max()) throw std::out_of_range("birth rate index out of range");
  return birth_[k];
}

const Rational& BirthDeathRates::death(int k) const {
  if (k < 0 || k > k_max()) throw std::out_of_range("death rate index out of range");
  return death_[k];
}

Rational BirthDeathRates::up_probability(int k) const {
  return birth(k) / (birth(k) + death(k));
}

}  // namespace disq
