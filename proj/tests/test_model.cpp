#include "doctest.h"

#include <random>
#include <sstream>

#include "disq/model.hpp"

using namespace disq;

TEST_CASE("make_params computes alpha_sq and gamma exactly") {
  auto p = make_params(1, 1);
  CHECK(p.alpha_sq == 1);
  CHECK(p.gamma == 1);

  p = make_params(1, 2);
  CHECK(p.alpha_sq == 2);
  CHECK(p.gamma == 2);

  p = make_params(2, 1);
  CHECK(p.alpha_sq == Rational(1) / 2);
  CHECK(p.gamma == 1);
}

TEST_CASE("make_params rejects nonpositive rates") {
  CHECK_THROWS_AS(make_params(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_params(1, Rational(-1) / 2), std::invalid_argument);
}

TEST_CASE("rescale_time") {
  CHECK(rescale_time(make_params(2, 1), 3.0) == doctest::Approx(6.0));
  CHECK(rescale_time(make_params(1, 1), 0.7) == doctest::Approx(0.7));
  CHECK(rescale_time(make_params(Rational(1) / 2, 1), Rational(4)) == 2);
  CHECK_THROWS_AS(rescale_time(make_params(1, 1), -1.0), std::domain_error);
}

TEST_CASE("rescale_time is linear in t") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(1, 50);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = make_params(Rational(d(rng)) / d(rng), Rational(d(rng)) / d(rng));
    Rational a = Rational(d(rng)) / d(rng);
    Rational t = Rational(d(rng)) / d(rng);
    CHECK(rescale_time(p, a * t) == a * rescale_time(p, t));
  }
}

TEST_CASE("w_to_p") {
  auto p = make_params(1, 1);
  CHECK(w_to_p(0, 1.0, p) == doctest::Approx(1.0));
  CHECK(w_to_p(1, 1.0, p) == doctest::Approx(1.0));  // alpha = 1
  CHECK(w_to_p(2, 2.0, p) == doctest::Approx(1.0));  // alpha^2 * 2! = 2
  CHECK_THROWS_AS(w_to_p(-1, 1.0, p), std::domain_error);
}

TEST_CASE("discouragement preset satisfies birth(k)*(1+k) = lambda") {
  auto p = make_params(Rational(3) / 7, Rational(2) / 5);
  auto rates = BirthDeathRates::discouragement(p, 10000);
  for (int k = 0; k <= 10000; ++k) {
    CHECK(rates.birth(k) * (1 + k) == p.lambda);
    CHECK(rates.death(k) == p.mu * k);
  }
}

TEST_CASE("rate sequence validation") {
  CHECK_THROWS(BirthDeathRates({Rational(1)}, {Rational(1)}));        // mu_0 != 0
  CHECK_THROWS(BirthDeathRates({Rational(0)}, {Rational(0)}));       // lambda_0 = 0
  CHECK_THROWS(BirthDeathRates({Rational(1), Rational(1)}, {Rational(0), Rational(0)}));
}

TEST_CASE("up_probability has alpha_0 = 1") {
  auto rates = BirthDeathRates::discouragement(make_params(1, 1), 4);
  CHECK(rates.up_probability(0) == 1);
  CHECK(rates.up_probability(1) == Rational(1) / 3);
  CHECK(rates.up_probability(2) == Rational(1) / 7);
}

TEST_CASE("rates file parsing") {
  std::istringstream explicit_rates(
      R"({"birth": ["1", "1/2", "1/3"], "death": ["0", "1", "2"]})");
  auto rates = BirthDeathRates::from_json(explicit_rates);
  CHECK(rates.k_max() == 2);
  CHECK(rates.birth(1) == Rational(1) / 2);
  CHECK(rates.death(2) == 2);

  std::istringstream preset(
      R"({"preset": "discouragement", "lambda": "2", "mu": "1", "count": 5})");
  auto d = BirthDeathRates::from_json(preset);
  CHECK(d.k_max() == 5);
  CHECK(d.birth(3) == Rational(1) / 2);

  std::istringstream bad(R"({"preset": "unknown"})");
  CHECK_THROWS(BirthDeathRates::from_json(bad));

  std::istringstream malformed(R"({"birth": [)");
  CHECK_THROWS(BirthDeathRates::from_json(malformed));
}
