#include "doctest.h"

#include <random>
#include <sstream>

#include "disq/bounds.hpp"
#include "disq/series.hpp"

using namespace disq;

namespace {
const ModelParams kSymmetric = make_params(1, 1);
}

TEST_CASE("b coefficients") {
  CHECK(b_coefficient(kSymmetric, 0) == 1);
  CHECK(b_coefficient(kSymmetric, 1) == Rational(3) / 2);
  CHECK(b_coefficient(kSymmetric, 2) == Rational(7) / 3);
  auto p = make_params(2, 1);  // alpha^2 = 1/2
  CHECK(b_coefficient(p, 2) == Rational(1) / 3 + 1);
}

TEST_CASE("L-triangle hand values at alpha^2 = 1") {
  auto tri = build_l_triangle(kSymmetric, 6);
  // k = 0 column
  CHECK(tri.at(0, 0) == 1);
  CHECK(tri.at(1, 0) == 1);
  CHECK(tri.at(2, 0) == 2);
  CHECK(tri.at(3, 0) == Rational(9) / 2);
  // k = 1 column
  CHECK(tri.at(1, 1) == 1);
  CHECK(tri.at(2, 1) == Rational(5) / 2);
  CHECK(tri.at(3, 1) == Rational(27) / 4);
  // diagonal and zero conventions
  for (int i = 0; i <= 6; ++i) CHECK(tri.at(i, i) == 1);
  CHECK(tri.at(3, 5) == 0);
  CHECK(tri.at(4, -1) == 0);
}

TEST_CASE("L entries stay nonnegative across parameter choices") {
  for (auto asq : {Rational(1) / 3, Rational(1) / 2, Rational(2), Rational(5)}) {
    auto tri = build_l_triangle(make_params(1, asq), 30);
    for (int i = 0; i <= 30; ++i)
      for (int k = 0; k <= i; ++k) CHECK(tri.at(i, k) >= 0);
  }
}

TEST_CASE("s_coefficients recovers r and the diagonal") {
  auto tri = build_l_triangle(kSymmetric, 8);
  auto r = s_coefficients(tri, kSymmetric, 0);
  CHECK(r.at(0) == 1);
  CHECK(r.at(1) == -1);
  CHECK(r.at(2) == 2);
  CHECK(r.at(3) == Rational(-9) / 2);

  auto s1 = s_coefficients(tri, kSymmetric, 1);
  CHECK(s1.at(0) == 0);
  CHECK(s1.at(1) == 1);  // alpha^2 = 1

  auto p = make_params(1, 2);  // alpha^2 = 2
  auto tri2 = build_l_triangle(p, 8);
  for (int k = 0; k <= 8; ++k)
    CHECK(s_coefficients(tri2, p, k).at(k) == rational_pow(p.alpha_sq, k));

  CHECK_THROWS_AS(s_coefficients(tri, kSymmetric, 9), std::out_of_range);
}

TEST_CASE("dual recursion agreement") {
  SUBCASE("alpha^2 = 1, small") {
    auto tri = build_l_triangle(kSymmetric, 5);
    auto rep = check_dual_recursion(tri, kSymmetric, 3);
    CHECK(rep.pass);
  }
  SUBCASE("alpha^2 = 1/2, deeper") {
    auto p = make_params(2, 1);
    auto tri = build_l_triangle(p, 21);
    CHECK(check_dual_recursion(tri, p, 20).pass);
  }
  SUBCASE("vacuous at max_i = 0") {
    auto tri = build_l_triangle(kSymmetric, 2);
    CHECK(check_dual_recursion(tri, kSymmetric, 0).pass);
  }
  SUBCASE("random rational parameters") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(1, 9);
    for (int trial = 0; trial < 20; ++trial) {
      auto p = make_params(d(rng), Rational(d(rng)) / d(rng));
      auto tri = build_l_triangle(p, 13);
      auto rep = check_dual_recursion(tri, p, 12);
      INFO(rep.detail);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("zero-boundary S construction equals the L-derived view up to i = 40") {
  for (auto asq : {Rational(1) / 2, Rational(1), Rational(2)}) {
    auto p = make_params(1, asq);
    auto tri = build_l_triangle(p, 41);
    auto rep = check_dual_recursion(tri, p, 40);
    INFO(rep.detail);
    CHECK(rep.pass);
  }
}

TEST_CASE("evaluate_transient at tau = 0 returns the initial condition") {
  auto tri = build_l_triangle(kSymmetric, 10);
  auto res = evaluate_transient(tri, kSymmetric, Rational(0), 3, {});
  CHECK(res.probabilities[0] == 1.0);
  for (int k = 1; k <= 3; ++k) CHECK(res.probabilities[k] == 0.0);
  CHECK(res.tail_bounds[0] == 0.0);
}

TEST_CASE("small-tau expansions") {
  auto tri = build_l_triangle(kSymmetric, 40);
  PrecisionPolicy policy;
  policy.target_tolerance = 1e-14;

  double tau = 0.01;
  auto res = evaluate_transient(tri, kSymmetric, Rational(1) / 100, 3, policy);
  double poly = 1 - tau + tau * tau - 0.75 * tau * tau * tau;
  CHECK(std::fabs(res.probabilities[0] - poly) < 1e-8);

  auto res2 = evaluate_transient(tri, kSymmetric, Rational(1) / 1000, 3, policy);
  CHECK(std::fabs(res2.probabilities[1] - 0.001) < 2e-6);
}

TEST_CASE("evaluate_transient rejects bad input") {
  auto tri = build_l_triangle(kSymmetric, 10);
  CHECK_THROWS_AS(evaluate_transient(tri, kSymmetric, Rational(-1), 3, {}), std::domain_error);
  PrecisionPolicy bad;
  bad.mode = PrecisionMode::BigFloat;
  bad.float_precision_bits = 32;
  CHECK_THROWS_AS(evaluate_transient(tri, kSymmetric, Rational(1), 3, bad),
                  std::invalid_argument);
}

TEST_CASE("insufficient depth reports a usable recommendation") {
  auto tri = build_l_triangle(kSymmetric, 20);
  PrecisionPolicy policy;
  policy.target_tolerance = 1e-10;
  int recommended = 0;
  try {
    evaluate_transient(tri, kSymmetric, Rational(5), 5, policy);
    FAIL("expected InsufficientDepth");
  } catch (const InsufficientDepth& e) {
    recommended = e.recommended_depth;
  }
  CHECK(recommended > 20);
  auto deep = build_l_triangle(kSymmetric, recommended);
  auto res = evaluate_transient(deep, kSymmetric, Rational(5), 5, policy);
  for (double b : res.tail_bounds) CHECK(b <= 1e-10);
}

TEST_CASE("big-float path agrees with the exact path") {
  auto tri = build_l_triangle(kSymmetric, 80);
  PrecisionPolicy exact;
  exact.target_tolerance = 1e-12;
  PrecisionPolicy bigf;
  bigf.mode = PrecisionMode::BigFloat;
  bigf.float_precision_bits = 128;
  bigf.target_tolerance = 1e-12;
  auto a = evaluate_transient(tri, kSymmetric, Rational(2), 8, exact);
  auto b = evaluate_transient(tri, kSymmetric, Rational(2), 8, bigf);
  CHECK(b.working_precision_bits >= 128);
  for (int k = 0; k <= 8; ++k)
    CHECK(a.probabilities[k] == doctest::Approx(b.probabilities[k]).epsilon(1e-13));
}

TEST_CASE("evaluate_transient_auto streams without a triangle") {
  PrecisionPolicy policy;
  policy.target_tolerance = 1e-10;

  SUBCASE("matches the triangle-based evaluation exactly") {
    auto tri = build_l_triangle(kSymmetric, 80);
    auto a = evaluate_transient(tri, kSymmetric, Rational(2), 8, policy);
    auto b = evaluate_transient_auto(kSymmetric, Rational(2), 8, policy);
    CHECK(a.truncation_order == b.truncation_order);
    for (int k = 0; k <= 8; ++k) CHECK(a.probabilities[k] == b.probabilities[k]);
  }
  SUBCASE("tau = 0") {
    auto r = evaluate_transient_auto(kSymmetric, Rational(0), 4, policy);
    CHECK(r.probabilities[0] == 1.0);
    CHECK(r.truncation_order == 0);
  }
  SUBCASE("exact and big-float paths agree at tau = 5") {
    PrecisionPolicy bigf = policy;
    bigf.mode = PrecisionMode::BigFloat;
    bigf.float_precision_bits = 128;
    auto a = evaluate_transient_auto(kSymmetric, Rational(5), 5, policy);
    auto b = evaluate_transient_auto(kSymmetric, Rational(5), 5, bigf);
    for (int k = 0; k <= 5; ++k)
      CHECK(a.probabilities[k] == doctest::Approx(b.probabilities[k]).epsilon(1e-9));
  }
  SUBCASE("explicit depth cap raises with depth and precision advice") {
    try {
      evaluate_transient_auto(kSymmetric, Rational(10), 5, policy, 120);
      FAIL("expected InsufficientDepth");
    } catch (const InsufficientDepth& e) {
      CHECK(e.recommended_depth > 1000);
      CHECK(e.recommended_bits > 64);
    }
  }
  SUBCASE("exact mode refuses the deep cancellation regime") {
    CHECK_THROWS_AS(evaluate_transient_auto(kSymmetric, Rational(10), 5, policy),
                    InsufficientDepth);
  }
}

TEST_CASE("series satisfies the rescaled master equations") {
  // Central-difference derivative of p(k, tau) against the right-hand side
  //   dp(0) = -p(0) + alpha^2 p(1)
  //   dp(k) = p(k-1)/k - b'_k p(k) + (k+1) alpha^2 p(k+1)
  // gamma = 2 here, so the majorant turns over only near order 180.
  auto p = make_params(1, 2);
  auto tri = build_l_triangle(p, 200);
  PrecisionPolicy policy;
  policy.target_tolerance = 1e-14;
  Rational h(1, 1000);
  for (Rational tau : {Rational(3, 10), Rational(1)}) {
    auto mid = evaluate_transient(tri, p, tau, 7, policy);
    auto lo = evaluate_transient(tri, p, tau - h, 7, policy);
    auto hi = evaluate_transient(tri, p, tau + h, 7, policy);
    for (int k = 0; k <= 6; ++k) {
      double deriv = (hi.probabilities[k] - lo.probabilities[k]) / (2 * to_double(h));
      double rhs;
      double asq = to_double(p.alpha_sq);
      if (k == 0)
        rhs = -mid.probabilities[0] + asq * mid.probabilities[1];
      else
        rhs = mid.probabilities[k - 1] / k -
              (1.0 / (1 + k) + k * asq) * mid.probabilities[k] +
              (k + 1) * asq * mid.probabilities[k + 1];
      CHECK(deriv == doctest::Approx(rhs).epsilon(1e-4));
    }
  }
}

TEST_CASE("tail_bound") {
  auto m = build_m_triangle(40);
  SUBCASE("zero tau") {
    CHECK(tail_bound(0, Rational(0), 5, m, kSymmetric) == 0.0);
    CHECK(tail_bound(3, Rational(0), 1, m, kSymmetric) == 0.0);
  }
  SUBCASE("tau = 1 certifies quickly") {
    double b = tail_bound(0, Rational(1), 25, m, kSymmetric);
    CHECK(b > 0);
    CHECK(b < 1e-9);
  }
  SUBCASE("tau = 10 is not monotone at small orders") {
    CHECK_THROWS_AS(tail_bound(0, Rational(10), 10, m, kSymmetric), InsufficientDepth);
  }
  SUBCASE("window past the built depth") {
    CHECK_THROWS_AS(tail_bound(0, Rational(1), 39, m, kSymmetric), InsufficientDepth);
  }
}

TEST_CASE("triangle cache round-trips and revalidates") {
  auto p = make_params(3, 2);
  auto tri = build_l_triangle(p, 12);
  std::stringstream buf;
  tri.save(buf);
  auto loaded = CoefficientTriangle::load(buf);
  CHECK(loaded.depth() == 12);
  CHECK(loaded.alpha_sq() == p.alpha_sq);
  for (int i = 0; i <= 12; ++i)
    for (int k = 0; k <= i; ++k) CHECK(loaded.at(i, k) == tri.at(i, k));

  SUBCASE("corrupted diagonal is rejected") {
    std::istringstream bad(
        R"({"kind":"L","alpha_sq":"1","depth":1,"rows":[["1"],["1","2"]]})");
    CHECK_THROWS(CoefficientTriangle::load(bad));
  }
  SUBCASE("negative entry is rejected") {
    std::istringstream bad(
        R"({"kind":"L","alpha_sq":"1","depth":1,"rows":[["1"],["-1","1"]]})");
    CHECK_THROWS(CoefficientTriangle::load(bad));
  }
  SUBCASE("depth mismatch is rejected") {
    std::istringstream bad(
        R"({"kind":"L","alpha_sq":"1","depth":3,"rows":[["1"],["1","1"]]})");
    CHECK_THROWS(CoefficientTriangle::load(bad));
  }
}
