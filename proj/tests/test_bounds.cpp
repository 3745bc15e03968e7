#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "disq/bounds.hpp"
#include "disq/series.hpp"

using namespace disq;

TEST_CASE("M-triangle hand values") {
  auto m = build_m_triangle(5);
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(2, 0) == 2);
  CHECK(m.at(3, 0) == 5);
  CHECK(m.at(4, 0) == 14);
  CHECK(m.at(5, 0) == 43);
  CHECK(m.at(1, 1) == 1);
  CHECK(m.at(2, 1) == 3);
  CHECK(m.at(3, 1) == 9);
  for (int i = 0; i <= 5; ++i) CHECK(m.at(i, i) == 1);
}

TEST_CASE("bessel_numbers returns column 0") {
  auto b = bessel_numbers(5);
  CHECK(b == std::vector<Integer>{1, 1, 2, 5, 14, 43});
  CHECK(bessel_numbers(0) == std::vector<Integer>{1});
}

TEST_CASE("M entries are nonnegative integers and satisfy the column-0 recurrence") {
  auto m = build_m_triangle(200);
  for (int i = 0; i <= 200; ++i)
    for (int k = 0; k <= i; ++k) {
      CHECK(denominator(m.at(i, k)) == 1);
      CHECK(m.at(i, k) >= 0);
    }
  for (int i = 0; i < 200; ++i) CHECK(m.at(i + 1, 0) == m.at(i, 0) + m.at(i, 1));
}

TEST_CASE("L is bounded by M gamma^(2(i-k))") {
  auto m = build_m_triangle(60);
  for (auto asq : {Rational(1) / 2, Rational(1), Rational(2)}) {
    auto p = make_params(1, asq);
    auto l = build_l_triangle(p, 60);
    auto rep = verify_bound(l, m, p);
    INFO("alpha_sq = ", to_fraction_string(asq), " first violation at (", rep.first_i, ",",
         rep.first_k, ")");
    CHECK(rep.pass);
  }
  SUBCASE("depth mismatch is an error") {
    auto l = build_l_triangle(make_params(1, 1), 10);
    CHECK_THROWS(verify_bound(l, m, make_params(1, 1)));
  }
}

TEST_CASE("asymptotic root and band") {
  auto est = asymptotic_check({3, 100, 200, 500});
  CHECK(est[0].crude > 0);
  CHECK(std::isfinite(est[0].crude));
  for (const auto& a : est) {
    CHECK(a.root_residual <= 1e-12 * (a.i + 2));
    CHECK(2.0 * a.w_root * std::log(a.w_root) == doctest::Approx(a.i + 2.0));
  }
  // The crude formula drops sub-exponential factors that still contribute
  // close to a factor e at these sizes: the normalized root sits near 2.34 at
  // i = 100 and drifts down slowly (1.95 at i = 500, limit 1).
  CHECK(est[1].normalized_root_ratio > est[2].normalized_root_ratio);
  CHECK(est[2].normalized_root_ratio > est[3].normalized_root_ratio);
  CHECK(est[3].normalized_root_ratio > 0.5);
  CHECK(est[3].normalized_root_ratio < 2.0);
  // The refined estimate should track the true magnitude on a log scale.
  CHECK(est[1].log_estimate == doctest::Approx(est[1].log_exact).epsilon(0.05));

  CHECK_THROWS(asymptotic_check({2}));
}

TEST_CASE("convergence certificate") {
  auto m = build_m_triangle(60);
  SUBCASE("zero tau") {
    auto c = convergence_certificate(m, 0.0, 1.0, 1e-30);
    CHECK(c.ok);
    CHECK(c.order == 1);
  }
  SUBCASE("tau = 1, gamma = 1") {
    auto c = convergence_certificate(m, 1.0, 1.0, 1e-10);
    CHECK(c.ok);
    CHECK(c.order <= 30);
  }
  SUBCASE("tau = 5 needs a larger order but still certifies") {
    auto big = build_m_triangle(300);
    auto c1 = convergence_certificate(big, 1.0, 1.0, 1e-10);
    auto c5 = convergence_certificate(big, 5.0, 1.0, 1e-10);
    CHECK(c5.ok);
    CHECK(c5.order > c1.order);
  }
  SUBCASE("failure carries a recommendation") {
    // tau = 10 certifies only past order ~4500, far beyond exact-integer
    // triangles, so the recommendation is checked on the streamed majorant.
    auto c = convergence_certificate(m, 10.0, 1.0, 1e-10);
    CHECK(!c.ok);
    CHECK(c.recommended_depth > 1000);
    auto deep = streamed_certificate(10.0, 1.0, 1e-10, c.recommended_depth);
    CHECK(deep.ok);
    CHECK(deep.order <= c.recommended_depth - 10);
  }
}

TEST_CASE("streamed certificate matches the triangle certificate") {
  auto m = build_m_triangle(120);
  for (double tau : {0.5, 1.0, 2.0, 5.0}) {
    auto a = convergence_certificate(m, tau, 1.0, 1e-10);
    auto b = streamed_certificate(tau, 1.0, 1e-10, 120);
    CHECK(a.ok == b.ok);
    CHECK(a.order == b.order);
  }
  // gamma = 2 quadruples the effective tau, pushing the window past 120.
  auto deep = build_m_triangle(200);
  auto g2a = convergence_certificate(deep, 1.0, 2.0, 1e-10);
  auto g2b = streamed_certificate(1.0, 2.0, 1e-10, 200);
  CHECK(g2a.ok);
  CHECK(g2a.order == g2b.order);
}

TEST_CASE("streamed log-M columns agree with the exact integers") {
  auto cols = log_m_columns(60);
  auto m = build_m_triangle(60);
  for (int i = 0; i <= 60; ++i)
    for (int k = 0; k <= std::min(i, kLogMColumns - 1); ++k)
      CHECK(cols[i * kLogMColumns + k] ==
            doctest::Approx(log_abs(numerator(m.at(i, k)))).epsilon(1e-9));
}

TEST_CASE("majorant terms enter a decreasing window at the built depth") {
  // The decreasing regime starts near i = tau gamma^2 exp(tau gamma^2 / 2):
  // depth 400 covers gamma = 1 with tau up to 5 and gamma = 2 with tau = 1,
  // while tau = 10 turns over only near i = 1500, where exact integer
  // triangles are impractical and the streamed columns take over.
  auto m = build_m_triangle(400);
  auto log_term = [&](double tau, double gamma, int i) {
    return i * std::log(tau) + 2.0 * i * std::log(gamma) - std::lgamma(i + 1.0) +
           log_abs(numerator(m.at(i, 0)));
  };
  for (double tau : {1.0, 5.0})
    for (int i = 395; i < 400; ++i) CHECK(log_term(tau, 1.0, i + 1) < log_term(tau, 1.0, i));
  for (int i = 395; i < 400; ++i) CHECK(log_term(1.0, 2.0, i + 1) < log_term(1.0, 2.0, i));

  auto cols = log_m_columns(5000);
  auto lt10 = [&](int i) {
    return i * std::log(10.0) - std::lgamma(i + 1.0) + cols[i * kLogMColumns];
  };
  for (int i = 4995; i < 5000; ++i) CHECK(lt10(i + 1) < lt10(i));
}
