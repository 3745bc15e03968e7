#pragma once

#include "disq/errors.hpp"
#include "disq/model.hpp"
#include "disq/triangle.hpp"

#include <string>
#include <vector>

namespace disq {

// b_k = 1/(k+1) + k * alpha^2
Rational b_coefficient(const ModelParams& p, int k);

// L^(k)_{i+1} = L^(k-1)_i + b_k L^(k)_i + alpha^2 L^(k+1)_i, row by row.
// The unit diagonal emerges from the recursion and is asserted, not imposed.
CoefficientTriangle build_l_triangle(const ModelParams& p, int depth);

// S^(k)_i = (-1)^(i-k) (alpha^2)^k L^(k)_i; the k = 0 row is r_i.
struct SeriesCoefficients {
  int k = 0;
  std::vector<Rational> terms;  // terms[i] = S^(k)_i, zero for i < k

  const Rational& at(int i) const { return terms.at(i); }
};

SeriesCoefficients s_coefficients(const CoefficientTriangle& l_tri, const ModelParams& p, int k);

struct RecursionReport {
  bool pass = true;
  int first_i = -1;
  int first_k = -1;
  std::string detail;
};

// Rebuilds the S-table two independent ways -- the stepwise recursion
// S^(k)_{i+1} = alpha^2 S^(k-1)_i - b_k S^(k)_i + S^(k+1)_i and the summed
// form S^(k)_{k+h+1} = sum_{i=0}^k alpha^(2(k-i)) [-b_i S^(i)_{i+h} + S^(i+1)_{i+h}]
// -- and checks both against the L-derived values, exactly.
RecursionReport check_dual_recursion(const CoefficientTriangle& l_tri, const ModelParams& p,
                                     int max_i);

struct TransientResult {
  double tau = 0;
  std::vector<double> probabilities;  // index k = 0..k_max
  int truncation_order = 0;
  std::vector<double> tail_bounds;
  PrecisionPolicy precision;
  unsigned working_precision_bits = 0;  // 0 on the exact-rational path
};

// p(k,tau) = (1/k!) sum_{i=k}^{N-1} (-1)^(i-k) (tau^i/i!) L^(k)_i with the
// truncation order N certified from the M-triangle majorant. Throws
// InsufficientDepth when the built depth cannot certify the tolerance.
TransientResult evaluate_transient(const CoefficientTriangle& l_tri, const ModelParams& p,
                                   const Rational& tau, int k_max, const PrecisionPolicy& policy);

// Self-contained evaluation that picks the truncation order from the streamed
// majorant and then streams the L-recursion row by row, never materializing a
// triangle. Small orders run on exact rationals; past kExactOrderLimit the
// coefficients cancel against entries with hundreds of digits, so the rows are
// carried in big floats whose precision is derived from the majorant sum (or
// policy.float_precision_bits if larger). max_depth = 0 means automatic; an
// explicit cap that cannot certify the tolerance raises InsufficientDepth
// carrying the recommended depth and precision.
inline constexpr int kExactOrderLimit = 1200;
TransientResult evaluate_transient_auto(const ModelParams& p, const Rational& tau, int k_max,
                                        const PrecisionPolicy& policy, int max_depth = 0);

// (1/k!) * (tau^from/from!) * M^(k)_from * gamma^(2(from-k)); valid once the
// majorant is non-increasing over the 5-term window starting at from_index.
double tail_bound(int k, const Rational& tau, int from_index, const CoefficientTriangle& m_tri,
                  const ModelParams& p);

// Smallest triangle depth able to certify tolerance eps at this tau
// (searched on the M-majorant by doubling, independent of any built L).
int required_depth(const ModelParams& p, const Rational& tau, double eps);

}  // namespace disq
