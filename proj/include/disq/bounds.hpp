#pragma once

#include "disq/model.hpp"
#include "disq/triangle.hpp"

#include <vector>

namespace disq {

// M^(k)_{i+1} = M^(k-1)_i + (1+k) M^(k)_i + M^(k+1)_i, integer entries.
CoefficientTriangle build_m_triangle(int depth);

// Column k = 0 of the M-triangle: 1, 1, 2, 5, 14, 43, ...
std::vector<Integer> bessel_numbers(int depth);

struct BoundReport {
  bool pass = true;
  int first_i = -1;
  int first_k = -1;
};

// L^(k)_i <= M^(k)_i * gamma^(2(i-k)), checked exactly for every entry.
BoundReport verify_bound(const CoefficientTriangle& l_tri, const CoefficientTriangle& m_tri,
                         const ModelParams& p);

struct AsymptoticEstimate {
  int i;
  double w_root;        // positive root of i + 2 = 2 w ln w
  double root_residual; // |i + 2 - 2 w ln w|
  double log_estimate;  // ln[(1/sqrt(2 pi i)) * w^(i+3) / (w!)^2]
  double log_crude;     // i * ln(i / (2 e ln i))
  double log_exact;     // ln B*_i, from the exact integer
  double estimate;      // exp(log_estimate); may overflow to inf for large i
  double crude;
  double normalized_root_ratio;  // (B*_i)^(1/i) * 2 e ln(i) / i
};

// i >= 3 required for each entry.
std::vector<AsymptoticEstimate> asymptotic_check(const std::vector<int>& i_values);

struct CertificateResult {
  bool ok = false;
  int order = -1;           // smallest certified truncation order
  int recommended_depth = -1;  // when !ok: estimated depth that would suffice
};

// Smallest N with (tau^N/N!) M^(0)_N gamma^(2N) < epsilon and the majorant
// non-increasing over the 5-term window starting at N.
CertificateResult convergence_certificate(const CoefficientTriangle& m_tri, double tau,
                                          double gamma, double epsilon);

// Streamed ln M^(k)_i for k < kLogMColumns, i <= depth (flat, row-major with
// stride kLogMColumns; -inf where k > i). The recursion row is carried in log
// space, so depths far beyond integer feasibility are cheap. Backed by a
// process-wide cache that only ever grows.
inline constexpr int kLogMColumns = 40;
std::vector<double> log_m_columns(int depth);

// Certificate on the streamed majorant, searching depth by doubling up to
// max_depth. Unlike the triangle-based variant this reaches the cancellation
// regime (tau = 10 certifies only past order ~4500).
CertificateResult streamed_certificate(double tau, double gamma, double epsilon, int max_depth);

}  // namespace disq
