#pragma once

#include "disq/rational.hpp"

#include <iosfwd>
#include <vector>

namespace disq {

enum class TriangleKind { L, M };

// Lower-triangular table of nonnegative rationals with unit diagonal,
// indexed (i, k) with 0 <= k <= i <= depth. Lookups outside the triangle
// (k > i or k < 0) give 0, matching the recursions' zero conventions.
class CoefficientTriangle {
 public:
  CoefficientTriangle(TriangleKind kind, Rational alpha_sq,
                      std::vector<std::vector<Rational>> rows);

  TriangleKind kind() const { return kind_; }
  int depth() const { return static_cast<int>(rows_.size()) - 1; }
  const Rational& alpha_sq() const { return alpha_sq_; }

  Rational at(int i, int k) const;

  // Cache format: {"kind": "L", "alpha_sq": "p/q", "depth": N,
  //                "rows": [["1"], ["1","1"], ...]}
  // The loader revalidates the diagonal and nonnegativity invariants.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static CoefficientTriangle load(std::istream& in);
  static CoefficientTriangle load_file(const std::string& path);

 private:
  TriangleKind kind_;
  Rational alpha_sq_;
  std::vector<std::vector<Rational>> rows_;
};

}  // namespace disq
