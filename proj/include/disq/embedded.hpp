#pragma once

#include "disq/model.hpp"

#include <vector>

namespace disq {

// Exact transient law of the jump chain started at 0: p[n][k] = P(X_n = k).
struct EmbeddedTable {
  int n_max = 0;
  std::vector<std::vector<Rational>> p;  // p[n] holds k = 0..n
  std::vector<Rational> up;              // alpha_k = lambda_k/(lambda_k+mu_k)

  Rational at(int n, int k) const;
};

// p_{n+1,k} = alpha_{k-1} p_{n,k-1} + (1 - alpha_{k+1}) p_{n,k+1},
// p_{0,0} = 1, state 0 always jumps up.
// Needs rates for k = 0..n_max+1.
EmbeddedTable embedded_recursion(const BirthDeathRates& rates, int n_max);

struct ClosedFormTables {
  std::vector<Rational> d;               // d[k] = prod_{i<k} alpha_i
  std::vector<std::vector<Rational>> T;  // T[h][k]
};

struct ClosedFormResult {
  ClosedFormTables tables;
  EmbeddedTable table;
};

// p_{n,k} = d_k T_{(n-k)/2,k} for n+k even, with
// T_{h,k} = sum_{l=0}^k alpha_l (1 - alpha_{l+1}) T_{h-1,l+1}, T_{0,k} = 1.
// Needs rates for k = 0..n_max + n_max/2 + 1.
ClosedFormResult closed_form(const BirthDeathRates& rates, int n_max);

// Discouragement specialization: alpha_k = 1/(1 + k(k+1) alpha^2). Builds
// the preset rates, cross-checks d_k against prod_{i=0}^k 1/(1+i(i-1)alpha^2)
// and delegates to closed_form.
ClosedFormResult discouragement_embedded(const ModelParams& p, int n_max);

// True iff every entry with n+k odd is exactly zero.
bool parity_check(const EmbeddedTable& t);

// True iff every row sums exactly to 1.
bool normalization_check(const EmbeddedTable& t);

}  // namespace disq
