#pragma once

#include "disq/model.hpp"

#include <cstdint>
#include <vector>

namespace disq {

// Finite generator on {0..K} with the up-rate zeroed at K (reflecting
// truncation keeps row sums 0, so the result stays a distribution and the
// truncation error shows up as boundary mass).
struct TruncatedGenerator {
  std::vector<double> up;    // up[k] = lambda_k, up[K] = 0
  std::vector<double> down;  // down[k] = mu_k, down[0] = 0

  int size() const { return static_cast<int>(up.size()); }  // K + 1 states
};

TruncatedGenerator make_generator(const BirthDeathRates& rates, int boundary);
TruncatedGenerator discouragement_generator(const ModelParams& p, int boundary);

struct UniformizationResult {
  std::vector<double> p;
  double boundary_mass = 0;  // probability of the reflecting state
  double poisson_tail = 0;   // neglected Poisson mass, <= requested epsilon
  int terms = 0;
};

// Transient law at time t starting from state 0, Poisson tail <= epsilon.
UniformizationResult transient_uniformization(const TruncatedGenerator& gen, double t,
                                              double epsilon);

enum class SimMode { Continuous, Embedded };

struct SimConfig {
  std::uint64_t seed = 0;
  long paths = 1;
  double t_end = 0;  // continuous mode
  int steps = 0;     // embedded mode
};

struct EmpiricalDistribution {
  std::vector<long> counts;
  long paths = 0;

  double p_hat(int k) const;
  // sqrt(p(1-p)/paths)
  double standard_error(int k) const;
};

// Deterministic given (seed, cfg): each path draws from its own substream
// derived from the master seed, so ordering cannot change the counts.
EmpiricalDistribution simulate_paths(const ModelParams& p, const SimConfig& cfg, SimMode mode);

// pi_k proportional to (lambda/mu)^k / (k!)^2, normalized over {0..k_max}.
// Errors out when the dropped tail exceeds 1e-15.
std::vector<double> stationary_distribution(const ModelParams& p, int k_max);

// Smallest boundary K in the doubling sequence whose boundary mass at time t
// stays below epsilon/10.
int choose_truncation(const ModelParams& p, double t, double epsilon);

}  // namespace disq
