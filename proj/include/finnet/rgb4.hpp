#pragma once

#include "finnet/finner.hpp"
#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/types.hpp"

#include <string>

namespace finnet {

// Triangle network: parties A=0, B=1, C=2; sources 0={B,C}, 1={C,A}, 2={A,B}.
NetworkGraph triangle_graph();

// Three-party single-photon-style distribution over outcomes {0, 1_0, 1_1, 2}
// per party, parametrized by a splitting angle. Closed form; the quantum
// realization below reproduces it through the generic contraction path.
OutcomeDistribution rgb4_distribution(double theta);

// Triangle of (|01> + |10>)/sqrt(2) sources with the four-outcome measurement
// basis {|00>, u|0p 1n> + v|1p 0n>, orthogonal partner, |11>} per party, where
// p/n are the edges shared with the previous/next party around the cycle.
QuantumNetworkModel rgb4_realization(double theta);

// Certified single-round min-entropy radius (raw; may be negative).
double r_lower_bound(double theta);

// Entropy certificate at radius r; clamps r below 0, rejects r > 1/4.
double entropy_bound_L(double r);

struct RandomnessBoundReport {
  double theta = 0.0;
  double e_alpha = 0.0, e_beta = 0.0, e_gamma = 0.0;
  double r_raw = 0.0;
  double r_clamped = 0.0;
  double entropy_L = 0.0;
  double scaled_bound = 0.0;  // (1 - e_beta)(1 - e_gamma) L
  double naive_bound = 0.0;   // (1 - e_alpha)(1 - e_beta)(1 - e_gamma) L, the
                              // post-selection comparison factor
};

// Randomness of party A's coarse-grained output against sources beta and gamma
// failing. e_alpha only affects the comparison entry.
RandomnessBoundReport scaled_randomness_bound(double theta, double e_beta,
                                              double e_gamma, double e_alpha = 0.0);

struct FailingRGB4 {
  OutcomeDistribution dist;
  FinnerReport finner;
};

// Overlay of the distribution with per-source failures. Verifies internally
// that the inequality is saturated and that conditioning on all-conclusive
// recovers the ideal distribution.
FailingRGB4 failing_rgb4(double theta, const Eigen::Vector3d& e);

}  // namespace finnet
