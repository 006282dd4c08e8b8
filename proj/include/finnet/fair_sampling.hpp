#pragma once

#include "finnet/quantum.hpp"
#include "finnet/types.hpp"

#include <vector>

namespace finnet {

// Splits an operator on a tensor product into one factor per slot, peeling
// slots left to right with an operator-Schmidt rank test. On success all
// factors except the first have unit operator norm and a phase gauge making
// the dominant entry of each non-leading factor real positive; the scalar
// residue sits in the first factor.
struct ProductTestResult {
  bool is_product = false;
  std::vector<Matrix> factors;
  int failing_cut = -1;           // slot index of the first failing bipartition
  double second_singular = 0.0;   // at the failing cut, or the worst cut passed
};

ProductTestResult product_test(const Matrix& op, const std::vector<int>& dims,
                               double tol = tol::analytic);

// Per-party certificate extracted by the post-selection transform.
struct FairSamplingDecomposition {
  std::vector<Matrix> filters;              // per edge: PSD, operator norm <= 1
  std::vector<Matrix> conclusive_elements;  // transformed conclusive POVM
  Matrix support_projector;                 // support of the conclusive sum
};

struct PostselectResult {
  QuantumNetworkModel filtered;    // filtered states, conclusive-only POVMs
  RealVector source_weights;       // per source: squared filtered norm; the
                                   // product is P[all parties conclusive]
  std::vector<FairSamplingDecomposition> decompositions;  // per party
};

// Requires every party's conclusive sum to factor into per-edge filters
// (fair-sampling form). Throws fair_sampling_error when a conclusive sum is
// entangling across edges, zero, or kills some source state.
PostselectResult postselect_transform(const QuantumNetworkModel& model,
                                      double tol = tol::analytic);

// Hermitian square root and pseudo-inverse square root with spectral floor.
Matrix sqrt_psd(const Matrix& m, double floor = tol::support_cutoff);
Matrix pinv_sqrt_psd(const Matrix& m, double floor = tol::support_cutoff);

}  // namespace finnet
