#pragma once

#include "finnet/finner.hpp"
#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/types.hpp"

#include <vector>

namespace finnet {

// Local deterministic-response model over a (possibly hypergraph) network.
// Each source broadcasts a value drawn from its distribution; each party applies
// a deterministic table to the values it receives. Tables are flat row-major
// over the party's attached sources in ascending order, and hold either real
// response values (inequality work) or output label indices (distribution work).
struct ClassicalNetworkModel {
  NetworkGraph graph;
  std::vector<int> alphabet_sizes;          // per source
  std::vector<RealVector> source_dists;     // per source, entries sum to 1
  std::vector<RealVector> responses;        // per party

  void check() const;
  long response_index(int party, const std::vector<int>& source_values) const;
  long table_size(int party) const;
  // Number of joint source assignments; throws past the enumeration cap.
  long assignment_count() const;
};

struct ProductExpectation {
  double lhs = 0.0;                  // E[prod_j f_j]
  double rhs = 0.0;                  // prod_j ||f_j||_{1/x_j}
  std::vector<double> factor_norms;  // per party ||f_j||_{1/x_j}
};

// Exact enumeration of both sides of the weighted-norm product inequality.
// Weight x_j = 0 selects the essential sup norm over the party's input support.
ProductExpectation expect_product(const ClassicalNetworkModel& model,
                                  const RealVector& weights);

// lhs = P[every party outputs its target label], rhs = prod_j P_j^{x_j}.
FinnerReport finner_probability_check(const ClassicalNetworkModel& model,
                                      const std::vector<double>& target_labels,
                                      const RealVector& weights,
                                      double tol = 1e-10);

// Searches for per-source indicator functions phi_i with
// f_j = prod_{i -> j} phi_i for every party, as demanded by saturation of the
// probability form with perfect weights. Candidate phi_i(s) = 1 iff some joint
// assignment with all responses 1 uses value s at source i.
struct StructureReport {
  bool factors = false;
  std::vector<std::vector<int>> phi;  // per source, 0/1 per value
  int failing_party = -1;             // counterexample party when not factoring
  std::vector<int> counterexample;    // that party's received source values
};

StructureReport equality_structure_check(const ClassicalNetworkModel& model);

// Treats responses as label indices into the given alphabets and accumulates
// the exact joint outcome distribution.
OutcomeDistribution enumerate_distribution(const ClassicalNetworkModel& model,
                                           const std::vector<Alphabet>& alphabets);

}  // namespace finnet
