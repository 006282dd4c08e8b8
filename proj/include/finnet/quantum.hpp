#pragma once

#include "finnet/network.hpp"
#include "finnet/types.hpp"

#include <string>
#include <vector>

namespace finnet {

// A = left * diag(coefficients) * right.transpose(), coefficients descending.
// Columns of left/right are orthonormal; right is already conjugated so that
// the pure state reads sum_k c_k |left_k> |right_k>.
struct SchmidtDecomposition {
  RealVector coefficients;
  Matrix left;
  Matrix right;
  int rank(double cutoff = tol::support_cutoff) const;
};

// Bipartite pure state; amplitude of |l>|r> sits at index l * dim_right + r.
class SourceState {
 public:
  SourceState(int dim_left, int dim_right, Vector amplitudes);

  int dim_left() const { return dim_left_; }
  int dim_right() const { return dim_right_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Matrix as_matrix() const;  // dim_left x dim_right
  const SchmidtDecomposition& schmidt() const { return schmidt_; }
  Matrix reduced_left() const;   // density matrix of the left end
  Matrix reduced_right() const;  // density matrix of the right end

 private:
  int dim_left_, dim_right_;
  Vector amplitudes_;
  SchmidtDecomposition schmidt_;
};

SchmidtDecomposition schmidt_decompose(const SourceState& state);

struct PartyPOVM {
  std::vector<std::string> outcome_labels;
  std::vector<Matrix> elements;
  int failure_index = -1;  // index of the failure outcome, -1 when absent

  int dim() const;
  int n_outcomes() const { return static_cast<int>(elements.size()); }
  bool has_failure() const { return failure_index >= 0; }
  Matrix conclusive_sum() const;  // sum of all non-failure elements
  // Throws std::invalid_argument unless all elements are Hermitian and PSD
  // (eigenvalues >= -psd_tol) and they sum to the identity within sum_tol.
  void check(double psd_tol = tol::psd, double sum_tol = tol::identity_sum) const;
};

struct QuantumNetworkModel {
  NetworkGraph graph;
  std::vector<SourceState> states;  // one per source; left end feeds the lower party
  std::vector<PartyPOVM> povms;     // one per party, acting on its edges in
                                    // ascending source order
  long dim_cap = kDefaultDimCap;

  // Structural and numerical validation; throws on violation. Quantum models
  // require bipartite sources.
  void check() const;
  std::vector<int> party_dims() const;
  long global_dim() const;
  // Dimension of party j's slot for a given attached source.
  int edge_dim(int source, int party) const;
};

struct Alphabet {
  std::vector<std::string> labels;
  int failure_index = -1;
  int size() const { return static_cast<int>(labels.size()); }
  bool has_failure() const { return failure_index >= 0; }
};

// Dense joint distribution over per-party outcome alphabets, row-major with
// party 0 slowest. Entries are clamped to [0, inf) on construction; raw values
// below -1e-12 or a total away from target_sum by more than 1e-10 are rejected.
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<Alphabet> alphabets, RealVector probabilities,
                      double target_sum = 1.0);

  int n_parties() const { return static_cast<int>(alphabets_.size()); }
  const std::vector<Alphabet>& alphabets() const { return alphabets_; }
  const Alphabet& alphabet(int party) const { return alphabets_[party]; }
  const RealVector& probabilities() const { return p_; }
  long size() const { return p_.size(); }

  long index_of(const std::vector<int>& outcome) const;
  std::vector<int> outcome_at(long index) const;
  double prob(const std::vector<int>& outcome) const { return p_[index_of(outcome)]; }
  double sum() const { return p_.sum(); }

 private:
  std::vector<Alphabet> alphabets_;
  RealVector p_;
};

OutcomeDistribution joint_distribution(const QuantumNetworkModel& model);

// Marginal over the given parties (ascending, duplicates rejected).
OutcomeDistribution marginal(const OutcomeDistribution& dist, std::vector<int> parties);

struct ConditionedDistribution {
  OutcomeDistribution dist;  // failure labels removed from every alphabet
  double success;            // probability of the all-conclusive event
};

// Restriction to all-conclusive outcomes, renormalized. Throws std::domain_error
// when the all-conclusive probability vanishes.
ConditionedDistribution conditional_on_conclusive(const OutcomeDistribution& dist);

}  // namespace finnet
