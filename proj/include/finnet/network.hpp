#pragma once

#include "finnet/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace finnet {

// Hypergraph of sources (rows) feeding parties (columns); entries are 0/1.
class NetworkGraph {
 public:
  NetworkGraph() : incidence_(0, 0) {}
  explicit NetworkGraph(Eigen::MatrixXi incidence);
  NetworkGraph(const std::vector<std::vector<int>>& sources, int n_parties);

  int n_sources() const { return static_cast<int>(incidence_.rows()); }
  int n_parties() const { return static_cast<int>(incidence_.cols()); }
  const Eigen::MatrixXi& incidence() const { return incidence_; }

  std::vector<int> parties_of_source(int source) const;  // ascending
  std::vector<int> sources_of_party(int party) const;    // ascending
  int source_degree(int source) const;

  // True when every source feeds exactly two parties.
  bool bipartite_sources() const;
  // Bipartite sources only: the two attached parties as (low, high).
  std::pair<int, int> source_ends(int source) const;

  std::vector<std::string> party_labels;   // optional decoration
  std::vector<std::string> source_labels;  // optional decoration

 private:
  Eigen::MatrixXi incidence_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool bipartite = false;
  bool valid() const { return violations.empty(); }
};

// Per-party weights x_j; "perfect" means every source's attached weights sum to 1.
struct FractionalIndependentSet {
  RealVector weights;
  bool perfect = false;
};

// Checks: every source feeds >= 1 party, every party is fed by >= 1 source,
// no source's party set is contained in another source's party set.
ValidationReport validate(const NetworkGraph& graph);

// Dressed network for a k-party Bell scenario: one source feeding all measuring
// parties, plus one randomness source per measuring party feeding that party
// and a dedicated announcing party. Entries of n_settings_per_party must be >= 1.
NetworkGraph dress_inputs(const std::vector<int>& n_settings_per_party);

// The all-1/2 weights; requires bipartite sources.
FractionalIndependentSet half_weights(const NetworkGraph& graph);

}  // namespace finnet
