#include "finnet/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace finnet {

namespace {

void check_entries(const Eigen::MatrixXi& m) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("network: incidence matrix must be non-empty");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && m(i, j) != 1)
        throw std::invalid_argument("network: incidence entries must be 0 or 1");
}

}  // namespace

NetworkGraph::NetworkGraph(Eigen::MatrixXi incidence) : incidence_(std::move(incidence)) {
  check_entries(incidence_);
}

NetworkGraph::NetworkGraph(const std::vector<std::vector<int>>& sources, int n_parties) {
  if (sources.empty() || n_parties < 1)
    throw std::invalid_argument("network: need at least one source and one party");
  incidence_ = Eigen::MatrixXi::Zero(static_cast<int>(sources.size()), n_parties);
  for (int i = 0; i < static_cast<int>(sources.size()); ++i) {
    for (int j : sources[i]) {
      if (j < 0 || j >= n_parties)
        throw std::invalid_argument("network: party index out of range");
      incidence_(i, j) = 1;
    }
  }
  check_entries(incidence_);
}

std::vector<int> NetworkGraph::parties_of_source(int source) const {
  std::vector<int> out;
  for (int j = 0; j < n_parties(); ++j)
    if (incidence_(source, j)) out.push_back(j);
  return out;
}

std::vector<int> NetworkGraph::sources_of_party(int party) const {
  std::vector<int> out;
  for (int i = 0; i < n_sources(); ++i)
    if (incidence_(i, party)) out.push_back(i);
  return out;
}

int NetworkGraph::source_degree(int source) const {
  return incidence_.row(source).sum();
}

bool NetworkGraph::bipartite_sources() const {
  for (int i = 0; i < n_sources(); ++i)
    if (source_degree(i) != 2) return false;
  return true;
}

std::pair<int, int> NetworkGraph::source_ends(int source) const {
  if (source_degree(source) != 2)
    throw std::invalid_argument("network: source_ends requires a bipartite source");
  auto p = parties_of_source(source);
  return {p[0], p[1]};
}

ValidationReport validate(const NetworkGraph& graph) {
  ValidationReport report;
  const auto& m = graph.incidence();
  for (int i = 0; i < graph.n_sources(); ++i)
    if (m.row(i).sum() == 0)
      report.violations.push_back("source " + std::to_string(i) + " feeds no party");
  for (int j = 0; j < graph.n_parties(); ++j)
    if (m.col(j).sum() == 0)
      report.violations.push_back("party " + std::to_string(j) + " receives no source");
  for (int i = 0; i < graph.n_sources(); ++i) {
    for (int k = 0; k < graph.n_sources(); ++k) {
      if (i == k) continue;
      if (m.row(i).sum() == 0) continue;
      bool subset = true;
      for (int j = 0; j < graph.n_parties(); ++j)
        if (m(i, j) && !m(k, j)) { subset = false; break; }
      // report identical rows once, as the lower index contained in the higher
      if (subset && !(m.row(i) == m.row(k) && i > k))
        report.violations.push_back("source " + std::to_string(i) +
                                    "'s parties are contained in source " +
                                    std::to_string(k) + "'s");
    }
  }
  report.bipartite = graph.bipartite_sources();
  return report;
}

NetworkGraph dress_inputs(const std::vector<int>& n_settings_per_party) {
  const int k = static_cast<int>(n_settings_per_party.size());
  if (k < 1) throw std::invalid_argument("dress_inputs: need at least one party");
  for (int s : n_settings_per_party)
    if (s < 1) throw std::invalid_argument("dress_inputs: every party needs at least one setting");
  // parties 0..k-1 measure, parties k..2k-1 announce the settings
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(k + 1, 2 * k);
  for (int j = 0; j < k; ++j) m(0, j) = 1;
  for (int j = 0; j < k; ++j) {
    m(1 + j, j) = 1;
    m(1 + j, k + j) = 1;
  }
  NetworkGraph g(std::move(m));
  for (int j = 0; j < k; ++j) g.party_labels.push_back("A" + std::to_string(j));
  for (int j = 0; j < k; ++j) g.party_labels.push_back("X" + std::to_string(j));
  g.source_labels.push_back("S");
  for (int j = 0; j < k; ++j) g.source_labels.push_back("R" + std::to_string(j));
  return g;
}

FractionalIndependentSet half_weights(const NetworkGraph& graph) {
  if (!graph.bipartite_sources())
    throw std::invalid_argument("half_weights: requires bipartite sources");
  FractionalIndependentSet out;
  out.weights = RealVector::Constant(graph.n_parties(), 0.5);
  out.perfect = true;  // every bipartite source sees 0.5 + 0.5 = 1
  return out;
}

}  // namespace finnet
