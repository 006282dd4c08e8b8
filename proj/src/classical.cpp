#include "finnet/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace finnet {

namespace {

// Odometer over the value tuple of an ascending source subset.
struct SubsetIterator {
  std::vector<int> sources;
  std::vector<int> values;
  const std::vector<int>* sizes;
  bool done = false;

  SubsetIterator(std::vector<int> srcs, const std::vector<int>& alphabet_sizes)
      : sources(std::move(srcs)), values(sources.size(), 0), sizes(&alphabet_sizes) {}

  bool next() {
    for (int k = static_cast<int>(sources.size()) - 1; k >= 0; --k) {
      if (++values[k] < (*sizes)[sources[k]]) return true;
      values[k] = 0;
    }
    done = true;
    return false;
  }

  double weight(const std::vector<RealVector>& dists) const {
    double w = 1.0;
    for (std::size_t k = 0; k < sources.size(); ++k)
      w *= dists[sources[k]][values[k]];
    return w;
  }
};

std::vector<int> all_sources(const NetworkGraph& g) {
  std::vector<int> out(g.n_sources());
  for (int i = 0; i < g.n_sources(); ++i) out[i] = i;
  return out;
}

}  // namespace

void ClassicalNetworkModel::check() const {
  const ValidationReport report = validate(graph);
  if (!report.valid())
    throw std::invalid_argument("classical: invalid network: " + report.violations.front());
  if (static_cast<int>(alphabet_sizes.size()) != graph.n_sources() ||
      static_cast<int>(source_dists.size()) != graph.n_sources())
    throw std::invalid_argument("classical: one alphabet and distribution per source");
  for (int i = 0; i < graph.n_sources(); ++i) {
    if (alphabet_sizes[i] < 1)
      throw std::invalid_argument("classical: empty source alphabet");
    if (source_dists[i].size() != alphabet_sizes[i])
      throw std::invalid_argument("classical: distribution size mismatch");
    if (source_dists[i].minCoeff() < 0 ||
        std::abs(source_dists[i].sum() - 1.0) > 1e-10)
      throw std::invalid_argument("classical: source distribution not normalized");
  }
  if (static_cast<int>(responses.size()) != graph.n_parties())
    throw std::invalid_argument("classical: one response table per party");
  for (int j = 0; j < graph.n_parties(); ++j)
    if (responses[j].size() != table_size(j))
      throw std::invalid_argument("classical: response table size mismatch");
  assignment_count();
}

long ClassicalNetworkModel::table_size(int party) const {
  long size = 1;
  for (int i : graph.sources_of_party(party)) {
    size *= alphabet_sizes[i];
    if (size > kEnumerationCap)
      throw dimension_error("classical: response table exceeds cap");
  }
  return size;
}

long ClassicalNetworkModel::response_index(int party,
                                           const std::vector<int>& source_values) const {
  const auto srcs = graph.sources_of_party(party);
  if (srcs.size() != source_values.size())
    throw std::invalid_argument("classical: received-value arity mismatch");
  long idx = 0;
  for (std::size_t k = 0; k < srcs.size(); ++k)
    idx = idx * alphabet_sizes[srcs[k]] + source_values[k];
  return idx;
}

long ClassicalNetworkModel::assignment_count() const {
  long count = 1;
  for (int i = 0; i < graph.n_sources(); ++i) {
    count *= alphabet_sizes[i];
    if (count > kEnumerationCap)
      throw dimension_error("classical: joint assignment count exceeds cap");
  }
  return count;
}

namespace {

// Response value of a party given a full assignment iterator over all sources.
double response_at(const ClassicalNetworkModel& model, int party,
                   const std::vector<int>& full_values) {
  const auto srcs = model.graph.sources_of_party(party);
  long idx = 0;
  for (int i : srcs) idx = idx * model.alphabet_sizes[i] + full_values[i];
  return model.responses[party][idx];
}

}  // namespace

ProductExpectation expect_product(const ClassicalNetworkModel& model,
                                  const RealVector& weights) {
  model.check();
  if (weights.size() != model.graph.n_parties())
    throw std::invalid_argument("expect_product: one weight per party");
  for (int j = 0; j < weights.size(); ++j)
    if (weights[j] < 0.0 || weights[j] > 1.0)
      throw std::invalid_argument("expect_product: weights must lie in [0, 1]");

  ProductExpectation out;
  // lhs: joint enumeration
  SubsetIterator it(all_sources(model.graph), model.alphabet_sizes);
  do {
    double term = it.weight(model.source_dists);
    if (term == 0.0) continue;
    for (int j = 0; j < model.graph.n_parties(); ++j)
      term *= response_at(model, j, it.values);
    out.lhs += term;
  } while (it.next());

  // rhs: per-party norms over that party's input marginal
  out.rhs = 1.0;
  for (int j = 0; j < model.graph.n_parties(); ++j) {
    const double x = weights[j];
    SubsetIterator jt(model.graph.sources_of_party(j), model.alphabet_sizes);
    double norm = 0.0;
    if (x == 0.0) {
      do {
        if (jt.weight(model.source_dists) > 0.0)
          norm = std::max(norm, std::abs(model.responses[j][model.response_index(j, jt.values)]));
      } while (jt.next());
    } else {
      do {
        const double w = jt.weight(model.source_dists);
        if (w == 0.0) continue;
        norm += w * std::pow(std::abs(model.responses[j][model.response_index(j, jt.values)]),
                             1.0 / x);
      } while (jt.next());
      norm = std::pow(norm, x);
    }
    out.factor_norms.push_back(norm);
    out.rhs *= norm;
  }
  return out;
}

FinnerReport finner_probability_check(const ClassicalNetworkModel& model,
                                      const std::vector<double>& target_labels,
                                      const RealVector& weights, double tol) {
  model.check();
  if (static_cast<int>(target_labels.size()) != model.graph.n_parties())
    throw std::invalid_argument("finner_probability_check: one target per party");
  if (weights.size() != model.graph.n_parties())
    throw std::invalid_argument("finner_probability_check: one weight per party");

  FinnerReport report;
  report.tol = tol;
  SubsetIterator it(all_sources(model.graph), model.alphabet_sizes);
  do {
    const double w = it.weight(model.source_dists);
    if (w == 0.0) continue;
    bool match = true;
    for (int j = 0; j < model.graph.n_parties() && match; ++j)
      match = response_at(model, j, it.values) == target_labels[j];
    if (match) report.lhs += w;
  } while (it.next());

  report.marginals = RealVector::Zero(model.graph.n_parties());
  report.rhs = 1.0;
  for (int j = 0; j < model.graph.n_parties(); ++j) {
    SubsetIterator jt(model.graph.sources_of_party(j), model.alphabet_sizes);
    double pj = 0.0;
    do {
      if (model.responses[j][model.response_index(j, jt.values)] == target_labels[j])
        pj += jt.weight(model.source_dists);
    } while (jt.next());
    report.marginals[j] = pj;
    report.rhs *= std::pow(pj, weights[j]);
  }
  report.slack = report.rhs - report.lhs;
  report.saturated = std::abs(report.slack) <= tol;
  return report;
}

StructureReport equality_structure_check(const ClassicalNetworkModel& model) {
  model.check();
  for (int j = 0; j < model.graph.n_parties(); ++j)
    for (long t = 0; t < model.responses[j].size(); ++t)
      if (model.responses[j][t] != 0.0 && model.responses[j][t] != 1.0)
        throw std::invalid_argument("equality_structure_check: responses must be 0/1");

  StructureReport report;
  report.phi.resize(model.graph.n_sources());
  for (int i = 0; i < model.graph.n_sources(); ++i)
    report.phi[i].assign(model.alphabet_sizes[i], 0);

  SubsetIterator it(all_sources(model.graph), model.alphabet_sizes);
  do {
    bool all_ones = true;
    for (int j = 0; j < model.graph.n_parties() && all_ones; ++j)
      all_ones = response_at(model, j, it.values) == 1.0;
    if (all_ones)
      for (int i = 0; i < model.graph.n_sources(); ++i)
        report.phi[i][it.values[i]] = 1;
  } while (it.next());

  for (int j = 0; j < model.graph.n_parties(); ++j) {
    const auto srcs = model.graph.sources_of_party(j);
    SubsetIterator jt(srcs, model.alphabet_sizes);
    do {
      int prod = 1;
      for (std::size_t k = 0; k < srcs.size(); ++k)
        prod &= report.phi[srcs[k]][jt.values[k]];
      const double f = model.responses[j][model.response_index(j, jt.values)];
      if (f != static_cast<double>(prod)) {
        report.factors = false;
        report.failing_party = j;
        report.counterexample = jt.values;
        return report;
      }
    } while (jt.next());
  }
  report.factors = true;
  return report;
}

OutcomeDistribution enumerate_distribution(const ClassicalNetworkModel& model,
                                           const std::vector<Alphabet>& alphabets) {
  model.check();
  if (static_cast<int>(alphabets.size()) != model.graph.n_parties())
    throw std::invalid_argument("enumerate_distribution: one alphabet per party");
  long size = 1;
  for (const Alphabet& a : alphabets) {
    size *= a.size();
    if (size > kEnumerationCap)
      throw dimension_error("enumerate_distribution: table exceeds cap");
  }
  RealVector table = RealVector::Zero(size);
  SubsetIterator it(all_sources(model.graph), model.alphabet_sizes);
  do {
    const double w = it.weight(model.source_dists);
    if (w == 0.0) continue;
    long idx = 0;
    for (int j = 0; j < model.graph.n_parties(); ++j) {
      const double r = response_at(model, j, it.values);
      const int label = static_cast<int>(std::lround(r));
      if (label < 0 || label >= alphabets[j].size() || label != r)
        throw std::invalid_argument("enumerate_distribution: response is not a label index");
      idx = idx * alphabets[j].size() + label;
    }
    table[idx] += w;
  } while (it.next());
  return OutcomeDistribution(alphabets, std::move(table));
}

}  // namespace finnet
