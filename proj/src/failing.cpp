#include "finnet/failing.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace finnet {

namespace {

void check_failure_vector(const NetworkGraph& graph, const RealVector& e) {
  if (graph.n_sources() > 20)
    throw dimension_error("failing: more than 20 sources");
  if (e.size() != graph.n_sources())
    throw std::invalid_argument("failing: one failure probability per source");
  for (int i = 0; i < e.size(); ++i)
    if (!(e[i] >= 0.0 && e[i] <= 1.0))
      throw std::invalid_argument("failing: failure probabilities must lie in [0, 1]");
}

}  // namespace

OutcomeDistribution overlay_distribution(const OutcomeDistribution& ideal,
                                         const NetworkGraph& graph,
                                         const RealVector& e) {
  check_failure_vector(graph, e);
  if (ideal.n_parties() != graph.n_parties())
    throw std::invalid_argument("overlay: party count mismatch");
  for (int j = 0; j < ideal.n_parties(); ++j)
    if (ideal.alphabet(j).has_failure())
      throw std::invalid_argument("overlay: ideal distribution already has failure labels");

  const int n_par = graph.n_parties();
  const int n_src = graph.n_sources();
  std::vector<Alphabet> alphabets;
  long out_size = 1;
  for (int j = 0; j < n_par; ++j) {
    Alphabet a = ideal.alphabet(j);
    a.failure_index = a.size();
    a.labels.push_back(kFailureLabel);
    out_size *= a.size();
    if (out_size > kEnumerationCap)
      throw dimension_error("overlay: table exceeds cap");
    alphabets.push_back(std::move(a));
  }

  // Marginals of the ideal distribution per surviving-party mask, cached since
  // several failure sets can silence the same parties.
  std::map<unsigned, RealVector> marginal_cache;
  const auto marginal_for = [&](unsigned survive_mask) -> const RealVector& {
    auto it = marginal_cache.find(survive_mask);
    if (it != marginal_cache.end()) return it->second;
    long msize = 1;
    for (int j = 0; j < n_par; ++j)
      if (survive_mask & (1u << j)) msize *= ideal.alphabet(j).size();
    RealVector m = RealVector::Zero(msize);
    for (long idx = 0; idx < ideal.size(); ++idx) {
      const auto full = ideal.outcome_at(idx);
      long sub = 0;
      for (int j = 0; j < n_par; ++j)
        if (survive_mask & (1u << j)) sub = sub * ideal.alphabet(j).size() + full[j];
      m[sub] += ideal.probabilities()[idx];
    }
    return marginal_cache.emplace(survive_mask, std::move(m)).first->second;
  };

  RealVector table = RealVector::Zero(out_size);
  for (unsigned fail_set = 0; fail_set < (1u << n_src); ++fail_set) {
    double weight = 1.0;
    for (int i = 0; i < n_src; ++i)
      weight *= (fail_set & (1u << i)) ? e[i] : 1.0 - e[i];
    if (weight == 0.0) continue;
    unsigned survive_mask = 0;
    for (int j = 0; j < n_par; ++j) {
      bool hit = false;
      for (int i : graph.sources_of_party(j))
        if (fail_set & (1u << i)) { hit = true; break; }
      if (!hit) survive_mask |= 1u << j;
    }
    const RealVector& m = marginal_for(survive_mask);
    // scatter the surviving marginal into the padded table
    std::vector<int> sub(n_par, 0);
    for (long midx = 0; midx < m.size(); ++midx) {
      long rem = midx;
      long out_idx = 0;
      for (int j = n_par - 1; j >= 0; --j) {
        if (survive_mask & (1u << j)) {
          sub[j] = static_cast<int>(rem % ideal.alphabet(j).size());
          rem /= ideal.alphabet(j).size();
        } else {
          sub[j] = alphabets[j].failure_index;
        }
      }
      for (int j = 0; j < n_par; ++j)
        out_idx = out_idx * alphabets[j].size() + sub[j];
      table[out_idx] += weight * m[midx];
    }
  }
  return OutcomeDistribution(std::move(alphabets), std::move(table));
}

QuantumNetworkModel flag_qubit_model(const QuantumNetworkModel& ideal,
                                     const RealVector& e,
                                     const std::vector<Vector>& junk_states) {
  ideal.check();
  check_failure_vector(ideal.graph, e);
  for (const PartyPOVM& p : ideal.povms)
    if (p.has_failure())
      throw std::invalid_argument("flag_qubit_model: ideal POVMs already have failure outcomes");
  if (!junk_states.empty() &&
      static_cast<int>(junk_states.size()) != ideal.graph.n_sources())
    throw std::invalid_argument("flag_qubit_model: one junk state per source expected");

  QuantumNetworkModel out;
  out.graph = ideal.graph;
  out.dim_cap = ideal.dim_cap;

  for (int i = 0; i < ideal.graph.n_sources(); ++i) {
    const SourceState& s = ideal.states[i];
    const int dl = s.dim_left(), dr = s.dim_right();
    Vector junk = Vector::Zero(static_cast<long>(dl) * dr);
    if (junk_states.empty()) {
      junk[0] = 1.0;
    } else {
      if (junk_states[i].size() != static_cast<long>(dl) * dr)
        throw std::invalid_argument("flag_qubit_model: junk state dimension mismatch");
      junk = junk_states[i].normalized();
    }
    // End layout is flag-major: index f * d + p.
    Vector amp = Vector::Zero(static_cast<long>(2 * dl) * (2 * dr));
    const double c_ok = std::sqrt(1.0 - e[i]);
    const double c_fail = std::sqrt(e[i]);
    for (int pl = 0; pl < dl; ++pl)
      for (int pr = 0; pr < dr; ++pr) {
        amp[static_cast<long>(dl + pl) * (2 * dr) + (dr + pr)] =
            c_ok * s.amplitudes()[static_cast<long>(pl) * dr + pr];
        amp[static_cast<long>(pl) * (2 * dr) + pr] =
            c_fail * junk[static_cast<long>(pl) * dr + pr];
      }
    out.states.emplace_back(2 * dl, 2 * dr, std::move(amp));
  }

  for (int j = 0; j < ideal.graph.n_parties(); ++j) {
    const PartyPOVM& p = ideal.povms[j];
    const auto srcs = ideal.graph.sources_of_party(j);
    std::vector<int> payload_dims;
    long new_dim = 1, pay_dim = 1;
    for (int i : srcs) {
      const int d = ideal.edge_dim(i, j);
      payload_dims.push_back(d);
      new_dim *= 2 * d;
      pay_dim *= d;
    }
    // Decode a new-space index into all-flags-set? and the payload index.
    const auto decode = [&](long idx, bool& all_ok, long& payload) {
      all_ok = true;
      payload = 0;
      for (std::size_t k = 0; k < payload_dims.size(); ++k) {
        long rest = idx;
        for (std::size_t m = payload_dims.size() - 1; m > k; --m)
          rest /= 2 * payload_dims[m];
        const long local = rest % (2 * payload_dims[k]);
        const int flag = static_cast<int>(local / payload_dims[k]);
        const int pay = static_cast<int>(local % payload_dims[k]);
        if (flag != 1) all_ok = false;
        payload = payload * payload_dims[k] + pay;
      }
    };

    PartyPOVM np;
    np.outcome_labels = p.outcome_labels;
    np.outcome_labels.push_back(kFailureLabel);
    np.failure_index = static_cast<int>(np.outcome_labels.size()) - 1;
    Matrix rest = Matrix::Identity(new_dim, new_dim);
    for (int a = 0; a < p.n_outcomes(); ++a) {
      Matrix m = Matrix::Zero(new_dim, new_dim);
      for (long r = 0; r < new_dim; ++r) {
        bool r_ok; long rp;
        decode(r, r_ok, rp);
        if (!r_ok) continue;
        for (long c = 0; c < new_dim; ++c) {
          bool c_ok; long cp;
          decode(c, c_ok, cp);
          if (!c_ok) continue;
          m(r, c) = p.elements[a](rp, cp);
        }
      }
      rest -= m;
      np.elements.push_back(std::move(m));
    }
    np.elements.push_back(std::move(rest));
    out.povms.push_back(std::move(np));
  }
  out.check();
  return out;
}

}  // namespace finnet
