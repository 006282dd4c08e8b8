#include "finnet/rgb4.hpp"

#include "finnet/failing.hpp"

#include <cmath>
#include <stdexcept>

namespace finnet {

namespace {

const std::vector<std::string> kLabels = {"0", "1_0", "1_1", "2"};
constexpr int kOut0 = 0, kOut10 = 1, kOut11 = 2, kOut2 = 3;

// next party around the cycle A -> B -> C -> A
constexpr int kNext[3] = {1, 2, 0};
constexpr int kPrev[3] = {2, 0, 1};

}  // namespace

NetworkGraph triangle_graph() {
  NetworkGraph g({{1, 2}, {0, 2}, {0, 1}}, 3);
  g.party_labels = {"A", "B", "C"};
  g.source_labels = {"alpha", "beta", "gamma"};
  return g;
}

namespace {

void check_theta(double theta) {
  constexpr double quarter_pi = 0.78539816339744830961;
  if (!(theta >= 0.0 && theta <= quarter_pi + 1e-12))
    throw std::invalid_argument("splitting angle must lie in [0, pi/4]");
}

}  // namespace

OutcomeDistribution rgb4_distribution(double theta) {
  check_theta(theta);
  const double u[2] = {std::cos(theta), std::sin(theta)};
  const double v[2] = {std::sin(theta), -std::cos(theta)};

  std::vector<Alphabet> alphabets(3, Alphabet{kLabels, -1});
  RealVector table = RealVector::Zero(64);
  const auto at = [&](int a, int b, int c) -> double& {
    return table[(a * 4 + b) * 4 + c];
  };

  // exactly one party reports a 1-outcome, the others report 0/2 with the
  // 0 on the next party and the 2 on the previous party (or swapped)
  for (int x = 0; x < 3; ++x) {
    for (int i = 0; i < 2; ++i) {
      int out_u[3], out_v[3];
      out_u[x] = out_v[x] = (i == 0) ? kOut10 : kOut11;
      out_u[kNext[x]] = kOut0;
      out_u[kPrev[x]] = kOut2;
      out_v[kNext[x]] = kOut2;
      out_v[kPrev[x]] = kOut0;
      at(out_u[0], out_u[1], out_u[2]) = u[i] * u[i] / 8.0;
      at(out_v[0], out_v[1], out_v[2]) = v[i] * v[i] / 8.0;
    }
  }
  // all three parties report 1-outcomes
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const double amp = u[i] * u[j] * u[k] + v[i] * v[j] * v[k];
        at(kOut10 + i, kOut10 + j, kOut10 + k) = amp * amp / 8.0;
      }
  return OutcomeDistribution(std::move(alphabets), std::move(table));
}

QuantumNetworkModel rgb4_realization(double theta) {
  check_theta(theta);
  const double u[2] = {std::cos(theta), std::sin(theta)};
  const double v[2] = {std::sin(theta), -std::cos(theta)};

  QuantumNetworkModel model;
  model.graph = triangle_graph();
  Vector pair = Vector::Zero(4);
  pair[1] = pair[2] = 1.0 / std::sqrt(2.0);  // (|01> + |10>)/sqrt(2)
  for (int i = 0; i < 3; ++i) model.states.emplace_back(2, 2, pair);

  for (int party = 0; party < 3; ++party) {
    // slots are (lower source index, higher source index); identify which slot
    // carries the edge shared with the previous party around the cycle
    const auto srcs = model.graph.sources_of_party(party);
    // source s connects the two parties other than s, so the edge between
    // parties x and y is source 3 - x - y
    const int prev_source = 3 - party - kPrev[party];
    const int slot_prev = (srcs[0] == prev_source) ? 0 : 1;
    const auto basis_vec = [&](double cp, double cn) {
      // amplitude cp on |1_prev 0_next>, cn on |0_prev 1_next>
      Vector m = Vector::Zero(4);
      const int idx_prev_one = (slot_prev == 0) ? 2 : 1;  // |10> vs |01> in slots
      const int idx_next_one = (slot_prev == 0) ? 1 : 2;
      m[idx_prev_one] = cp;
      m[idx_next_one] = cn;
      return m;
    };
    PartyPOVM povm;
    povm.outcome_labels = kLabels;
    povm.failure_index = -1;
    std::vector<Vector> basis(4, Vector::Zero(4));
    basis[kOut0][0] = 1.0;
    basis[kOut2][3] = 1.0;
    basis[kOut10] = basis_vec(v[0], u[0]);
    basis[kOut11] = basis_vec(v[1], u[1]);
    for (const Vector& b : basis)
      povm.elements.push_back(b * b.adjoint());
    model.povms.push_back(std::move(povm));
  }
  model.check();
  return model;
}

double r_lower_bound(double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  return 0.5 * s * s * s * (3.0 * c + std::cos(3.0 * theta) - 6.0 * s);
}

namespace {

double entropy_bits(double p) {
  return p > 0.0 ? -p * std::log2(p) : 0.0;
}

}  // namespace

double entropy_bound_L(double r) {
  if (r > 0.25 + 1e-12)
    throw std::invalid_argument("entropy_bound_L: radius exceeds 1/4");
  r = std::min(std::max(r, 0.0), 0.25);
  const double s = std::sqrt(4.0 * r);
  const double q = (1.0 + 4.0 * r) / 2.0;
  const double h2 = entropy_bits(q) + entropy_bits(1.0 - q);
  const double p1 = (1.0 + s) * (1.0 + s) / 4.0;
  const double p2 = (1.0 - s) * (1.0 - s) / 4.0;
  const double p3 = (1.0 - 4.0 * r) / 4.0;
  const double h4 = entropy_bits(p1) + entropy_bits(p2) + 2.0 * entropy_bits(p3);
  return 1.0 + h2 - h4;
}

RandomnessBoundReport scaled_randomness_bound(double theta, double e_beta,
                                              double e_gamma, double e_alpha) {
  for (double e : {e_alpha, e_beta, e_gamma})
    if (!(e >= 0.0 && e <= 1.0))
      throw std::invalid_argument("scaled_randomness_bound: failure probabilities in [0, 1]");
  RandomnessBoundReport report;
  report.theta = theta;
  report.e_alpha = e_alpha;
  report.e_beta = e_beta;
  report.e_gamma = e_gamma;
  report.r_raw = r_lower_bound(theta);
  report.r_clamped = std::max(report.r_raw, 0.0);
  report.entropy_L = entropy_bound_L(report.r_clamped);
  report.scaled_bound = (1.0 - e_beta) * (1.0 - e_gamma) * report.entropy_L;
  report.naive_bound =
      (1.0 - e_alpha) * (1.0 - e_beta) * (1.0 - e_gamma) * report.entropy_L;
  return report;
}

FailingRGB4 failing_rgb4(double theta, const Eigen::Vector3d& e) {
  const OutcomeDistribution ideal = rgb4_distribution(theta);
  const NetworkGraph graph = triangle_graph();
  OutcomeDistribution overlaid = overlay_distribution(ideal, graph, e);
  FinnerReport finner = finner_check(overlaid, graph, tol::analytic);
  if (std::abs(finner.slack) > tol::analytic)
    throw std::runtime_error("failing_rgb4: overlay does not saturate");
  if (finner.lhs > 0.0) {
    const ConditionedDistribution cond = conditional_on_conclusive(overlaid);
    const RealVector diff = cond.dist.probabilities() - ideal.probabilities();
    if (diff.cwiseAbs().maxCoeff() > 1e-10)
      throw std::runtime_error("failing_rgb4: conditioning does not recover the ideal");
  }
  return {std::move(overlaid), std::move(finner)};
}

}  // namespace finnet
