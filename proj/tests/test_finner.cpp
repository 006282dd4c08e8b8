#include "finnet/finner.hpp"

#include <doctest.h>

#include "finnet/failing.hpp"
#include "test_support.hpp"

#include <cmath>
#include <vector>

using namespace finnet;

namespace {

QuantumNetworkModel bell_pair_model() {
  QuantumNetworkModel model;
  model.graph = NetworkGraph({{0, 1}}, 2);
  Vector amp = Vector::Zero(4);
  amp[0] = amp[3] = 1.0 / std::sqrt(2.0);
  model.states.emplace_back(2, 2, std::move(amp));
  for (int j = 0; j < 2; ++j) {
    PartyPOVM povm;
    povm.outcome_labels = {"0", "1"};
    povm.elements = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    povm.elements[0](0, 0) = 1.0;
    povm.elements[1](1, 1) = 1.0;
    model.povms.push_back(std::move(povm));
  }
  return model;
}

OutcomeDistribution two_party_failure_dist(double p00, double p0f, double pf0,
                                           double pff) {
  Alphabet a;
  a.labels = {"0", kFailureLabel};
  a.failure_index = 1;
  RealVector p(4);
  p << p00, p0f, pf0, pff;
  return OutcomeDistribution({a, a}, p);
}

}  // namespace

TEST_CASE("scorecard on crafted two-party distributions") {
  const NetworkGraph graph({{0, 1}}, 2);
  SUBCASE("correlated failures saturate") {
    const FinnerReport r = finner_check(two_party_failure_dist(0.5, 0, 0, 0.5), graph);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.saturated);
    REQUIRE(r.implied_e_defined.size() == 1);
    CHECK(r.implied_e_defined[0]);
    CHECK(r.implied_e[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("anticorrelated failures leave slack and an undefined rate") {
    const FinnerReport r = finner_check(two_party_failure_dist(0, 0.5, 0.5, 0), graph);
    CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_FALSE(r.saturated);
    CHECK(r.slack == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_FALSE(r.implied_e_defined[0]);
    CHECK(std::isnan(r.implied_e[0]));
  }
  SUBCASE("failure-free distributions sit exactly at equality") {
    const FinnerReport r =
        finner_check(joint_distribution(bell_pair_model()), graph);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.implied_e[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("input validation") {
    const OutcomeDistribution d = two_party_failure_dist(0.5, 0, 0, 0.5);
    CHECK_THROWS_AS(finner_check(d, NetworkGraph({{0, 1, 2}}, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(finner_check(d, NetworkGraph({{0, 1}, {1, 2}}, 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("independent failure overlays saturate and reveal their rates") {
  SplitMix64 rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkGraph graph = testutil::random_bipartite_graph(rng, 4, 4);
    const OutcomeDistribution ideal = testutil::random_distribution(rng, graph, 2);
    RealVector e(graph.n_sources());
    for (int i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.0, 0.9);
    const FinnerReport r =
        finner_check(overlay_distribution(ideal, graph, e), graph);
    CHECK(std::abs(r.slack) <= 1e-12);
    CHECK(r.saturated);
    for (int i = 0; i < graph.n_sources(); ++i) {
      REQUIRE(r.implied_e_defined[i]);
      CHECK(r.implied_e[i] == doctest::Approx(e[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("rigidity certificate for the flagged correlated pair") {
  const QuantumNetworkModel flagged =
      flag_qubit_model(bell_pair_model(), RealVector::Constant(1, 0.36));
  const RigidityVerdict v = rigidity_verify(flagged);
  REQUIRE(v.rigid);
  for (const auto& pc : v.parties) {
    CHECK(pc.projector);
    CHECK(pc.commutes);
    CHECK(pc.factorizes);
  }
  REQUIRE(v.sources.size() == 1);
  CHECK(v.sources[0].ends_match);
  CHECK(v.sources[0].diagonal_ok);
  CHECK(v.sources[0].e_consistent);
  CHECK(v.sources[0].e_structure == doctest::Approx(0.36).epsilon(1e-10));
  CHECK(v.sources[0].e_distribution == doctest::Approx(0.36).epsilon(1e-10));
}

TEST_CASE("rigidity is covariant under payload basis changes") {
  SplitMix64 rng(82);
  for (int trial = 0; trial < 5; ++trial) {
    QuantumNetworkModel ideal = bell_pair_model();
    const Matrix ua = testutil::random_unitary(rng, 2);
    const Matrix ub = testutil::random_unitary(rng, 2);
    const Matrix rotated = ua * ideal.states[0].as_matrix() * ub.transpose();
    Vector amp(4);
    for (int l = 0; l < 2; ++l)
      for (int r = 0; r < 2; ++r) amp[l * 2 + r] = rotated(l, r);
    ideal.states[0] = SourceState(2, 2, std::move(amp));
    for (Matrix& m : ideal.povms[0].elements) m = ua * m * ua.adjoint();
    for (Matrix& m : ideal.povms[1].elements) m = ub * m * ub.adjoint();

    const double e = rng.uniform(0.05, 0.7);
    const RigidityVerdict v =
        rigidity_verify(flag_qubit_model(ideal, RealVector::Constant(1, e)));
    CHECK(v.rigid);
    CHECK(v.sources[0].e_structure == doctest::Approx(e).epsilon(1e-9));
  }
}

TEST_CASE("rigidity holds across random flagged networks") {
  SplitMix64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    testutil::ModelSpec spec;
    spec.max_dim = 2;
    const QuantumNetworkModel base = testutil::random_model(rng, spec);
    RealVector e(base.graph.n_sources());
    for (int i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.0, 0.7);
    const QuantumNetworkModel flagged = flag_qubit_model(base, e);
    const RigidityVerdict v = rigidity_verify(flagged);
    REQUIRE(v.rigid);
    for (int i = 0; i < e.size(); ++i)
      CHECK(v.sources[i].e_structure == doctest::Approx(e[i]).epsilon(1e-9));
  }
}

TEST_CASE("flag decorrelation breaks saturation by a quantifiable margin") {
  const double e = 0.36, eps = 0.05;
  QuantumNetworkModel flagged =
      flag_qubit_model(bell_pair_model(), RealVector::Constant(1, e));
  flagged.states[0] = testutil::decorrelate_flags(flagged.states[0], 2, 2, eps);
  flagged.check();

  const FinnerReport r = finner_check(joint_distribution(flagged), flagged.graph);
  const double s2 = std::sin(eps) * std::sin(eps);
  const double expected_slack =
      std::sqrt((1.0 - e) * (1.0 - e + e * s2)) - (1.0 - e);
  CHECK(r.slack == doctest::Approx(expected_slack).epsilon(1e-9));
  CHECK(r.slack > 1e-4);
  CHECK_FALSE(rigidity_verify(flagged).rigid);
}

TEST_CASE("generic noisy models are not certified") {
  SplitMix64 rng(84);
  testutil::ModelSpec spec;
  spec.max_dim = 2;
  spec.failure_outcome = true;
  const QuantumNetworkModel model = testutil::random_model(rng, spec);
  const RigidityVerdict v = rigidity_verify(model);
  CHECK_FALSE(v.rigid);
  bool some_failure = false;
  for (const auto& pc : v.parties)
    some_failure = some_failure || !pc.projector || !pc.commutes || !pc.factorizes;
  for (const auto& sc : v.sources)
    some_failure =
        some_failure || !sc.ends_match || !sc.diagonal_ok || !sc.e_consistent;
  CHECK(some_failure);
}

TEST_CASE("local-variable witness chain on random models") {
  SplitMix64 rng(85);
  for (int trial = 0; trial < 20; ++trial) {
    testutil::ModelSpec spec;
    spec.max_dim = 2;
    spec.failure_outcome = (trial % 2 == 0);
    const QuantumNetworkModel model = testutil::random_model(rng, spec);
    const GOracleReport g = g_oracle(model);
    CHECK(g.identities_ok);
    REQUIRE(g.links.size() == 4);
    for (const auto& link : g.links) CHECK(link.slack >= -1e-10);

    const FinnerReport fr = finner_check(joint_distribution(model), model.graph);
    CHECK(g.p_all == doctest::Approx(fr.lhs).epsilon(1e-10));
    for (int j = 0; j < model.graph.n_parties(); ++j)
      CHECK(g.tr_rho_m[j] == doctest::Approx(fr.marginals[j]).epsilon(1e-10));
  }
}

TEST_CASE("every link is tight on flagged models") {
  SplitMix64 rng(86);
  testutil::ModelSpec spec;
  spec.max_dim = 2;
  spec.max_sources = 2;
  for (int trial = 0; trial < 5; ++trial) {
    const QuantumNetworkModel base = testutil::random_model(rng, spec);
    RealVector e(base.graph.n_sources());
    for (int i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.1, 0.6);
    const GOracleReport g = g_oracle(flag_qubit_model(base, e), 1e-9);
    CHECK(g.phase_aligned);
    for (const auto& link : g.links) CHECK(link.tight);
  }
}

TEST_CASE("single-outcome targets give the per-outcome bound") {
  const QuantumNetworkModel model = bell_pair_model();
  const GOracleReport g = g_oracle(model, {{0}, {0}});
  const OutcomeDistribution dist = joint_distribution(model);
  CHECK(g.p_all == doctest::Approx(dist.prob({0, 0})).epsilon(1e-12));
  CHECK(g.tr_rho_m[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& link : g.links) CHECK(link.slack >= -1e-12);
  // P(0,0) = 1/2 = sqrt(P_A(0) P_B(0)): the endpoint bound is saturated here
  CHECK(g.links.back().rhs == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(g_oracle(model, {{0}, {7}}), std::invalid_argument);
  CHECK_THROWS_AS(g_oracle(model, {{0}}), std::invalid_argument);
}
