// Acceptance gate: one self-contained check per release criterion. Each
// criterion prints exactly one PASS/FAIL line with the measured numbers; the
// process exit code is the number of failed criteria. All tolerances are
// pinned here as named constants.

#include "finnet/classical.hpp"
#include "finnet/failing.hpp"
#include "finnet/fair_sampling.hpp"
#include "finnet/finner.hpp"
#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/rgb4.hpp"
#include "finnet/spdc.hpp"
#include "finnet/types.hpp"

#include "fock_oracle.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace finnet;

constexpr std::uint64_t kSeedBase = 20240801;

struct Criterion {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

double wall_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

QuantumNetworkModel random_pair_model(SplitMix64& rng) {
  QuantumNetworkModel model;
  model.graph = NetworkGraph({{0, 1}}, 2);
  Vector amp = Vector::Zero(4);
  amp[0] = amp[3] = 1.0 / std::sqrt(2.0);
  const Matrix ua = testutil::random_unitary(rng, 2);
  const Matrix ub = testutil::random_unitary(rng, 2);
  Matrix a(2, 2);
  a << amp[0], amp[1], amp[2], amp[3];
  const Matrix rotated = ua * a * ub.transpose();
  Vector ramp(4);
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r < 2; ++r) ramp[l * 2 + r] = rotated(l, r);
  model.states.emplace_back(2, 2, std::move(ramp));
  for (const Matrix& u : {ua, ub}) {
    PartyPOVM povm;
    povm.outcome_labels = {"0", "1"};
    for (int k = 0; k < 2; ++k) {
      Matrix e = Matrix::Zero(2, 2);
      e(k, k) = 1.0;
      povm.elements.push_back(u * e * u.adjoint());
    }
    model.povms.push_back(std::move(povm));
  }
  model.check();
  return model;
}

// --- criterion 1: pair-source optimization reaches the reference table ------

// Reference operating points for the four zero-phase searches, with the score
// floors set slightly below the reference values and the success-probability
// pins allowed a +-0.02 window around them.
constexpr double kEqStdChshMin = 2.2958, kEqStdRandMin = 0.2459;
constexpr double kFreeStdChshMin = 2.3007, kFreeStdRandMin = 0.2505;
constexpr double kEqPsRandMin = 0.2692, kEqPsSuccRef = 0.5474;
constexpr double kFreePsRandMin = 0.2729, kFreePsSuccRef = 0.6004;
constexpr double kSuccWindow = 0.02;
constexpr double kOptimizeBudgetSeconds = 300.0;
constexpr int kOptimizeRestarts = 200;

Criterion criterion_1() {
  const auto run = [](Objective objective, bool equal_t, std::uint64_t seed) {
    OptimizeOptions options;
    options.objective = objective;
    options.equal_t = equal_t;
    options.zero_phases = true;
    options.restarts = kOptimizeRestarts;
    options.seed = seed;
    return optimize(options);
  };
  const auto start = std::chrono::steady_clock::now();
  const OptimizeResult eq_std = run(Objective::standard_randomness, true, kSeedBase + 1);
  const OptimizeResult free_std =
      run(Objective::standard_randomness, false, kSeedBase + 2);
  const OptimizeResult eq_ps = run(Objective::ps_randomness, true, kSeedBase + 3);
  const OptimizeResult free_ps = run(Objective::ps_randomness, false, kSeedBase + 4);
  const double elapsed = wall_seconds(start);

  std::vector<std::string> failures;
  const auto require = [&](bool ok, const std::string& label) {
    if (!ok) failures.push_back(label);
  };
  require(eq_std.chsh >= kEqStdChshMin,
          "equal-T standard chsh " + fmt(eq_std.chsh) + " < " + fmt(kEqStdChshMin));
  require(eq_std.value >= kEqStdRandMin,
          "equal-T standard randomness " + fmt(eq_std.value) + " < " +
              fmt(kEqStdRandMin));
  require(free_std.chsh >= kFreeStdChshMin,
          "free-T standard chsh " + fmt(free_std.chsh) + " < " + fmt(kFreeStdChshMin));
  require(free_std.value >= kFreeStdRandMin,
          "free-T standard randomness " + fmt(free_std.value) + " < " +
              fmt(kFreeStdRandMin));
  require(eq_ps.value >= kEqPsRandMin,
          "equal-T post-selected randomness " + fmt(eq_ps.value) + " < " +
              fmt(kEqPsRandMin));
  require(std::abs(eq_ps.success_prob - kEqPsSuccRef) <= kSuccWindow,
          "equal-T post-selected p_succ " + fmt(eq_ps.success_prob) +
              " deviates from reference " + fmt(kEqPsSuccRef) + " by " +
              fmt(std::abs(eq_ps.success_prob - kEqPsSuccRef)) + " (window " +
              fmt(kSuccWindow) + "); the optimizer's best operating point sits at a "
              "higher pump amplitude than the reference row");
  require(free_ps.value >= kFreePsRandMin,
          "free-T post-selected randomness " + fmt(free_ps.value) + " < " +
              fmt(kFreePsRandMin));
  require(std::abs(free_ps.success_prob - kFreePsSuccRef) <= kSuccWindow,
          "free-T post-selected p_succ " + fmt(free_ps.success_prob) +
              " off reference " + fmt(kFreePsSuccRef));
  require(elapsed <= 4.0 * kOptimizeBudgetSeconds,
          "wall time " + fmt(elapsed) + "s over budget");

  std::ostringstream detail;
  detail << "optimization table (zero-phase, " << kOptimizeRestarts
         << " restarts): equal-T standard chsh=" << fmt(eq_std.chsh)
         << " rand=" << fmt(eq_std.value) << ", free-T standard chsh="
         << fmt(free_std.chsh) << " rand=" << fmt(free_std.value)
         << ", equal-T ps rand=" << fmt(eq_ps.value)
         << " p_succ=" << fmt(eq_ps.success_prob) << ", free-T ps rand="
         << fmt(free_ps.value) << " p_succ=" << fmt(free_ps.success_prob) << " ["
         << fmt(elapsed, 3) << "s]";
  if (!failures.empty()) {
    detail << " -- ";
    for (std::size_t i = 0; i < failures.size(); ++i)
      detail << (i ? "; " : "") << failures[i];
  }
  return {failures.empty(), detail.str()};
}

// --- criterion 2: closed-form click model vs truncated pair expansion -------

constexpr double kFockTolerance = 1e-8;
constexpr double kFockTailBound = 1e-10;
constexpr int kFockDraws = 50;

Criterion criterion_2() {
  SplitMix64 rng(kSeedBase + 2);
  double worst = 0.0;
  for (int trial = 0; trial < kFockDraws; ++trial) {
    SPDCParams p;
    p.t1 = rng.uniform(0.05, 0.8);
    p.t2 = rng.uniform(0.05, 0.8);
    for (int k = 0; k < 2; ++k) {
      p.alice[k].theta = rng.uniform(0.0, 2.0 * M_PI);
      p.alice[k].phi = rng.uniform(0.0, 2.0 * M_PI);
      p.bob[k].theta = rng.uniform(0.0, 2.0 * M_PI);
      p.bob[k].phi = rng.uniform(0.0, 2.0 * M_PI);
    }
    const int cutoff = testutil::adaptive_pair_cutoff(p.t1, p.t2, kFockTailBound);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const ClickTable gap = click_probabilities(p, x, y) -
                               testutil::fock_click_table(p, x, y, cutoff);
        worst = std::max(worst, gap.cwiseAbs().maxCoeff());
      }
  }
  return {worst <= kFockTolerance,
          "determinant click model vs truncated number-state expansion: max "
          "deviation " +
              fmt(worst, 3) + " over " + std::to_string(kFockDraws) +
              " draws x 4 settings (tolerance " + fmt(kFockTolerance, 3) + ")"};
}

// --- criterion 3: failure overlays saturate the inequality exactly ----------

constexpr double kOverlaySlackTol = 1e-12;
constexpr double kOverlayImpliedTol = 1e-10;
constexpr int kOverlayTrials = 100;

Criterion criterion_3() {
  SplitMix64 rng(kSeedBase + 3);
  double worst_slack = 0.0, worst_implied = 0.0;
  for (int trial = 0; trial < kOverlayTrials; ++trial) {
    const NetworkGraph graph = testutil::random_bipartite_graph(rng, 5, 5);
    const OutcomeDistribution ideal =
        testutil::random_distribution(rng, graph, 2 + trial % 2);
    RealVector e(graph.n_sources());
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.0, 0.9);
    const FinnerReport r =
        finner_check(overlay_distribution(ideal, graph, e), graph);
    worst_slack = std::max(worst_slack, std::abs(r.slack));
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      if (!r.implied_e_defined[i]) {
        worst_implied = 1.0;
        continue;
      }
      worst_implied = std::max(worst_implied, std::abs(r.implied_e[i] - e[i]));
    }
  }
  return {worst_slack <= kOverlaySlackTol && worst_implied <= kOverlayImpliedTol,
          "independent-failure overlays on " + std::to_string(kOverlayTrials) +
              " random networks: max |slack| " + fmt(worst_slack, 3) +
              " (tol 1e-12), max |implied failure rate - actual| " +
              fmt(worst_implied, 3) + " (tol 1e-10)"};
}

// --- criterion 4: the inequality holds across model classes -----------------

constexpr double kInequalitySlackTol = -1e-10;
constexpr int kQuantumTrials = 200;
constexpr int kClassicalTrials = 100;

Criterion criterion_4() {
  SplitMix64 rng(kSeedBase + 4);
  double min_quantum = 1.0;
  for (int trial = 0; trial < kQuantumTrials; ++trial) {
    testutil::ModelSpec spec;
    spec.failure_outcome = (trial % 2 == 1);
    const QuantumNetworkModel model = testutil::random_model(rng, spec);
    const FinnerReport r = finner_check(joint_distribution(model), model.graph);
    min_quantum = std::min(min_quantum, r.slack);
  }
  double min_prob = 1.0;
  for (int trial = 0; trial < kClassicalTrials; ++trial) {
    testutil::ClassicalSpec spec;
    spec.binary_responses = true;
    const ClassicalNetworkModel model = testutil::random_classical_model(rng, spec);
    const std::vector<double> targets(model.graph.n_parties(), 1.0);
    const FinnerReport r =
        finner_probability_check(model, targets, half_weights(model.graph).weights);
    min_prob = std::min(min_prob, r.slack);
  }
  double min_expect = 1.0;
  for (int trial = 0; trial < kClassicalTrials; ++trial) {
    testutil::ClassicalSpec spec;
    spec.allow_hyperedges = (trial % 2 == 1);
    spec.sparse_support = (trial % 5 == 0);
    const ClassicalNetworkModel model = testutil::random_classical_model(rng, spec);
    const ProductExpectation pe =
        expect_product(model, testutil::safe_weights(rng, model.graph));
    min_expect = std::min(min_expect, pe.rhs - pe.lhs);
  }
  const bool pass = min_quantum >= kInequalitySlackTol &&
                    min_prob >= kInequalitySlackTol &&
                    min_expect >= kInequalitySlackTol;
  return {pass, "joint-vs-marginal inequality: min slack " + fmt(min_quantum, 3) +
                    " over " + std::to_string(kQuantumTrials) +
                    " quantum models, " + fmt(min_prob, 3) + " over " +
                    std::to_string(kClassicalTrials) +
                    " classical probability checks, " + fmt(min_expect, 3) +
                    " over " + std::to_string(kClassicalTrials) +
                    " weighted-norm expectation checks (floor -1e-10)"};
}

// --- criterion 5: flag realizations certify; decorrelation is detected ------

constexpr double kRigidityETol = 1e-9;
constexpr double kDecorrelationEps = 0.05;
constexpr double kDecorrelationSlackMin = 1e-4;
constexpr int kFlagTrials = 50;

Criterion criterion_5() {
  SplitMix64 rng(kSeedBase + 5);
  int rigid_count = 0, decor_certified = 0;
  double worst_e = 0.0, min_slack = 1.0;
  for (int trial = 0; trial < kFlagTrials; ++trial) {
    QuantumNetworkModel base;
    if (trial % 3 == 0) {
      base = random_pair_model(rng);
    } else {
      testutil::ModelSpec spec;
      spec.max_dim = 2;
      base = testutil::random_model(rng, spec);
    }
    std::vector<std::pair<int, int>> payload_dims;
    for (const SourceState& s : base.states)
      payload_dims.emplace_back(s.dim_left(), s.dim_right());
    RealVector e(base.graph.n_sources());
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.2, 0.6);

    QuantumNetworkModel flagged = flag_qubit_model(base, e);
    const RigidityVerdict v = rigidity_verify(flagged);
    if (v.rigid) ++rigid_count;
    for (Eigen::Index i = 0; i < e.size(); ++i)
      worst_e = std::max(worst_e, std::abs(v.sources[i].e_structure - e[i]));

    for (std::size_t s = 0; s < flagged.states.size(); ++s)
      flagged.states[s] =
          testutil::decorrelate_flags(flagged.states[s], payload_dims[s].first,
                                      payload_dims[s].second, kDecorrelationEps);
    const FinnerReport r = finner_check(joint_distribution(flagged), flagged.graph);
    min_slack = std::min(min_slack, r.slack);
    if (rigidity_verify(flagged).rigid) ++decor_certified;
  }
  const bool pass = rigid_count == kFlagTrials && worst_e <= kRigidityETol &&
                    min_slack > kDecorrelationSlackMin && decor_certified == 0;
  return {pass, "flag-qubit rigidity: " + std::to_string(rigid_count) + "/" +
                    std::to_string(kFlagTrials) +
                    " constructions certified, max |structural e - target| " +
                    fmt(worst_e, 3) + "; after eps=" + fmt(kDecorrelationEps, 3) +
                    " flag decorrelation min inequality slack " +
                    fmt(min_slack, 3) + " (must exceed 1e-4), " +
                    std::to_string(decor_certified) + " still certified"};
}

// --- criterion 6: conclusive filtering is exact for fair-sampling models ----

constexpr double kFairEquivTol = 1e-10;
constexpr int kFairTrials = 100;

Criterion criterion_6() {
  SplitMix64 rng(kSeedBase + 6);
  double worst_equiv = 0.0, worst_weight = 0.0;
  for (int trial = 0; trial < kFairTrials; ++trial) {
    const QuantumNetworkModel model = testutil::random_fair_sampling_model(rng);
    const PostselectResult ps = postselect_transform(model);
    const ConditionedDistribution cond =
        conditional_on_conclusive(joint_distribution(model));
    const OutcomeDistribution filtered = joint_distribution(ps.filtered);
    worst_equiv = std::max(
        worst_equiv,
        (cond.dist.probabilities() - filtered.probabilities()).cwiseAbs().maxCoeff());
    worst_weight =
        std::max(worst_weight, std::abs(cond.success - ps.source_weights.prod()));
  }
  int rejected = 0;
  for (int trial = 0; trial < kFairTrials; ++trial) {
    QuantumNetworkModel model;
    model.graph = NetworkGraph({{0, 1}, {1, 2}}, 3);
    for (int s = 0; s < 2; ++s)
      model.states.emplace_back(2, 2, testutil::random_state_vector(rng, 4));
    PartyPOVM comp;
    comp.outcome_labels = {"0", "1"};
    for (int k = 0; k < 2; ++k) {
      Matrix el = Matrix::Zero(2, 2);
      el(k, k) = 1.0;
      comp.elements.push_back(el);
    }
    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    const Matrix u = testutil::kron(testutil::random_unitary(rng, 2),
                                    testutil::random_unitary(rng, 2));
    const Vector rotated = u * bell;
    const Matrix proj = rotated * rotated.adjoint();
    PartyPOVM middle;
    middle.outcome_labels = {"c", kFailureLabel};
    middle.failure_index = 1;
    middle.elements = {proj, Matrix::Identity(4, 4) - proj};
    model.povms = {comp, middle, comp};
    model.check();
    try {
      postselect_transform(model);
    } catch (const fair_sampling_error&) {
      ++rejected;
    }
  }
  const bool pass = worst_equiv <= kFairEquivTol && worst_weight <= kFairEquivTol &&
                    rejected == kFairTrials;
  return {pass, "conclusive filtering on " + std::to_string(kFairTrials) +
                    " fair-sampling models: max joint deviation " +
                    fmt(worst_equiv, 3) + ", max weight-product deviation " +
                    fmt(worst_weight, 3) + " (tol 1e-10); entangled conclusive "
                    "blocks rejected " +
                    std::to_string(rejected) + "/" + std::to_string(kFairTrials)};
}

// --- criterion 7: the local-response witness chain ---------------------------

constexpr double kChainSlackFloor = -1e-10;
constexpr int kChainTrials = 100;
constexpr int kTightTrials = 50;

Criterion criterion_7() {
  SplitMix64 rng(kSeedBase + 7);
  double min_link_slack = 1.0;
  int identity_failures = 0;
  for (int trial = 0; trial < kChainTrials; ++trial) {
    testutil::ModelSpec spec;
    spec.failure_outcome = (trial % 2 == 1);
    const GOracleReport g = g_oracle(testutil::random_model(rng, spec));
    if (!g.identities_ok) ++identity_failures;
    for (const GOracleLink& link : g.links)
      min_link_slack = std::min(min_link_slack, link.slack);
  }
  int tight_count = 0;
  for (int trial = 0; trial < kTightTrials; ++trial) {
    testutil::ModelSpec spec;
    spec.max_dim = 2;
    spec.max_sources = 2;
    const QuantumNetworkModel base = testutil::random_model(rng, spec);
    RealVector e(base.graph.n_sources());
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.uniform(0.1, 0.6);
    const GOracleReport g = g_oracle(flag_qubit_model(base, e), 1e-9);
    bool all_tight = g.phase_aligned;
    for (const GOracleLink& link : g.links) all_tight = all_tight && link.tight;
    if (all_tight) ++tight_count;
  }
  const bool pass = identity_failures == 0 && min_link_slack >= kChainSlackFloor &&
                    tight_count == kTightTrials;
  return {pass, "local-response witness chain: " +
                    std::to_string(kChainTrials - identity_failures) + "/" +
                    std::to_string(kChainTrials) +
                    " second-moment identities hold, min link slack " +
                    fmt(min_link_slack, 3) + " (floor -1e-10); all links tight "
                    "with aligned phases on " +
                    std::to_string(tight_count) + "/" +
                    std::to_string(kTightTrials) + " flag models"};
}

// --- criterion 8: triangle four-outcome family -------------------------------

constexpr double kTriangleMatchTol = 1e-12;

Criterion criterion_8() {
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double theta = (M_PI / 4.0) * k / 20.0;
    const RealVector diff =
        joint_distribution(rgb4_realization(theta)).probabilities() -
        rgb4_distribution(theta).probabilities();
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  std::vector<std::string> failures;
  if (worst > kTriangleMatchTol)
    failures.push_back("realization deviates by " + fmt(worst, 3));
  if (r_lower_bound(0.0) != 0.0) failures.push_back("radius at 0 not exact");
  if (std::abs(r_lower_bound(M_PI / 4.0) + 0.5) > 1e-14)
    failures.push_back("radius at pi/4 not -1/2");
  double peak = -1.0;
  for (int k = 0; k <= 20000; ++k)
    peak = std::max(peak, r_lower_bound((M_PI / 4.0) * k / 20000.0));
  // stationary point of the radius curve: 0.02547295312598466 at theta = 0.3597
  if (std::abs(peak - 0.02547295312598466) > 1e-7)
    failures.push_back("peak radius " + fmt(peak) +
                       " not within 1e-7 of 0.025472953");
  if (entropy_bound_L(0.0) != 0.0 || std::abs(entropy_bound_L(0.25) - 1.0) > 1e-14)
    failures.push_back("entropy endpoints off");
  if (std::abs(entropy_bound_L(r_lower_bound(0.26)) - 0.0990206774926643) > 1e-12)
    failures.push_back("entropy at theta=0.26 off");
  const RandomnessBoundReport rb = scaled_randomness_bound(0.26, 0.1, 0.1);
  if (std::abs(rb.scaled_bound - 0.08020674876905809) > 1e-12)
    failures.push_back("scaled bound at (0.26, 0.1, 0.1) off");
  for (const double theta : {0.15, 0.26, 0.33}) {
    const RandomnessBoundReport ideal = scaled_randomness_bound(theta, 0.0, 0.0);
    if (ideal.scaled_bound != entropy_bound_L(r_lower_bound(theta)))
      failures.push_back("failure-free scaled bound differs from entropy bound");
  }
  const FailingRGB4 f = failing_rgb4(0.26, Eigen::Vector3d(0.2, 0.3, 0.1));
  double worst_implied = 0.0;
  const Eigen::Vector3d e(0.2, 0.3, 0.1);
  for (int i = 0; i < 3; ++i)
    worst_implied = std::max(worst_implied, std::abs(f.finner.implied_e[i] - e[i]));
  if (!f.finner.saturated || worst_implied > 1e-10)
    failures.push_back("failing-triangle saturation off by " + fmt(worst_implied, 3));

  std::ostringstream detail;
  detail << "triangle four-outcome family: realization vs closed form max "
         << fmt(worst, 3) << " over 21 angles (tol 1e-12), peak radius "
         << fmt(peak) << ", entropy and failure anchors checked";
  if (!failures.empty()) {
    detail << " -- ";
    for (std::size_t i = 0; i < failures.size(); ++i)
      detail << (i ? "; " : "") << failures[i];
  }
  return {failures.empty(), detail.str()};
}

// --- criterion 9: near-deterministic pump regime -----------------------------

constexpr double kFixedPump = 0.05;
constexpr double kNearIdealChshMin = 2.80;

Criterion criterion_9() {
  OptimizeOptions options;
  options.objective = Objective::ps_chsh;
  options.fixed_t = kFixedPump;
  options.restarts = kOptimizeRestarts;
  options.seed = kSeedBase + 9;
  const OptimizeResult r = optimize(options);
  return {r.chsh >= kNearIdealChshMin,
          "post-selected score at pinned pump amplitude " + fmt(kFixedPump) +
              ": chsh " + fmt(r.chsh) + " (needs >= " + fmt(kNearIdealChshMin) +
              "), conclusive probability " + fmt(r.success_prob)};
}

}  // namespace

int main() {
  const std::vector<Criterion (*)()> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion result;
    try {
      result = criteria[i]();
    } catch (const std::exception& e) {
      result = {false, std::string("unexpected exception: ") + e.what()};
    }
    std::cout << (result.pass ? "PASS" : "FAIL") << " criterion " << (i + 1)
              << ": " << result.detail << std::endl;
    if (!result.pass) ++failures;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures;
}
