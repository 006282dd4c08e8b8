#include "finnet/finner.hpp"

#include "finnet/fair_sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace finnet {

namespace {

bool is_conclusive(const Alphabet& a, int outcome) {
  return outcome != a.failure_index;
}

}  // namespace

FinnerReport finner_check(const OutcomeDistribution& dist, const NetworkGraph& graph,
                          double tol) {
  if (!graph.bipartite_sources())
    throw std::invalid_argument("finner_check: requires bipartite sources");
  if (dist.n_parties() != graph.n_parties())
    throw std::invalid_argument("finner_check: party count mismatch");

  const int n_par = graph.n_parties();
  const int n_src = graph.n_sources();
  FinnerReport report;
  report.tol = tol;
  report.marginals = RealVector::Zero(n_par);
  RealMatrix pair_ok = RealMatrix::Zero(n_par, n_par);

  for (long idx = 0; idx < dist.size(); ++idx) {
    const double p = dist.probabilities()[idx];
    if (p == 0.0) continue;
    const auto outcome = dist.outcome_at(idx);
    bool all_ok = true;
    for (int j = 0; j < n_par; ++j) {
      const bool ok = is_conclusive(dist.alphabet(j), outcome[j]);
      all_ok = all_ok && ok;
      if (ok) report.marginals[j] += p;
      for (int k = j + 1; k < n_par; ++k)
        if (ok && is_conclusive(dist.alphabet(k), outcome[k])) pair_ok(j, k) += p;
    }
    if (all_ok) report.lhs += p;
  }

  double prod = 1.0;
  for (int j = 0; j < n_par; ++j) prod *= report.marginals[j];
  report.rhs = std::sqrt(prod);
  report.slack = report.rhs - report.lhs;
  report.saturated = std::abs(report.slack) <= tol;

  report.implied_e = RealVector::Zero(n_src);
  report.implied_e_defined.assign(n_src, false);
  for (int i = 0; i < n_src; ++i) {
    const auto [lo, hi] = graph.source_ends(i);
    const double joint = pair_ok(lo, hi);
    if (joint > 0.0) {
      report.implied_e[i] = 1.0 - report.marginals[lo] * report.marginals[hi] / joint;
      report.implied_e_defined[i] = true;
    } else {
      report.implied_e[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

namespace {

// Per-edge restriction data in Schmidt coordinates.
struct EdgeSupport {
  Matrix isometry;       // end-space x rank, columns are kept Schmidt vectors
  RealVector lambda_sq;  // kept squared coefficients
};

EdgeSupport edge_support(const SourceState& state, bool left_end) {
  const SchmidtDecomposition& sd = state.schmidt();
  const int rank = sd.rank();
  EdgeSupport out;
  out.isometry = left_end ? sd.left.leftCols(rank) : sd.right.leftCols(rank);
  out.lambda_sq = sd.coefficients.head(rank).array().square();
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

RigidityVerdict rigidity_verify(const QuantumNetworkModel& model, double tol) {
  model.check();
  const int n_par = model.graph.n_parties();
  const int n_src = model.graph.n_sources();

  RigidityVerdict verdict;
  verdict.tol = tol;
  verdict.parties.resize(n_par);
  verdict.sources.resize(n_src);

  // per-source end factors discovered by the per-party product tests
  std::vector<std::array<Matrix, 2>> end_factors(n_src);
  std::vector<std::array<bool, 2>> end_seen{};
  end_seen.resize(n_src, {false, false});

  for (int j = 0; j < n_par; ++j) {
    auto& pc = verdict.parties[j];
    const auto srcs = model.graph.sources_of_party(j);

    Matrix isometry = Matrix::Identity(1, 1);
    RealVector rho_diag = RealVector::Ones(1);
    std::vector<int> sub_dims;
    for (int i : srcs) {
      const auto [lo, hi] = model.graph.source_ends(i);
      EdgeSupport es = edge_support(model.states[i], j == lo);
      isometry = kron(isometry, es.isometry);
      RealVector next(rho_diag.size() * es.lambda_sq.size());
      for (long a = 0; a < rho_diag.size(); ++a)
        next.segment(a * es.lambda_sq.size(), es.lambda_sq.size()) =
            rho_diag[a] * es.lambda_sq;
      rho_diag = std::move(next);
      sub_dims.push_back(static_cast<int>(es.lambda_sq.size()));
    }

    const Matrix m_ok = model.povms[j].conclusive_sum();
    const Matrix restricted = isometry.adjoint() * m_ok * isometry;

    pc.projector_err = max_abs(restricted * restricted - restricted);
    pc.projector = pc.projector_err <= tol;
    const Matrix rho = rho_diag.cast<Complex>().asDiagonal();
    pc.commute_err = max_abs(rho * restricted - restricted * rho);
    pc.commutes = pc.commute_err <= tol;

    ProductTestResult pt = product_test(restricted, sub_dims, tol);
    pc.second_singular = pt.second_singular;
    pc.factorizes = pt.is_product;
    if (pt.is_product) {
      for (std::size_t k = 0; k < srcs.size(); ++k) {
        const int i = srcs[k];
        const auto [lo, hi] = model.graph.source_ends(i);
        end_factors[i][j == lo ? 0 : 1] = pt.factors[k];
        end_seen[i][j == lo ? 0 : 1] = true;
      }
    }
  }

  // distribution-implied failure probabilities
  FinnerReport fr = finner_check(joint_distribution(model), model.graph, tol);

  bool all_ok = true;
  for (int j = 0; j < n_par; ++j) {
    const auto& pc = verdict.parties[j];
    all_ok = all_ok && pc.projector && pc.commutes && pc.factorizes;
  }

  for (int i = 0; i < n_src; ++i) {
    auto& sc = verdict.sources[i];
    const SchmidtDecomposition& sd = model.states[i].schmidt();
    const int rank = sd.rank();
    const RealVector lam_sq = sd.coefficients.head(rank).array().square();
    if (!(end_seen[i][0] && end_seen[i][1])) {
      all_ok = false;
      continue;
    }
    const Matrix& f_lo = end_factors[i][0];
    const Matrix& f_hi = end_factors[i][1];
    sc.match_err = max_abs(f_lo - f_hi);
    sc.ends_match = sc.match_err <= tol;
    const Matrix lam = lam_sq.cast<Complex>().asDiagonal();
    sc.diagonal_err = std::max(max_abs(lam * f_lo - f_lo * lam),
                               max_abs(lam * f_hi - f_hi * lam));
    sc.diagonal_ok = sc.diagonal_err <= tol;
    sc.e_structure = 1.0 - (lam * ((f_lo + f_hi) / 2.0)).trace().real();
    sc.e_distribution = fr.implied_e_defined[i] ? fr.implied_e[i]
                                                : std::numeric_limits<double>::quiet_NaN();
    sc.e_consistent = fr.implied_e_defined[i] &&
                      std::abs(sc.e_structure - sc.e_distribution) <= tol;
    all_ok = all_ok && sc.ends_match && sc.diagonal_ok && sc.e_consistent;
  }
  verdict.rigid = all_ok;
  return verdict;
}

namespace {

struct PartySchmidtBlock {
  Matrix m_tilde;        // conclusive block in Schmidt coordinates
  RealVector lambda;     // per local index: product of edge Schmidt coefficients
  RealVector lambda_sq;  // squares (the diagonal of rho in Schmidt coordinates)
};

}  // namespace

GOracleReport g_oracle(const QuantumNetworkModel& model, double tol) {
  std::vector<std::vector<int>> targets(model.graph.n_parties());
  for (int j = 0; j < model.graph.n_parties(); ++j)
    for (int a = 0; a < model.povms[j].n_outcomes(); ++a)
      if (a != model.povms[j].failure_index) targets[j].push_back(a);
  return g_oracle(model, targets, tol);
}

GOracleReport g_oracle(const QuantumNetworkModel& model,
                       const std::vector<std::vector<int>>& target_outcomes,
                       double tol) {
  model.check();
  const int n_par = model.graph.n_parties();
  const int n_src = model.graph.n_sources();
  if (static_cast<int>(target_outcomes.size()) != n_par)
    throw std::invalid_argument("g_oracle: one target outcome set per party");

  GOracleReport report;
  report.tol = tol;

  std::vector<int> ranks(n_src);
  std::vector<RealVector> lambdas(n_src);
  long pair_count = 1;
  for (int i = 0; i < n_src; ++i) {
    const SchmidtDecomposition& sd = model.states[i].schmidt();
    ranks[i] = sd.rank();
    lambdas[i] = sd.coefficients.head(ranks[i]);
    pair_count *= static_cast<long>(ranks[i]) * ranks[i];
    if (pair_count > kEnumerationCap)
      throw dimension_error("g_oracle: Schmidt index enumeration exceeds cap");
  }

  std::vector<PartySchmidtBlock> blocks(n_par);
  report.e_g_sq = RealVector::Zero(n_par);
  report.tr_srms = RealVector::Zero(n_par);
  report.tr_rho_m2 = RealVector::Zero(n_par);
  report.tr_rho_m = RealVector::Zero(n_par);

  for (int j = 0; j < n_par; ++j) {
    const auto srcs = model.graph.sources_of_party(j);
    Matrix isometry = Matrix::Identity(1, 1);
    RealVector lambda = RealVector::Ones(1);
    for (int i : srcs) {
      const auto [lo, hi] = model.graph.source_ends(i);
      const SchmidtDecomposition& sd = model.states[i].schmidt();
      const Matrix basis = (j == lo) ? sd.left.leftCols(ranks[i])
                                     : sd.right.leftCols(ranks[i]);
      isometry = kron(isometry, basis);
      RealVector next(lambda.size() * ranks[i]);
      for (long a = 0; a < lambda.size(); ++a)
        next.segment(a * ranks[i], ranks[i]) =
            lambda[a] * lambdas[i];
      lambda = std::move(next);
    }
    Matrix target = Matrix::Zero(model.povms[j].dim(), model.povms[j].dim());
    for (int a : target_outcomes[j]) {
      if (a < 0 || a >= model.povms[j].n_outcomes())
        throw std::invalid_argument("g_oracle: target outcome out of range");
      target += model.povms[j].elements[a];
    }
    PartySchmidtBlock& blk = blocks[j];
    blk.m_tilde = isometry.adjoint() * target * isometry;
    blk.lambda = lambda;
    blk.lambda_sq = lambda.array().square();

    // direct enumeration of E[g_j^2]
    double e_g2 = 0.0;
    for (long r = 0; r < blk.m_tilde.rows(); ++r)
      for (long c = 0; c < blk.m_tilde.cols(); ++c)
        e_g2 += blk.lambda[r] * blk.lambda[c] * std::norm(blk.m_tilde(r, c));
    report.e_g_sq[j] = e_g2;

    const Matrix sqrt_rho = blk.lambda.cast<Complex>().asDiagonal();
    // sqrt(rho) in Schmidt coordinates is diag(lambda)
    const Matrix srms = sqrt_rho * blk.m_tilde * sqrt_rho * blk.m_tilde;
    report.tr_srms[j] = srms.trace().real();
    const Matrix rho = blk.lambda_sq.cast<Complex>().asDiagonal();
    report.tr_rho_m2[j] = (rho * blk.m_tilde * blk.m_tilde).trace().real();
    report.tr_rho_m[j] = (rho * blk.m_tilde).trace().real();
  }

  // Global enumeration over Schmidt index pairs of all sources.
  std::vector<long> pair_dims(n_src);
  for (int i = 0; i < n_src; ++i) pair_dims[i] = static_cast<long>(ranks[i]) * ranks[i];
  // per-party flattened local index from the global tuple
  std::vector<std::vector<int>> party_srcs(n_par);
  for (int j = 0; j < n_par; ++j) party_srcs[j] = model.graph.sources_of_party(j);

  double e_prod = 0.0, p_all = 0.0;
  std::vector<int> l(n_src, 0), lp(n_src, 0);
  bool done = false;
  while (!done) {
    double weight = 1.0;
    for (int i = 0; i < n_src; ++i) weight *= lambdas[i][l[i]] * lambdas[i][lp[i]];
    Complex amp_prod = 1.0;
    double mag_prod = 1.0;
    for (int j = 0; j < n_par; ++j) {
      long row = 0, col = 0;
      for (int i : party_srcs[j]) {
        row = row * ranks[i] + l[i];
        col = col * ranks[i] + lp[i];
      }
      const Complex v = blocks[j].m_tilde(row, col);
      amp_prod *= v;
      mag_prod *= std::abs(v);
    }
    e_prod += weight * mag_prod;
    p_all += weight * amp_prod.real();
    // odometer over (l, lp)
    int k = 2 * n_src - 1;
    for (; k >= 0; --k) {
      std::vector<int>& vec = (k % 2 == 0) ? l : lp;
      const int i = k / 2;
      if (++vec[i] < ranks[i]) break;
      vec[i] = 0;
    }
    done = k < 0;
  }
  report.e_prod_g = e_prod;
  report.p_all = p_all;

  report.identities_ok = true;
  for (int j = 0; j < n_par; ++j)
    if (std::abs(report.e_g_sq[j] - report.tr_srms[j]) > tol)
      report.identities_ok = false;

  double sqrt_e_g2 = 1.0, sqrt_rho_m2 = 1.0, sqrt_rho_m = 1.0;
  for (int j = 0; j < n_par; ++j) {
    sqrt_e_g2 *= report.e_g_sq[j];
    sqrt_rho_m2 *= report.tr_rho_m2[j];
    sqrt_rho_m *= report.tr_rho_m[j];
  }
  sqrt_e_g2 = std::sqrt(sqrt_e_g2);
  sqrt_rho_m2 = std::sqrt(sqrt_rho_m2);
  sqrt_rho_m = std::sqrt(sqrt_rho_m);

  const auto link = [&](const char* name, double lhs, double rhs) {
    GOracleLink ln;
    ln.name = name;
    ln.lhs = lhs;
    ln.rhs = rhs;
    ln.slack = rhs - lhs;
    ln.tight = std::abs(ln.slack) <= tol;
    report.links.push_back(ln);
  };
  link("p_all<=E[prod g]", report.p_all, report.e_prod_g);
  link("E[prod g]<=sqrt(prod E[g^2])", report.e_prod_g, sqrt_e_g2);
  link("sqrt(prod E[g^2])<=sqrt(prod tr(rho M^2))", sqrt_e_g2, sqrt_rho_m2);
  link("sqrt(prod tr(rho M^2))<=sqrt(prod P_j)", sqrt_rho_m2, sqrt_rho_m);
  report.phase_aligned = report.links.front().tight;
  return report;
}

}  // namespace finnet
