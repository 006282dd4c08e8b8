#include "finnet/fair_sampling.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace finnet {

namespace {

// Operator-Schmidt reshuffle for the cut (d0 | rest): R[(a,a'),(b,b')] = op[ab, a'b'].
Matrix reshuffle(const Matrix& op, int d0, int rest) {
  Matrix r(static_cast<long>(d0) * d0, static_cast<long>(rest) * rest);
  for (int a = 0; a < d0; ++a)
    for (int ap = 0; ap < d0; ++ap)
      for (int b = 0; b < rest; ++b)
        for (int bp = 0; bp < rest; ++bp)
          r(static_cast<long>(a) * d0 + ap, static_cast<long>(b) * rest + bp) =
              op(static_cast<long>(a) * rest + b, static_cast<long>(ap) * rest + bp);
  return r;
}

Matrix fold(const Vector& v, int d) {
  Matrix m(d, d);
  for (int a = 0; a < d; ++a)
    for (int ap = 0; ap < d; ++ap) m(a, ap) = v[static_cast<long>(a) * d + ap];
  return m;
}

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

// Phase making the dominant entry real positive.
Complex dominant_phase(const Matrix& m) {
  Complex best = 0.0;
  double mag = 0.0;
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > mag + 1e-14) { mag = std::abs(m(r, c)); best = m(r, c); }
  if (mag < 1e-300) return 1.0;
  return best / mag;
}

}  // namespace

ProductTestResult product_test(const Matrix& op, const std::vector<int>& dims,
                               double tol) {
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("product_test: bad slot dimension");
    total *= d;
  }
  if (op.rows() != total || op.cols() != total)
    throw std::invalid_argument("product_test: operator does not match slot dimensions");

  ProductTestResult result;
  if (dims.size() == 1) {
    result.is_product = true;
    result.factors = {op};
    return result;
  }

  Matrix rest = op;
  long rest_dim = total;
  for (std::size_t cut = 0; cut + 1 < dims.size(); ++cut) {
    const int d0 = dims[cut];
    const int dr = static_cast<int>(rest_dim / d0);
    Eigen::JacobiSVD<Matrix> svd(reshuffle(rest, d0, dr),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double s1 = sv.size() > 0 ? sv[0] : 0.0;
    const double s2 = sv.size() > 1 ? sv[1] : 0.0;
    if (s2 > tol * std::max(s1, 1.0)) {
      result.failing_cut = static_cast<int>(cut);
      result.second_singular = s2;
      return result;
    }
    result.second_singular = std::max(result.second_singular, s2);
    result.factors.push_back(fold(svd.matrixU().col(0), d0));
    rest = fold(svd.matrixV().col(0).conjugate() * s1, dr);
    rest_dim = dr;
  }
  result.factors.push_back(rest);
  result.is_product = true;

  // gauge: unit operator norm and positive dominant entry everywhere except
  // the leading factor, which keeps the residue
  Complex residue = 1.0;
  for (std::size_t k = 1; k < result.factors.size(); ++k) {
    Matrix& f = result.factors[k];
    const double norm = operator_norm(f);
    if (norm > 1e-300) { f /= norm; residue *= norm; }
    const Complex phase = dominant_phase(f);
    f /= phase;
    residue *= phase;
  }
  // the leading factor absorbs the whole residue so the factors always
  // multiply back to the input exactly
  result.factors.front() *= residue;
  return result;
}

Matrix sqrt_psd(const Matrix& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector vals = es.eigenvalues().cwiseMax(0.0);
  for (int k = 0; k < vals.size(); ++k)
    if (vals[k] < floor) vals[k] = 0.0;
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix pinv_sqrt_psd(const Matrix& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector vals = es.eigenvalues();
  RealVector inv = RealVector::Zero(vals.size());
  for (int k = 0; k < vals.size(); ++k)
    if (vals[k] > floor) inv[k] = 1.0 / std::sqrt(vals[k]);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

PostselectResult postselect_transform(const QuantumNetworkModel& model, double tol) {
  model.check();
  const int n_par = model.graph.n_parties();
  const int n_src = model.graph.n_sources();

  PostselectResult out;
  out.decompositions.resize(n_par);
  // filters indexed by (source, end): 0 = left/lower party, 1 = right/higher
  std::vector<std::array<Matrix, 2>> edge_filters(n_src);

  for (int j = 0; j < n_par; ++j) {
    const PartyPOVM& p = model.povms[j];
    const auto srcs = model.graph.sources_of_party(j);
    std::vector<int> dims;
    for (int i : srcs) dims.push_back(model.edge_dim(i, j));
    const Matrix sum = p.conclusive_sum();
    if (sum.cwiseAbs().maxCoeff() < 1e-12)
      throw fair_sampling_error("postselect: conclusive sum vanishes at party " +
                                std::to_string(j));
    ProductTestResult pt = product_test(sum, dims, tol);
    if (!pt.is_product)
      throw fair_sampling_error(
          "postselect: conclusive sum at party " + std::to_string(j) +
          " is entangling across edge " + std::to_string(pt.failing_cut) +
          " (second singular value " + std::to_string(pt.second_singular) + ")");

    FairSamplingDecomposition& dec = out.decompositions[j];
    for (std::size_t k = 0; k < pt.factors.size(); ++k) {
      Matrix f = pt.factors[k];
      if ((f - f.adjoint()).cwiseAbs().maxCoeff() > 10 * tol)
        throw fair_sampling_error("postselect: edge factor is not Hermitian at party " +
                                  std::to_string(j));
      f = (f + f.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(f);
      if (es.eigenvalues().minCoeff() < -10 * tol)
        throw fair_sampling_error("postselect: edge factor is not PSD at party " +
                                  std::to_string(j));
      if (es.eigenvalues().maxCoeff() > 1.0 + 1e-6)
        throw fair_sampling_error("postselect: edge factor exceeds the identity at party " +
                                  std::to_string(j));
      RealVector vals = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
      f = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
      dec.filters.push_back(f);
      const int i = srcs[k];
      const auto [lo, hi] = model.graph.source_ends(i);
      edge_filters[i][j == lo ? 0 : 1] = f;
    }

    const Matrix inv_sqrt = pinv_sqrt_psd(sum);
    dec.support_projector = sqrt_psd(sum, tol::support_cutoff) * inv_sqrt;
    // complete the deficiency on the first conclusive outcome so the
    // transformed elements again sum to the identity
    Matrix deficiency = Matrix::Identity(sum.rows(), sum.cols()) -
                        inv_sqrt * sum * inv_sqrt;
    bool first = true;
    for (int a = 0; a < p.n_outcomes(); ++a) {
      if (a == p.failure_index) continue;
      Matrix elem = inv_sqrt * p.elements[a] * inv_sqrt;
      if (first) { elem += deficiency; first = false; }
      dec.conclusive_elements.push_back(std::move(elem));
    }
  }

  out.filtered.graph = model.graph;
  out.filtered.dim_cap = model.dim_cap;
  out.source_weights = RealVector::Zero(n_src);
  for (int i = 0; i < n_src; ++i) {
    const SourceState& s = model.states[i];
    const Matrix a = s.as_matrix();
    const Matrix filtered = sqrt_psd(edge_filters[i][0]) * a *
                            sqrt_psd(edge_filters[i][1]).transpose();
    const double norm = filtered.norm();
    if (norm < 1e-12)
      throw fair_sampling_error("postselect: filtered state vanishes at source " +
                                std::to_string(i));
    out.source_weights[i] = norm * norm;
    Vector amp(filtered.size());
    for (int l = 0; l < filtered.rows(); ++l)
      for (int r = 0; r < filtered.cols(); ++r)
        amp[static_cast<long>(l) * filtered.cols() + r] = filtered(l, r) / norm;
    out.filtered.states.emplace_back(s.dim_left(), s.dim_right(), std::move(amp));
  }

  for (int j = 0; j < n_par; ++j) {
    const PartyPOVM& p = model.povms[j];
    PartyPOVM np;
    np.failure_index = -1;
    for (int a = 0; a < p.n_outcomes(); ++a)
      if (a != p.failure_index) np.outcome_labels.push_back(p.outcome_labels[a]);
    np.elements = out.decompositions[j].conclusive_elements;
    out.filtered.povms.push_back(std::move(np));
  }
  out.filtered.check();
  return out;
}

}  // namespace finnet
