#include "finnet/quantum.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace finnet {

namespace {

// Lexicographic key on (real, imag) pairs of a column, for deterministic
// ordering of degenerate Schmidt coefficients.
bool column_less(const Matrix& m, int a, int b) {
  for (int r = 0; r < m.rows(); ++r) {
    const Complex x = m(r, a), y = m(r, b);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

SchmidtDecomposition schmidt_of_matrix(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV().conjugate();
  const int r = static_cast<int>(out.coefficients.size());
  // gauge: first sizeable entry of each left vector is real positive
  for (int k = 0; k < r; ++k) {
    int pivot = -1;
    double best = 0.0;
    for (int i = 0; i < out.left.rows(); ++i) {
      const double mag = std::abs(out.left(i, k));
      if (mag > best + 1e-12) { best = mag; pivot = i; if (best > 0.5) break; }
    }
    if (pivot < 0 || best < 1e-14) continue;
    const Complex phase = out.left(pivot, k) / best;
    out.left.col(k) /= phase;
    out.right.col(k) *= phase;
  }
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    if (out.coefficients[x] != out.coefficients[y])
      return out.coefficients[x] > out.coefficients[y];
    return column_less(out.left, x, y);
  });
  SchmidtDecomposition sorted;
  sorted.coefficients.resize(r);
  sorted.left.resize(out.left.rows(), r);
  sorted.right.resize(out.right.rows(), r);
  for (int k = 0; k < r; ++k) {
    sorted.coefficients[k] = out.coefficients[order[k]];
    sorted.left.col(k) = out.left.col(order[k]);
    sorted.right.col(k) = out.right.col(order[k]);
  }
  const Matrix rebuilt =
      sorted.left * sorted.coefficients.asDiagonal() * sorted.right.transpose();
  if ((rebuilt - a).cwiseAbs().maxCoeff() > 1e-10)
    throw std::runtime_error("schmidt: reconstruction failure");
  return sorted;
}

}  // namespace

int SchmidtDecomposition::rank(double cutoff) const {
  int r = 0;
  for (int k = 0; k < coefficients.size(); ++k)
    if (coefficients[k] > cutoff) ++r;
  return r;
}

SourceState::SourceState(int dim_left, int dim_right, Vector amplitudes)
    : dim_left_(dim_left), dim_right_(dim_right), amplitudes_(std::move(amplitudes)) {
  if (dim_left_ < 1 || dim_right_ < 1)
    throw std::invalid_argument("state: dimensions must be positive");
  if (amplitudes_.size() != static_cast<long>(dim_left_) * dim_right_)
    throw std::invalid_argument("state: amplitude count does not match dimensions");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol::renormalize)
    throw std::invalid_argument("state: vector is not normalized");
  if (std::abs(norm - 1.0) > tol::unit_norm) amplitudes_ /= norm;
  schmidt_ = schmidt_of_matrix(as_matrix());
}

Matrix SourceState::as_matrix() const {
  return Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(amplitudes_.data(),
                                                          dim_left_, dim_right_);
}

Matrix SourceState::reduced_left() const {
  const Matrix a = as_matrix();
  return a * a.adjoint();
}

Matrix SourceState::reduced_right() const {
  const Matrix a = as_matrix();
  return a.transpose() * a.conjugate();
}

SchmidtDecomposition schmidt_decompose(const SourceState& state) {
  return state.schmidt();
}

int PartyPOVM::dim() const {
  if (elements.empty()) throw std::invalid_argument("povm: no elements");
  return static_cast<int>(elements.front().rows());
}

Matrix PartyPOVM::conclusive_sum() const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (int a = 0; a < n_outcomes(); ++a)
    if (a != failure_index) sum += elements[a];
  return sum;
}

void PartyPOVM::check(double psd_tol, double sum_tol) const {
  if (elements.empty()) throw std::invalid_argument("povm: no elements");
  if (outcome_labels.size() != elements.size())
    throw std::invalid_argument("povm: label/element count mismatch");
  if (failure_index >= static_cast<int>(elements.size()))
    throw std::invalid_argument("povm: failure index out of range");
  const int d = dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& m : elements) {
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument("povm: element dimension mismatch");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 10 * psd_tol)
      throw std::invalid_argument("povm: element is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
      throw std::invalid_argument("povm: element is not positive semidefinite");
    sum += m;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > sum_tol)
    throw std::invalid_argument("povm: elements do not sum to the identity");
}

std::vector<int> QuantumNetworkModel::party_dims() const {
  std::vector<int> dims(graph.n_parties(), 1);
  for (int j = 0; j < graph.n_parties(); ++j)
    for (int i : graph.sources_of_party(j)) dims[j] *= edge_dim(i, j);
  return dims;
}

int QuantumNetworkModel::edge_dim(int source, int party) const {
  const auto [lo, hi] = graph.source_ends(source);
  if (party == lo) return states[source].dim_left();
  if (party == hi) return states[source].dim_right();
  throw std::invalid_argument("model: party not attached to source");
}

long QuantumNetworkModel::global_dim() const {
  long dim = 1;
  for (const SourceState& s : states) {
    dim *= static_cast<long>(s.dim_left()) * s.dim_right();
    if (dim > (1L << 40)) break;
  }
  return dim;
}

void QuantumNetworkModel::check() const {
  if (!graph.bipartite_sources())
    throw std::invalid_argument(
        "model: quantum operations require bipartite sources (every source must "
        "feed exactly two parties)");
  const ValidationReport report = validate(graph);
  if (!report.valid())
    throw std::invalid_argument("model: invalid network: " + report.violations.front());
  if (static_cast<int>(states.size()) != graph.n_sources())
    throw std::invalid_argument("model: one state per source required");
  if (static_cast<int>(povms.size()) != graph.n_parties())
    throw std::invalid_argument("model: one POVM per party required");
  const auto dims = party_dims();
  for (int j = 0; j < graph.n_parties(); ++j) {
    povms[j].check();
    if (povms[j].dim() != dims[j])
      throw dimension_error("model: POVM dimension mismatch at party " + std::to_string(j));
  }
  if (global_dim() > dim_cap)
    throw dimension_error("model: global dimension exceeds cap");
}

OutcomeDistribution::OutcomeDistribution(std::vector<Alphabet> alphabets,
                                         RealVector probabilities, double target_sum)
    : alphabets_(std::move(alphabets)), p_(std::move(probabilities)) {
  long expect = 1;
  for (const Alphabet& a : alphabets_) {
    if (a.labels.empty()) throw std::invalid_argument("distribution: empty alphabet");
    if (a.failure_index >= a.size())
      throw std::invalid_argument("distribution: failure index out of range");
    expect *= a.size();
    if (expect > kEnumerationCap) throw dimension_error("distribution: table exceeds cap");
  }
  if (p_.size() != expect)
    throw std::invalid_argument("distribution: table size does not match alphabets");
  if (p_.minCoeff() < tol::prob_floor)
    throw std::invalid_argument("distribution: negative probability");
  p_ = p_.cwiseMax(0.0);
  if (std::abs(p_.sum() - target_sum) > tol::dist_sum)
    throw std::invalid_argument("distribution: probabilities do not sum to target");
}

long OutcomeDistribution::index_of(const std::vector<int>& outcome) const {
  if (static_cast<int>(outcome.size()) != n_parties())
    throw std::invalid_argument("distribution: outcome arity mismatch");
  long idx = 0;
  for (int j = 0; j < n_parties(); ++j) {
    if (outcome[j] < 0 || outcome[j] >= alphabets_[j].size())
      throw std::invalid_argument("distribution: outcome out of range");
    idx = idx * alphabets_[j].size() + outcome[j];
  }
  return idx;
}

std::vector<int> OutcomeDistribution::outcome_at(long index) const {
  std::vector<int> out(n_parties());
  for (int j = n_parties() - 1; j >= 0; --j) {
    out[j] = static_cast<int>(index % alphabets_[j].size());
    index /= alphabets_[j].size();
  }
  return out;
}

namespace {

// Applies op to the contiguous middle block of a tensor shaped (pre, d, post).
void apply_middle(const Matrix& op, const Vector& in, Vector& out, long pre, long d,
                  long post) {
  out.resize(in.size());
  for (long a = 0; a < pre; ++a) {
    Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> blk_in(
        in.data() + a * d * post, post, d, Eigen::OuterStride<>(post));
    Eigen::Map<Matrix, 0, Eigen::OuterStride<>> blk_out(
        out.data() + a * d * post, post, d, Eigen::OuterStride<>(post));
    blk_out = blk_in * op.transpose();
  }
}

struct PartyLayout {
  std::vector<long> dims;  // per party
  std::vector<long> pre, post;
};

void recurse_outcomes(const QuantumNetworkModel& model, const PartyLayout& layout,
                      const Vector& psi, const Vector& current, int party,
                      std::vector<int>& outcome, RealVector& table, long& cursor) {
  if (party == model.graph.n_parties()) {
    table[cursor++] = psi.dot(current).real();
    return;
  }
  Vector next;
  for (int a = 0; a < model.povms[party].n_outcomes(); ++a) {
    apply_middle(model.povms[party].elements[a], current, next, layout.pre[party],
                 layout.dims[party], layout.post[party]);
    outcome[party] = a;
    recurse_outcomes(model, layout, psi, next, party + 1, outcome, table, cursor);
  }
}

}  // namespace

OutcomeDistribution joint_distribution(const QuantumNetworkModel& model) {
  model.check();
  const int n_src = model.graph.n_sources();
  const int n_par = model.graph.n_parties();

  // Global state, source-major: factors [src0.left, src0.right, src1.left, ...]
  Vector psi = Vector::Ones(1);
  for (const SourceState& s : model.states) {
    Vector next(psi.size() * s.amplitudes().size());
    for (long a = 0; a < psi.size(); ++a)
      next.segment(a * s.amplitudes().size(), s.amplitudes().size()) =
          psi[a] * s.amplitudes();
    psi = std::move(next);
  }

  // Axis bookkeeping: source-major axis 2*i is source i's left end, 2*i+1 right.
  std::vector<long> src_dims(2 * n_src);
  for (int i = 0; i < n_src; ++i) {
    src_dims[2 * i] = model.states[i].dim_left();
    src_dims[2 * i + 1] = model.states[i].dim_right();
  }
  std::vector<int> perm;  // party-major axis -> source-major axis
  for (int j = 0; j < n_par; ++j) {
    for (int i : model.graph.sources_of_party(j)) {
      const auto [lo, hi] = model.graph.source_ends(i);
      perm.push_back(2 * i + (j == lo ? 0 : 1));
    }
  }
  const int n_axes = static_cast<int>(perm.size());
  std::vector<long> new_dims(n_axes), new_stride(n_axes), old_stride(2 * n_src);
  long acc = 1;
  for (int a = 2 * n_src - 1; a >= 0; --a) { old_stride[a] = acc; acc *= src_dims[a]; }
  for (int a = 0; a < n_axes; ++a) new_dims[a] = src_dims[perm[a]];
  acc = 1;
  for (int a = n_axes - 1; a >= 0; --a) { new_stride[a] = acc; acc *= new_dims[a]; }
  Vector perm_psi(psi.size());
  std::vector<long> digit(n_axes, 0);
  long old_index = 0;
  for (long idx = 0; idx < psi.size(); ++idx) {
    perm_psi[idx] = psi[old_index];
    for (int a = n_axes - 1; a >= 0; --a) {
      old_index += old_stride[perm[a]];
      if (++digit[a] < new_dims[a]) break;
      old_index -= new_dims[a] * old_stride[perm[a]];
      digit[a] = 0;
    }
  }

  PartyLayout layout;
  layout.dims.assign(n_par, 1);
  const auto pdims = model.party_dims();
  for (int j = 0; j < n_par; ++j) layout.dims[j] = pdims[j];
  layout.pre.assign(n_par, 1);
  layout.post.assign(n_par, 1);
  for (int j = 0; j < n_par; ++j) {
    for (int k = 0; k < j; ++k) layout.pre[j] *= layout.dims[k];
    for (int k = j + 1; k < n_par; ++k) layout.post[j] *= layout.dims[k];
  }

  long n_tuples = 1;
  std::vector<Alphabet> alphabets;
  for (int j = 0; j < n_par; ++j) {
    n_tuples *= model.povms[j].n_outcomes();
    if (n_tuples > kEnumerationCap)
      throw dimension_error("joint_distribution: outcome table exceeds cap");
    alphabets.push_back({model.povms[j].outcome_labels, model.povms[j].failure_index});
  }
  RealVector table(n_tuples);
  std::vector<int> outcome(n_par, 0);
  long cursor = 0;
  recurse_outcomes(model, layout, perm_psi, perm_psi, 0, outcome, table, cursor);
  return OutcomeDistribution(std::move(alphabets), std::move(table));
}

OutcomeDistribution marginal(const OutcomeDistribution& dist, std::vector<int> parties) {
  std::sort(parties.begin(), parties.end());
  if (parties.empty()) throw std::invalid_argument("marginal: empty party set");
  if (std::adjacent_find(parties.begin(), parties.end()) != parties.end())
    throw std::invalid_argument("marginal: duplicate party");
  for (int j : parties)
    if (j < 0 || j >= dist.n_parties())
      throw std::invalid_argument("marginal: party out of range");

  std::vector<Alphabet> alphabets;
  long size = 1;
  for (int j : parties) {
    alphabets.push_back(dist.alphabet(j));
    size *= dist.alphabet(j).size();
  }
  RealVector table = RealVector::Zero(size);
  for (long idx = 0; idx < dist.size(); ++idx) {
    const auto full = dist.outcome_at(idx);
    long sub = 0;
    for (int j : parties) sub = sub * dist.alphabet(j).size() + full[j];
    table[sub] += dist.probabilities()[idx];
  }
  return OutcomeDistribution(std::move(alphabets), std::move(table));
}

ConditionedDistribution conditional_on_conclusive(const OutcomeDistribution& dist) {
  std::vector<Alphabet> alphabets;
  long size = 1;
  for (int j = 0; j < dist.n_parties(); ++j) {
    const Alphabet& a = dist.alphabet(j);
    Alphabet reduced;
    for (int k = 0; k < a.size(); ++k)
      if (k != a.failure_index) reduced.labels.push_back(a.labels[k]);
    if (reduced.labels.empty())
      throw std::domain_error("conditional: a party has no conclusive outcome");
    alphabets.push_back(std::move(reduced));
    size *= alphabets.back().size();
  }
  RealVector table = RealVector::Zero(size);
  double success = 0.0;
  for (long idx = 0; idx < dist.size(); ++idx) {
    const auto full = dist.outcome_at(idx);
    bool conclusive = true;
    long sub = 0;
    for (int j = 0; j < dist.n_parties(); ++j) {
      const Alphabet& a = dist.alphabet(j);
      int k = full[j];
      if (k == a.failure_index) { conclusive = false; break; }
      if (a.failure_index >= 0 && k > a.failure_index) --k;
      sub = sub * alphabets[j].size() + k;
    }
    if (!conclusive) continue;
    table[sub] += dist.probabilities()[idx];
    success += dist.probabilities()[idx];
  }
  if (success < 1e-12)
    throw std::domain_error("conditional: all-conclusive probability vanishes");
  table /= success;
  return {OutcomeDistribution(std::move(alphabets), std::move(table)), success};
}

}  // namespace finnet
