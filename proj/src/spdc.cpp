#include "finnet/spdc.hpp"

#include "finnet/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace finnet {

const std::array<const char*, 4> kPatternNames = {"oo", "xo", "ox", "xx"};

Eigen::Matrix2cd rotation(double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex ph(std::cos(phi), std::sin(phi));
  Eigen::Matrix2cd r;
  r << c, s * ph, -s / ph, c;
  return r;
}

Eigen::Matrix2cd mode_matrix(const SPDCParams& p, int x, int y) {
  if (x < 0 || x > 1 || y < 0 || y > 1)
    throw std::invalid_argument("mode_matrix: settings are 0 or 1");
  Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
  t(0, 0) = p.t1;
  t(1, 1) = p.t2;
  return rotation(p.alice[x].theta, p.alice[x].phi).transpose() * t *
         rotation(p.bob[y].theta, p.bob[y].phi);
}

double generating_term(double t1, double t2, const Eigen::Matrix2cd& m, int x, int y,
                       int z, int w) {
  if (!(t1 >= 0 && t1 < 1 && t2 >= 0 && t2 < 1))
    throw std::domain_error("generating_term: pump amplitudes must lie in [0, 1)");
  const double norm = (1.0 - t1 * t1) * (1.0 - t2 * t2);
  // denominator det(1 - m^dag diag(x,y) m diag(z,w))
  Eigen::Matrix2cd xym = m;
  xym.row(0) *= static_cast<double>(x);
  xym.row(1) *= static_cast<double>(y);
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd prod = m.adjoint() * xym;
  prod.col(0) *= static_cast<double>(z);
  prod.col(1) *= static_cast<double>(w);
  d -= prod;
  const double det = d.determinant().real();
  if (det <= 0.0)
    throw std::domain_error("generating_term: invalid squeezing regime");
  return norm / det;
}

ClickTable click_probabilities(const SPDCParams& p, int x, int y) {
  const Eigen::Matrix2cd m = mode_matrix(p, x, y);
  {
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    if (svd.singularValues()[0] >= 1.0)
      throw std::domain_error("click_probabilities: mode matrix singular value >= 1");
  }
  double g[2][2][2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          g[a][b][c][d] = generating_term(p.t1, p.t2, m, a, b, c, d);

  // click pattern probability by inclusion-exclusion over clicked modes
  const int pat[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  ClickTable table;
  for (int ia = 0; ia < 4; ++ia)
    for (int ib = 0; ib < 4; ++ib) {
      const int a1 = pat[ia][0], a2 = pat[ia][1];
      const int b1 = pat[ib][0], b2 = pat[ib][1];
      double total = 0.0;
      for (int xa = 0; xa <= a1; ++xa)
        for (int ya = 0; ya <= a2; ++ya)
          for (int zb = 0; zb <= b1; ++zb)
            for (int wb = 0; wb <= b2; ++wb) {
              const int sign = ((a1 - xa) + (a2 - ya) + (b1 - zb) + (b2 - wb)) % 2;
              total += (sign ? -1.0 : 1.0) * g[xa][ya][zb][wb];
            }
      table(ia, ib) = total;
    }
  return table;
}

SettingTables click_tables(const SPDCParams& p) {
  SettingTables tables;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) tables[x][y] = click_probabilities(p, x, y);
  return tables;
}

double chsh_score(const SettingTables& tables, const Binning& binning,
                  bool postselected) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const ClickTable& t = tables[x][y];
      double e = 0.0;
      if (postselected) {
        double mass = 0.0;
        for (int ia = 1; ia < 4; ++ia)
          for (int ib = 1; ib < 4; ++ib) mass += t(ia, ib);
        if (mass <= 0.0) throw std::domain_error("chsh_score: no conclusive mass");
        for (int ia = 1; ia < 4; ++ia)
          for (int ib = 1; ib < 4; ++ib)
            e += ((binning.alice[ia] + binning.bob[ib]) % 2 ? -1.0 : 1.0) *
                 t(ia, ib) / mass;
      } else {
        for (int ia = 0; ia < 4; ++ia)
          for (int ib = 0; ib < 4; ++ib)
            e += ((binning.alice[ia] + binning.bob[ib]) % 2 ? -1.0 : 1.0) * t(ia, ib);
      }
      s += (x * y ? -1.0 : 1.0) * e;
    }
  return s;
}

double success_probability(double t1, double t2) {
  return 1.0 - (1.0 - t1 * t1) * (1.0 - t2 * t2);
}

namespace {

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

double randomness_rate(double chsh) {
  if (chsh <= 2.0) return 0.0;
  const double q = 0.5 + 0.5 * std::sqrt(chsh * chsh / 4.0 - 1.0);
  return 1.0 - binary_entropy(q);
}

double postselected_randomness_rate(double chsh_ps, double t1, double t2) {
  return randomness_rate(chsh_ps) * success_probability(t1, t2);
}

Objective objective_from_string(const std::string& name) {
  if (name == "standard_chsh") return Objective::standard_chsh;
  if (name == "standard_randomness") return Objective::standard_randomness;
  if (name == "ps_chsh") return Objective::ps_chsh;
  if (name == "ps_randomness") return Objective::ps_randomness;
  throw std::invalid_argument("unknown objective: " + name);
}

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::standard_chsh: return "standard_chsh";
    case Objective::standard_randomness: return "standard_randomness";
    case Objective::ps_chsh: return "ps_chsh";
    case Objective::ps_randomness: return "ps_randomness";
  }
  return "?";
}

bool is_postselected(Objective objective) {
  return objective == Objective::ps_chsh || objective == Objective::ps_randomness;
}

namespace {

// All per-party pattern->bit maps with both bits used. Post-selected scores
// ignore the vacuum pattern, standard scores range over all four patterns.
std::vector<std::array<int, 4>> binning_choices(bool postselected) {
  std::vector<std::array<int, 4>> out;
  const int lo = postselected ? 1 : 0;
  const int bits = 4 - lo;
  for (int mask = 1; mask < (1 << bits) - 1; ++mask) {
    std::array<int, 4> b{};
    for (int k = 0; k < bits; ++k) b[lo + k] = (mask >> k) & 1;
    out.push_back(b);
  }
  return out;
}

struct BinnedScore {
  double chsh = 0.0;
  Binning binning;
};

BinnedScore best_chsh(const SettingTables& tables, bool postselected) {
  static const auto std_bins = binning_choices(false);
  static const auto ps_bins = binning_choices(true);
  const auto& bins = postselected ? ps_bins : std_bins;
  BinnedScore best;
  best.chsh = -1e9;
  for (const auto& ba : bins)
    for (const auto& bb : bins) {
      Binning b{ba, bb};
      const double s = chsh_score(tables, b, postselected);
      if (s > best.chsh) { best.chsh = s; best.binning = b; }
    }
  return best;
}

struct ParamSpace {
  bool equal_t;
  std::optional<double> fixed_t;
  bool zero_phases = false;

  int dim() const {
    int d = zero_phases ? 3 : 6;  // alpha0 alpha1 beta1 thetas (+ phis)
    if (!fixed_t) d += equal_t ? 1 : 2;
    if (!equal_t) d += zero_phases ? 1 : 2;  // beta0 frees up once t1 != t2
    return d;
  }

  SPDCParams decode(const Eigen::VectorXd& x) const {
    SPDCParams p;
    int k = 0;
    if (fixed_t) {
      p.t1 = p.t2 = *fixed_t;
    } else if (equal_t) {
      p.t1 = p.t2 = x[k++];
    } else {
      p.t1 = x[k++];
      p.t2 = x[k++];
    }
    const auto setting = [&](AngleSetting& s) {
      s.theta = x[k++];
      if (!zero_phases) s.phi = x[k++];
    };
    setting(p.alice[0]);
    setting(p.alice[1]);
    if (!equal_t) setting(p.bob[0]);
    setting(p.bob[1]);
    return p;
  }

  Eigen::VectorXd random_start(SplitMix64& rng) const {
    Eigen::VectorXd x(dim());
    int k = 0;
    if (!fixed_t) {
      x[k++] = rng.uniform(0.08, 0.92);
      if (!equal_t) x[k++] = rng.uniform(0.08, 0.92);
    }
    while (k < dim()) x[k++] = rng.uniform(0.0, 2.0 * M_PI);
    return x;
  }

  Eigen::VectorXd steps() const {
    Eigen::VectorXd s = Eigen::VectorXd::Constant(dim(), 0.6);
    int k = 0;
    if (!fixed_t) {
      s[k++] = 0.12;
      if (!equal_t) s[k++] = 0.12;
    }
    return s;
  }
};

double objective_value(const SPDCParams& p, Objective objective, BinnedScore* out) {
  const SettingTables tables = click_tables(p);
  const BinnedScore score = best_chsh(tables, is_postselected(objective));
  if (out) *out = score;
  switch (objective) {
    case Objective::standard_chsh:
    case Objective::ps_chsh:
      return score.chsh;
    case Objective::standard_randomness:
      return randomness_rate(score.chsh);
    case Objective::ps_randomness:
      return postselected_randomness_rate(score.chsh, p.t1, p.t2);
  }
  return 0.0;
}

}  // namespace

bool uses_phase(const SPDCParams& params, double tol) {
  const auto deviation = [](double phi) {
    const double m = std::fmod(std::abs(phi), 2.0 * M_PI);
    return std::min(m, 2.0 * M_PI - m);
  };
  for (const AngleSetting& s :
       {params.alice[0], params.alice[1], params.bob[0], params.bob[1]})
    if (deviation(s.phi) > tol) return true;
  return false;
}

OptimizeResult evaluate(const SPDCParams& params, Objective objective) {
  OptimizeResult r;
  BinnedScore score;
  r.value = objective_value(params, objective, &score);
  r.params = params;
  r.binning = score.binning;
  r.chsh = score.chsh;
  r.randomness = is_postselected(objective)
                     ? postselected_randomness_rate(score.chsh, params.t1, params.t2)
                     : randomness_rate(score.chsh);
  r.success_prob = success_probability(params.t1, params.t2);
  return r;
}

OptimizeResult optimize(const OptimizeOptions& options) {
  if (options.restarts < 1)
    throw std::invalid_argument("optimize: need at least one restart");
  if (options.fixed_t && !(*options.fixed_t > 0.0 && *options.fixed_t < 1.0))
    throw std::invalid_argument("optimize: fixed pump amplitude must lie in (0, 1)");
  const ParamSpace space{options.equal_t, options.fixed_t, options.zero_phases};

  const auto penalized = [&](const Eigen::VectorXd& x) -> double {
    int k = 0;
    double penalty = 0.0;
    if (!options.fixed_t) {
      const int nt = space.equal_t ? 1 : 2;
      for (int c = 0; c < nt; ++c, ++k) {
        if (x[k] < 0.01) penalty += 0.01 - x[k];
        if (x[k] > 0.97) penalty += x[k] - 0.97;
      }
    }
    if (penalty > 0.0) return 1e3 * (1.0 + penalty);
    SPDCParams p = space.decode(x);
    return -objective_value(p, options.objective, nullptr);
  };

  SplitMix64 rng(options.seed);
  OptimizeResult best;
  best.value = -1e300;
  Eigen::VectorXd best_x;
  for (int r = 0; r < options.restarts; ++r) {
    const Eigen::VectorXd start = space.random_start(rng);
    const SimplexResult sr = nelder_mead(penalized, start, space.steps(),
                                         options.diameter_tol, options.max_iters);
    best.restart_values.push_back(-sr.value);
    if (-sr.value > best.value) {
      best.value = -sr.value;
      best_x = sr.x;
      best.best_restart = r;
    }
  }
  // polish from the winner with a tight simplex
  {
    const SimplexResult sr =
        nelder_mead(penalized, best_x, Eigen::VectorXd::Constant(best_x.size(), 0.02),
                    options.diameter_tol, options.max_iters);
    if (-sr.value > best.value) { best.value = -sr.value; best_x = sr.x; }
  }

  const SPDCParams params = space.decode(best_x);
  OptimizeResult final = evaluate(params, options.objective);
  final.best_restart = best.best_restart;
  final.restart_values = std::move(best.restart_values);
  return final;
}

std::vector<ScanRow> scan(const ScanOptions& options) {
  if (options.steps < 1) throw std::invalid_argument("scan: need at least one step");
  if (!(options.t_min > 0.0 && options.t_max < 1.0 && options.t_min <= options.t_max))
    throw std::invalid_argument("scan: pump amplitude range must lie inside (0, 1)");
  std::vector<ScanRow> rows;
  for (int s = 0; s < options.steps; ++s) {
    const double t =
        options.steps == 1
            ? options.t_min
            : options.t_min + (options.t_max - options.t_min) * s / (options.steps - 1);
    ScanRow row;
    row.t = t;
    OptimizeOptions inner;
    inner.equal_t = true;
    inner.fixed_t = t;
    inner.zero_phases = options.zero_phases;
    inner.restarts = options.restarts;
    inner.seed = options.seed + static_cast<std::uint64_t>(s);
    inner.objective = options.standard_objective;
    row.standard_value = optimize(inner).value;
    inner.objective = options.ps_objective;
    inner.seed = options.seed + static_cast<std::uint64_t>(s) + 0x9E37ull;
    row.ps_value = optimize(inner).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace finnet
