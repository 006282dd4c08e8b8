#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace finnet {

// Deterministic splitmix64 stream; keeps optimizer runs byte-reproducible
// independently of the standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimization with standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Stops when the simplex diameter drops below
// `diameter_tol` or after `max_iters` iterations.
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& start,
                                 const Eigen::VectorXd& step,
                                 double diameter_tol = 1e-9, int max_iters = 4000) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (int k = 1; k <= n; ++k) xs[k][k - 1] += step[k - 1];
  for (int k = 0; k <= n; ++k) fs[k] = f(xs[k]);

  SimplexResult result;
  std::vector<int> order(n + 1);
  for (int it = 0; it < max_iters; ++it) {
    for (int k = 0; k <= n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];

    double diameter = 0.0;
    for (int k = 0; k <= n; ++k)
      diameter = std::max(diameter, (xs[k] - xs[best]).cwiseAbs().maxCoeff());
    result.iterations = it;
    if (diameter < diameter_tol) { result.converged = true; break; }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int k = 0; k <= n; ++k)
      if (k != worst) centroid += xs[k];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
    const double fr = f(reflected);
    if (fr < fs[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(expanded);
      if (fe < fr) { xs[worst] = expanded; fs[worst] = fe; }
      else { xs[worst] = reflected; fs[worst] = fr; }
    } else if (fr < fs[second]) {
      xs[worst] = reflected;
      fs[worst] = fr;
    } else {
      const Eigen::VectorXd contracted =
          centroid + 0.5 * ((fr < fs[worst] ? reflected : xs[worst]) - centroid);
      const double fc = f(contracted);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = fc;
      } else {
        for (int k = 0; k <= n; ++k) {
          if (k == best) continue;
          xs[k] = xs[best] + 0.5 * (xs[k] - xs[best]);
          fs[k] = f(xs[k]);
        }
      }
    }
  }
  int arg = 0;
  for (int k = 1; k <= n; ++k)
    if (fs[k] < fs[arg]) arg = k;
  result.x = xs[arg];
  result.value = fs[arg];
  return result;
}

}  // namespace finnet
