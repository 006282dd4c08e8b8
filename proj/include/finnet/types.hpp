#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace finnet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

// Conclusive-vs-failure coarse graining uses this label for the failure outcome.
inline constexpr const char* kFailureLabel = "∅";

namespace tol {
inline constexpr double analytic = 1e-9;        // checks on analytically constructed inputs
inline constexpr double optimizer = 1e-6;       // checks on optimizer-produced inputs
inline constexpr double psd = 1e-10;            // eigenvalue floor for PSD validation
inline constexpr double identity_sum = 1e-10;   // POVM completeness
inline constexpr double unit_norm = 1e-12;      // accepted state norm deviation
inline constexpr double renormalize = 1e-6;     // norm deviation still silently renormalized
inline constexpr double support_cutoff = 1e-12; // spectral cutoff defining supports
inline constexpr double prob_floor = -1e-12;    // most negative tolerated probability
inline constexpr double dist_sum = 1e-10;       // distribution normalization
}  // namespace tol

inline constexpr long kDefaultDimCap = 4096;    // global Hilbert-space dimension cap
inline constexpr long kEnumerationCap = 10'000'000;  // dense table / enumeration cap

struct dimension_error : std::runtime_error {
  explicit dimension_error(const std::string& what) : std::runtime_error(what) {}
};

struct fair_sampling_error : std::runtime_error {
  explicit fair_sampling_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finnet
