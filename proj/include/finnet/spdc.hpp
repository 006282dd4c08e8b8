#pragma once

#include "finnet/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace finnet {

// Polarization measurement setting: a wave-plate rotation angle and phase.
struct AngleSetting {
  double theta = 0.0;
  double phi = 0.0;
};

// Two-mode-squeezed polarization pair source with pump amplitudes t1, t2 and
// two local settings per side.
struct SPDCParams {
  double t1 = 0.5;
  double t2 = 0.5;
  std::array<AngleSetting, 2> alice{};
  std::array<AngleSetting, 2> bob{};
};

// Detector click pattern order used everywhere: oo, xo, ox, xx
// (h then v; o = no click, x = click). Pattern 0 is the double vacuum.
inline constexpr int kNoClick = 0;
extern const std::array<const char*, 4> kPatternNames;

using ClickTable = Eigen::Matrix4d;                       // Alice x Bob patterns
using SettingTables = std::array<std::array<ClickTable, 2>, 2>;  // [x][y]

Eigen::Matrix2cd rotation(double theta, double phi);
// Joint mode matrix for one setting pair.
Eigen::Matrix2cd mode_matrix(const SPDCParams& p, int x, int y);

// E[x^{n_ah} y^{n_av} z^{n_bh} w^{n_bv}] for indicators in {0,1}; requires all
// singular values of m below 1 (throws std::domain_error otherwise).
double generating_term(double t1, double t2, const Eigen::Matrix2cd& m, int x, int y,
                       int z, int w);

// Threshold-detector click distribution for one setting pair / all four pairs.
ClickTable click_probabilities(const SPDCParams& p, int x, int y);
SettingTables click_tables(const SPDCParams& p);

// Pattern -> binary outcome maps; entry 0 is ignored in post-selected scores.
struct Binning {
  std::array<int, 4> alice{};
  std::array<int, 4> bob{};
};

// CHSH score sum_{xy} (-1)^{xy} E_xy with E from the binned tables. The
// post-selected variant drops double-vacuum outcomes and renormalizes each
// setting block by its conclusive mass.
double chsh_score(const SettingTables& tables, const Binning& binning,
                  bool postselected);

double success_probability(double t1, double t2);  // 1 - (1-t1^2)(1-t2^2)

// Device-independent randomness of the maximal-violation family, in bits.
double randomness_rate(double chsh);
// Post-selected rate scaled by the conclusive probability.
double postselected_randomness_rate(double chsh_ps, double t1, double t2);

enum class Objective {
  standard_chsh,
  standard_randomness,
  ps_chsh,
  ps_randomness,
};

Objective objective_from_string(const std::string& name);
std::string to_string(Objective objective);
bool is_postselected(Objective objective);

struct OptimizeOptions {
  Objective objective = Objective::standard_chsh;
  bool equal_t = true;                 // constrain t1 == t2
  std::optional<double> fixed_t = {};  // pin t1 == t2 to a given value
  bool zero_phases = false;            // search rotation angles only, phases 0
  int restarts = 200;
  std::uint64_t seed = 0;
  int max_iters = 4000;
  double diameter_tol = 1e-9;
};

// True when any wave-plate phase deviates from 0 modulo 2 pi.
bool uses_phase(const SPDCParams& params, double tol = 1e-6);

struct OptimizeResult {
  SPDCParams params;
  Binning binning;
  double value = 0.0;        // objective value
  double chsh = 0.0;         // score entering the objective
  double randomness = 0.0;   // rate at that score
  double success_prob = 0.0;
  int best_restart = -1;
  std::vector<double> restart_values;
};

// Multi-start Nelder-Mead over pump amplitudes, angles and phases, maximizing
// over the finite set of binnings inside the objective. Deterministic for a
// fixed seed; ties between restarts resolve to the earliest.
OptimizeResult optimize(const OptimizeOptions& options);

// Evaluate all reported quantities at given parameters (best binning).
OptimizeResult evaluate(const SPDCParams& params, Objective objective);

struct ScanOptions {
  double t_min = 0.05;
  double t_max = 0.95;
  int steps = 10;
  int restarts = 40;
  std::uint64_t seed = 0;
  bool zero_phases = false;
  Objective standard_objective = Objective::standard_randomness;
  Objective ps_objective = Objective::ps_randomness;
};

struct ScanRow {
  double t = 0.0;
  double standard_value = 0.0;
  double ps_value = 0.0;
};

// Per-pump-amplitude inner optimization over angles for both objectives.
std::vector<ScanRow> scan(const ScanOptions& options);

}  // namespace finnet
