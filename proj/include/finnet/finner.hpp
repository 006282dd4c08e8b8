#pragma once

#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/types.hpp"

#include <string>
#include <vector>

namespace finnet {

// Inequality scorecard for the all-conclusive event.
//   lhs  = P[every party conclusive]
//   rhs  = sqrt(prod_j P[party j conclusive])   (bipartite case)
// or, for the general weighted probability form, rhs = prod_j P_j^{x_j}.
// slack = rhs - lhs (nonnegative for network-local models).
struct FinnerReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool saturated = false;
  double tol = tol::analytic;
  RealVector marginals;                 // per party
  RealVector implied_e;                 // per source; NaN when undefined
  std::vector<bool> implied_e_defined;  // empty when not applicable
};

// Bipartite graphs only. implied_e per source i with ends (j, j'):
//   e_i = 1 - P_j P_j' / P_jj'   with  P_jj' = P[both j and j' conclusive];
// undefined when P_jj' vanishes.
FinnerReport finner_check(const OutcomeDistribution& dist, const NetworkGraph& graph,
                          double tol = tol::analytic);

// Structural certificate for saturating models. All operators are restricted to
// per-edge Schmidt supports, so every check lives in Schmidt coordinates.
struct RigidityVerdict {
  struct PartyCheck {
    bool projector = false;    // conclusive sum squares to itself on the support
    bool commutes = false;     // conclusive sum commutes with the local state
    bool factorizes = false;   // conclusive sum splits into per-edge factors
    double projector_err = 0.0;
    double commute_err = 0.0;
    double second_singular = 0.0;  // worst product-test second singular value
  };
  struct SourceCheck {
    bool ends_match = false;     // the two end factors agree as matrices
    bool diagonal_ok = false;    // each end factor commutes with diag(lambda^2)
    bool e_consistent = false;   // distribution e matches 1 - sum lambda^2 chi
    double match_err = 0.0;
    double diagonal_err = 0.0;
    double e_structure = 0.0;    // 1 - tr(diag(lambda^2) Pi)
    double e_distribution = 0.0; // implied_e from the joint distribution
  };
  bool rigid = false;
  double tol = tol::analytic;
  std::vector<PartyCheck> parties;
  std::vector<SourceCheck> sources;
};

RigidityVerdict rigidity_verify(const QuantumNetworkModel& model,
                                double tol = tol::analytic);

// Explicit local-variable bound witness built from Schmidt data. Each source
// broadcasts an independent uniform pair of Schmidt indices; each party's
// response g_j is the weighted magnitude of a conclusive-block matrix element.
// The report traces the chain
//   P[all conclusive] <= E[prod_j g_j] <= sqrt(prod_j E[g_j^2])
//                      = sqrt(prod_j tr(sqrt(rho_j) M_j sqrt(rho_j) M_j))
//                     <= sqrt(prod_j tr(rho_j M_j^2))
//                     <= sqrt(prod_j P[party j conclusive])
// and flags which links are tight.
struct GOracleLink {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool tight = false;
};

struct GOracleReport {
  double p_all = 0.0;
  double e_prod_g = 0.0;
  RealVector e_g_sq;          // per party, by direct index enumeration
  RealVector tr_srms;         // per party, tr(sqrt(rho) M sqrt(rho) M)
  RealVector tr_rho_m2;       // per party
  RealVector tr_rho_m;        // per party (= conclusive marginal)
  std::vector<GOracleLink> links;
  bool identities_ok = false;  // E[g^2] equals tr(sqrt(rho) M sqrt(rho) M) everywhere
  bool phase_aligned = false;  // E[prod g] equals P[all conclusive]
  double tol = 1e-10;
};

// Default target: the conclusive block (all non-failure outcomes) per party.
GOracleReport g_oracle(const QuantumNetworkModel& model, double tol = 1e-10);
GOracleReport g_oracle(const QuantumNetworkModel& model,
                       const std::vector<std::vector<int>>& target_outcomes,
                       double tol = 1e-10);

}  // namespace finnet
