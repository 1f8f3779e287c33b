#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wageband/equilibrium.hpp"

namespace wageband {

struct WelfareReport {
  double R = 0.0;      ///< firm surplus
  double S = 0.0;      ///< worker surplus
  double W = 0.0;      ///< omega R + (1 - omega) S
  double omega = 0.0;  ///< weight on firm surplus
};

/// Surpluses integrated against the ability distribution: composite Simpson
/// over the separating path nodes plus closed-form pooling-region integrals.
/// Non-participants contribute zero.
WelfareReport surpluses(const Equilibrium& eq, const Model& model, double omega);

/// Re-weights a report at a different omega.
WelfareReport reweight(const WelfareReport& report, double omega);

/// Equilibrium utility of ability z (0 for non-participants).
double equilibrium_utility(const Equilibrium& eq, const Model& model, double z);
/// Equilibrium profit of the firm matched in assortative order with ability z,
/// i.e. firm x = n(z) (0 for firms left unmatched).
double equilibrium_profit(const Equilibrium& eq, const Model& model, double z);

/// Values of a policy equilibrium and a reference equilibrium on a uniform
/// ability grid, with the abilities where their difference changes sign.
struct Profile {
  std::vector<double> z;
  std::vector<double> policy;
  std::vector<double> reference;
  std::vector<double> crossings;  ///< abilities, increasing

  std::vector<double> difference() const;
  /// CSV with header `z,value_policy,value_reference`.
  void write_csv(std::ostream& out) const;
};

Profile worker_utility_profile(const Equilibrium& policy, const Equilibrium& reference,
                               const Model& model, int points = 600);
/// Firm-side analogue. Rows are indexed by the ability z whose assortative
/// partner is the firm x = n(z); crossings are reported in the same units.
Profile firm_profit_profile(const Equilibrium& policy, const Equilibrium& reference,
                            const Model& model, int points = 600);

/// Piecewise-linear CDF; repeated points encode atoms.
struct Cdf {
  std::vector<double> point;
  std::vector<double> cdf;

  /// Right-continuous evaluation.
  double operator()(double x) const;
  /// CSV with header `point,cdf`.
  void write_csv(std::ostream& out) const;
};

struct OutcomeDistributions {
  Cdf education;
  Cdf wage;
};

/// Education and wage distributions induced by the ability law. Non-participants
/// form an atom at education 0 and wage 0; the pooled block forms an atom at
/// (s_hi, t_hi).
OutcomeDistributions outcome_distributions(const Equilibrium& eq, const Model& model);

}  // namespace wageband
