#ifndef PADSIM_PARAMS_HPP
#define PADSIM_PARAMS_HPP

// Physical parameters of the V-type atom in a one-sided cavity. Natural units
// throughout: rates in units of the cavity field decay rate kappa, times in
// 1/kappa, lengths in c/kappa (c = 1).

namespace padsim {

struct SystemParams {
  double kappa = 1.0;   ///< cavity field decay rate
  double g1 = 1.0;      ///< coupling of the X-polarised mode to g <-> xi1
  double g2 = 0.0;      ///< coupling of the Y-polarised mode to g <-> xi2
  double gamma1 = 0.0;  ///< half spontaneous-emission rate of xi1 into non-cavity modes

  /// Throws DomainError unless kappa > 0 and the rest are nonnegative.
  void validate() const;
};

struct DerivedRates {
  double Gamma1 = 0.0;  ///< g1^2 / kappa
  double Gamma2 = 0.0;  ///< g2^2 / kappa, radiative decay of xi2 through the cavity
  double gamma2 = 0.0;  ///< gamma1 * g2 / g1 (0 when g1 = 0)
  double beta2 = 1.0;   ///< Gamma2 / (Gamma2 + gamma2)

  /// Total xi2 dipole relaxation rate, Gamma2 + gamma2.
  double total() const { return Gamma2 + gamma2; }
};

struct RegimeReport {
  double leaky_margin = 0.0;           ///< kappa / (sqrt(n_a) g2)
  double strong_coupling_margin = 0.0; ///< g1 / kappa
  bool is_leaky = false;
  bool is_strong = false;
};

/// A leaky margin at or above this counts as "kappa >> sqrt(n_a) g2".
inline constexpr double kLeakyMarginThreshold = 10.0;

DerivedRates derive_rates(const SystemParams& p);

/// Mean intracavity photon number 2 n_in Gamma2 / kappa under a steady drive.
double intracavity_photons(double n_in, const DerivedRates& r, double kappa);

RegimeReport regime_check(const SystemParams& p, double n_in);

/// Time for n_a exp(-kappa tau) to fall below threshold; 0 if it already is.
double waiting_time(double n_a, double threshold, double kappa = 1.0);

/// Upper bound exp(-2 Gamma2 tau) on the surviving xi2 population.
double excited_survival(double Gamma2, double tau);

}  // namespace padsim

#endif  // PADSIM_PARAMS_HPP
