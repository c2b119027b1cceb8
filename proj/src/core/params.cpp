#include "padsim/params.hpp"

#include <cmath>
#include <limits>

#include "padsim/errors.hpp"

namespace padsim {

void SystemParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(g1 >= 0.0) || !std::isfinite(g1)) throw DomainError("g1 must be nonnegative");
  if (!(g2 >= 0.0) || !std::isfinite(g2)) throw DomainError("g2 must be nonnegative");
  if (!(gamma1 >= 0.0) || !std::isfinite(gamma1)) throw DomainError("gamma1 must be nonnegative");
}

DerivedRates derive_rates(const SystemParams& p) {
  p.validate();
  DerivedRates r;
  r.Gamma1 = p.g1 * p.g1 / p.kappa;
  r.Gamma2 = p.g2 * p.g2 / p.kappa;
  r.gamma2 = p.g1 > 0.0 ? p.gamma1 * p.g2 / p.g1 : 0.0;
  const double total = r.Gamma2 + r.gamma2;
  r.beta2 = total > 0.0 ? r.Gamma2 / total : 1.0;
  return r;
}

double intracavity_photons(double n_in, const DerivedRates& r, double kappa) {
  if (!(n_in >= 0.0)) throw DomainError("intracavity_photons: n_in must be nonnegative");
  if (!(kappa > 0.0)) throw DomainError("intracavity_photons: kappa must be positive");
  return 2.0 * n_in * r.Gamma2 / kappa;
}

RegimeReport regime_check(const SystemParams& p, double n_in) {
  const DerivedRates r = derive_rates(p);
  const double n_a = intracavity_photons(n_in, r, p.kappa);
  RegimeReport rep;
  const double denom = std::sqrt(n_a) * p.g2;
  rep.leaky_margin = denom > 0.0 ? p.kappa / denom : std::numeric_limits<double>::infinity();
  rep.strong_coupling_margin = p.g1 / p.kappa;
  rep.is_leaky = rep.leaky_margin >= kLeakyMarginThreshold;
  rep.is_strong = p.g1 >= p.kappa;
  return rep;
}

double waiting_time(double n_a, double threshold, double kappa) {
  if (!(threshold > 0.0)) throw DomainError("waiting_time: threshold must be positive");
  if (!(kappa > 0.0)) throw DomainError("waiting_time: kappa must be positive");
  if (n_a <= threshold) return 0.0;
  return std::log(n_a / threshold) / kappa;
}

double excited_survival(double Gamma2, double tau) {
  if (!(tau >= 0.0)) throw DomainError("excited_survival: tau must be nonnegative");
  return std::exp(-2.0 * Gamma2 * tau);
}

}  // namespace padsim
