#include "padsim/pad.hpp"

#include <cmath>

#include "padsim/errors.hpp"
#include "padsim/numerics.hpp"

namespace padsim::pad {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void DetectorModel::validate() const {
  require_probability(p_eff, "p_eff");
  require_probability(p_dark, "p_dark");
  require_probability(p_noise, "p_noise");
}

void PadTimings::validate() const {
  if (!(t_r >= 0.0) || !(delta_t_int >= 0.0) || !(tau >= 0.0))
    throw DomainError("pad timings must be nonnegative");
}

void RepeatedRun::validate() const {
  if (n < 1) throw DomainError("run: n must be at least 1");
  require_probability(p_t, "p_t");
  require_probability(p0, "p0");
  require_probability(p1, "p1");
  if (std::abs(p0 + p1 - 1.0) > 1e-12) throw DomainError("run: p0 + p1 must equal 1");
}

PadProbabilities sequence_probabilities(const DerivedRates& r, double n_in, double f_int,
                                        const PadTimings& timings) {
  timings.validate();
  require_probability(f_int, "F_int");
  using bloch::BlochState;

  const bloch::DrivePulse first{n_in, bloch::kHalfwayPhase, 0.0, timings.t_r};
  const BlochState rotated = bloch::evolve_driven(r, first, BlochState::ground(), timings.t_r);
  const BlochState waited = bloch::evolve_free(r, rotated, timings.delta_t_int);

  PadProbabilities out;
  out.p_h_end = bloch::halfway_projection(waited).p_h;
  out.p_i = out.p_h_end * f_int;

  // Phase flip by the signal photon, applied with probability F_int.
  const BlochState flipped{
      f_int * -waited.p1 + (1.0 - f_int) * waited.p1,
      f_int * -waited.p2 + (1.0 - f_int) * waited.p2,
      waited.p3,
  };
  const bloch::DrivePulse second{n_in, -bloch::kHalfwayPhase, 0.0, timings.t_r};
  const BlochState back = bloch::evolve_driven(r, second, flipped, timings.t_r);
  const BlochState detected = bloch::evolve_free(r, back, timings.tau);
  out.p_ii_xi2 = 0.5 * (1.0 + detected.p3);
  return out;
}

double p11(double p_i, double p_ii_xi2, const DetectorModel& det) {
  det.validate();
  require_probability(p_i, "p_i");
  require_probability(p_ii_xi2, "p_ii");
  return p_i * p_ii_xi2 * det.p_eff + det.p_noise;
}

double p01(double p_h_end, double p_ii_xi2, const DetectorModel& det) {
  det.validate();
  require_probability(p_h_end, "p_h");
  require_probability(p_ii_xi2, "p_ii");
  return (1.0 - p_h_end) * p_ii_xi2 * det.p_eff + det.p_dark + det.p_noise;
}

void apply_detector(PadProbabilities& probs, const DetectorModel& det) {
  probs.p11 = p11(probs.p_i, probs.p_ii_xi2, det);
  probs.p01 = p01(probs.p_h_end, probs.p_ii_xi2, det);
  probs.p01_gate_bookkeeping = p01(probs.p_i, probs.p_ii_xi2, det);
}

double geometric_sum(double p_t, double n) {
  if (p_t >= 1.0) return n;
  return (1.0 - std::pow(p_t, n)) / (1.0 - p_t);
}

Counts average_counts(double n, double p_t, double p0, double p1, double p11, double p01) {
  const double sum = geometric_sum(p_t, n);
  Counts c;
  c.with_photon = p11 * sum + p01 * (n - sum);
  c.without_photon = n * p01;
  c.total = p1 * c.with_photon + p0 * c.without_photon;
  return c;
}

Counts average_counts(const RepeatedRun& run, double p11, double p01) {
  run.validate();
  return average_counts(run.n, run.p_t, run.p0, run.p1, p11, p01);
}

double accuracy(double n, double p_t, double p0, double p1, double p11, double p01) {
  const Counts c = average_counts(n, p_t, p0, p1, p11, p01);
  if (!(c.total > 0.0)) throw DomainError("accuracy: no counts expected, P_PAD undefined");
  return p1 * p11 * geometric_sum(p_t, n) / c.total;
}

double accuracy(const RepeatedRun& run, double p11, double p01) {
  run.validate();
  return accuracy(run.n, run.p_t, run.p0, run.p1, p11, p01);
}

double accuracy_limit(double p_t, double p0, double p1, double p11, double p01) {
  if (p_t >= 1.0) {
    const double denom = p1 * p11 + p0 * p01;
    if (!(denom > 0.0)) throw DomainError("accuracy: no counts expected, P_PAD undefined");
    return p1 * p11 / denom;
  }
  // Sum saturates while the false counts keep growing with n.
  return 0.0;
}

Efficiency efficiency(double p_t, double p0, double p1, double p11, double p01, double n_max) {
  if (!(n_max >= 1.0)) throw DomainError("efficiency: n_max must be at least 1");
  auto excess = [&](double n) { return average_counts(n, p_t, p0, p1, p11, p01).total - p1; };
  Efficiency e;
  if (excess(1.0) >= 0.0) {
    e.n_star = 1.0;
  } else if (excess(n_max) < 0.0) {
    e.n_star = n_max;
    e.at_boundary = true;
  } else {
    e.n_star = numerics::find_root(excess, 1.0, n_max, 1e-10);
  }
  e.value = accuracy(e.n_star, p_t, p0, p1, p11, p01);
  return e;
}

Speedup cnot_speedup(const CavityGeometry& geom) {
  if (!(geom.v_with_access > 0.0) || !(geom.v_without > 0.0))
    throw DomainError("cnot_speedup: mode volumes must be positive");
  Speedup s;
  s.volume_ratio = geom.v_with_access / geom.v_without;
  s.g_ratio = std::sqrt(s.volume_ratio);
  // Three CPFs plus two rotations of ten CPF times each, at the stronger coupling.
  s.t_cnot_ratio = 23.0 / s.g_ratio;
  s.speedup = 3.0 / s.t_cnot_ratio;
  return s;
}

double p_noise(double n_a, double tau, double kappa) {
  if (!(n_a >= 0.0) || !(tau >= 0.0)) throw DomainError("p_noise: n_a and tau must be nonnegative");
  return n_a * std::exp(-kappa * tau);
}

}  // namespace padsim::pad
