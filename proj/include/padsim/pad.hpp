#ifndef PADSIM_PAD_HPP
#define PADSIM_PAD_HPP

// Photon-arrival detector performance: the rotate / phase-flip / rotate
// sequence on the atom, the resulting conditional click probabilities at the
// Y-mode detector, and the statistics of repeated attempts.

#include "padsim/bloch.hpp"
#include "padsim/params.hpp"

namespace padsim::pad {

struct DetectorModel {
  double p_eff = 0.1;      ///< detector quantum efficiency
  double p_dark = 1e-5;    ///< dark count per detection window
  double p_noise = 4.5e-4; ///< residual drive photons counted after the wait

  void validate() const;
};

struct PadTimings {
  double t_r = 0.0;           ///< duration of each rotation pulse
  double delta_t_int = 144.0; ///< signal-photon interaction time
  double tau = 4.2;           ///< wait between the second rotation and detection

  void validate() const;
};

struct PadProbabilities {
  double p_h_end = 0.0;  ///< P_h after the first rotation and the interaction time
  double p_i = 0.0;      ///< p_h_end * F_int
  double p_ii_xi2 = 0.0; ///< xi2 population after the full sequence with a signal photon
  double p11 = 0.0;
  double p01 = 0.0;
  /// p01 with the rotation failure taken as 1 - p_i instead of 1 - p_h_end.
  double p01_gate_bookkeeping = 0.0;
};

struct RepeatedRun {
  int n = 1;         ///< attempts
  double p_t = 1.0;  ///< round-trip linear transmittance
  double p0 = 0.5;   ///< prior of no signal photon
  double p1 = 0.5;   ///< prior of a signal photon

  void validate() const;
};

struct Counts {
  double total = 0.0;  ///< N
  double with_photon = 0.0;     ///< N1
  double without_photon = 0.0;  ///< N0
};

struct Efficiency {
  double value = 0.0;       ///< P_PAD at the operating point
  double n_star = 0.0;      ///< attempts (continuous) where N = P1
  bool at_boundary = false; ///< N never reached P1 on [1, n_max]
};

struct CavityGeometry {
  double v_with_access = 1.3e4;
  double v_without = 78.4;
};

struct Speedup {
  double volume_ratio = 0.0;
  double g_ratio = 0.0;
  double t_cnot_ratio = 0.0;
  double speedup = 0.0;
};

/// Fills p_h_end, p_i and p_ii_xi2. The first rotation uses the half-way
/// phase, the second the opposite phase for the same duration t_r. The photon
/// flips (P1, P2) with probability F_int.
PadProbabilities sequence_probabilities(const DerivedRates& r, double n_in, double f_int,
                                        const PadTimings& timings);

double p11(double p_i, double p_ii_xi2, const DetectorModel& det);
double p01(double p_h_end, double p_ii_xi2, const DetectorModel& det);

/// Adds p11 / p01 (both bookkeepings) to a sequence result.
void apply_detector(PadProbabilities& probs, const DetectorModel& det);

/// sum_{k=1..n} p_t^{k-1}, with n allowed to be fractional.
double geometric_sum(double p_t, double n);

Counts average_counts(const RepeatedRun& run, double p11, double p01);
/// Same model with a continuous attempt count.
Counts average_counts(double n, double p_t, double p0, double p1, double p11, double p01);

/// P1 p11 sum / N. Throws DomainError when N = 0.
double accuracy(const RepeatedRun& run, double p11, double p01);
double accuracy(double n, double p_t, double p0, double p1, double p11, double p01);

/// Large-n limit of accuracy at fixed p_t.
double accuracy_limit(double p_t, double p0, double p1, double p11, double p01);

/// Accuracy at the attempt count where the mean click number equals P1.
Efficiency efficiency(double p_t, double p0, double p1, double p11, double p01,
                      double n_max = 25.0);

Speedup cnot_speedup(const CavityGeometry& geom);

/// n_a exp(-kappa tau).
double p_noise(double n_a, double tau, double kappa = 1.0);

}  // namespace padsim::pad

#endif  // PADSIM_PAD_HPP
