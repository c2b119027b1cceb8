#ifndef PADSIM_BLOCH_HPP
#define PADSIM_BLOCH_HPP

// Laser-driven g <-> xi2 dynamics through the leaky Y-polarised cavity mode.
//
// Conventions. <sigma_-> = (P1 + i P2) / 2 and <sigma_3> = P3, so the ground
// state is (0, 0, -1) and the half-way state (|g> + |xi2>)/sqrt(2) is
// (1, 0, 0). The drive enters the cavity as eps_in(t) = eps exp(i phase) on
// [t_start, t_end] with n_in = eps^2 / (Gamma2 + gamma2). In the leaky-cavity
// limit the equations of motion are
//
//   d<s_->/dt = -G <s_-> - i W exp(i phase) <s_3>
//   d<s_3>/dt = -2 G (<s_3> + 1) - 2 i W (exp(-i phase) <s_-> - c.c.)
//
// with G = Gamma2 + gamma2 and W = G sqrt(2 beta2 n_in). A drive phase of
// -pi/2 rotates the ground state towards the half-way state.

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "padsim/params.hpp"

namespace padsim::bloch {

using cplx = std::complex<double>;

/// Drive phase that takes |g> to the half-way state.
inline constexpr double kHalfwayPhase = -std::numbers::pi / 2.0;

struct DrivePulse {
  double n_in = 0.0;    ///< mean input photon number eps^2 / (Gamma2 + gamma2)
  double phase = kHalfwayPhase;
  double t_start = 0.0;
  double t_end = 0.0;

  void validate() const;
};

struct BlochState {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = -1.0;

  static constexpr BlochState ground() { return {0.0, 0.0, -1.0}; }
  static constexpr BlochState excited() { return {0.0, 0.0, 1.0}; }
  static constexpr BlochState halfway() { return {1.0, 0.0, 0.0}; }

  double norm() const;
  cplx sigma_minus() const { return {0.5 * p1, 0.5 * p2}; }
};

/// Closed-form solution coefficients for a constant drive. The exponents
/// lambda_pm = -(G/2)(3 +- upsilon) are shared by the longitudinal and the
/// drive-quadrature transverse components; the in-phase quadrature decays at G.
struct RabiCoefficients {
  cplx upsilon;       ///< sqrt(1 - 32 beta2 n_in)
  cplx lambda_plus;
  cplx lambda_minus;
  cplx f_plus;        ///< +16 beta2 n_in / (upsilon (3 + upsilon))
  cplx f_minus;       ///< -16 beta2 n_in / (upsilon (3 - upsilon))
  cplx i_plus;        ///< initial-condition terms
  cplx i_minus;
  cplx s_minus;       ///< steady-state <sigma_->
  double s_3 = -1.0;  ///< steady-state <sigma_3> = -(f_plus + f_minus + 1)
  double rabi_ratio = 0.0;  ///< W / G = sqrt(2 beta2 n_in)
  double n_in = 0.0;        ///< photon number actually used (nudged off upsilon = 0)
  double relaxation = 0.0;  ///< G
};

struct HalfwayProjection {
  double p_h = 0.5;       ///< (1 + P1) / 2
  double p_h_perp = 0.5;  ///< (1 - P1) / 2
  double coherence = -0.5;  ///< P3 / 2
};

struct AtomTrajectory {
  std::vector<double> times;
  std::vector<BlochState> states;
};

RabiCoefficients rabi_coefficients(const DerivedRates& r, const DrivePulse& pulse,
                                   const BlochState& initial);

/// State at time t >= pulse.t_start, starting from `initial` at t_start.
/// Past t_end the drive is off and the state relaxes freely.
BlochState evolve_driven(const DerivedRates& r, const DrivePulse& pulse,
                         const BlochState& initial, double t);

/// Undriven relaxation over dt.
BlochState evolve_free(const DerivedRates& r, const BlochState& s, double dt);

HalfwayProjection halfway_projection(const BlochState& s);

/// First local maximum of P_h(t - t_start) under a continuous drive from the
/// ground state, refined to 1e-3 / kappa. Throws ConvergenceError when the
/// drive is overdamped (32 beta2 n_in <= 1) or no maximum is found.
double find_rotation_time(const DerivedRates& r, double n_in, double phase = kHalfwayPhase);

/// (pi/2) / omega_R with omega_R = (G/2) |Im upsilon|; +inf when overdamped.
double quarter_period_estimate(const DerivedRates& r, double n_in);

/// Largest P_h over a pulse of length `window` starting from the ground state.
double max_halfway_probability(const DerivedRates& r, double n_in, double window);

/// Closed-form trajectory sampled at `times` (each >= pulse.t_start).
AtomTrajectory sample_driven(const DerivedRates& r, const DrivePulse& pulse,
                             const BlochState& initial, std::span<const double> times);

enum class CavityDrive {
  kMemoryKernel,  ///< cavity amplitude E obeys dE/dt = -kappa E + eps_in(t)
  kAdiabatic,     ///< E follows eps_in(t) / kappa instantly
};

/// Numerical integration of the equations of motion, independent of the
/// closed form. The state vector is (Re<s_->, Im<s_->, <s_3>, e) with the
/// intracavity drive amplitude E = exp(i phase) e. Integrated piecewise across
/// the pulse edges with relative tolerance 1e-8.
AtomTrajectory ode_oracle(const DerivedRates& r, const DrivePulse& pulse,
                          std::span<const double> t_grid, double kappa,
                          const BlochState& initial = BlochState::ground(),
                          CavityDrive drive = CavityDrive::kMemoryKernel);

}  // namespace padsim::bloch

#endif  // PADSIM_BLOCH_HPP
