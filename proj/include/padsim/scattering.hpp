#ifndef PADSIM_SCATTERING_HPP
#define PADSIM_SCATTERING_HPP

// One-photon scattering of an X-polarised wavepacket off the one-sided
// cavity. Positions r are in c/kappa; a photon travelling towards the mirror
// meets the cavity in order of increasing r, so the reflected packet is
//
//   psi_out(r) = -psi_in(r) + 2 kappa / (W+ - W-) *
//                  int_{r' > r} (W+ e^{-W+ (r'-r)} - W- e^{-W- (r'-r)}) psi_in(r') dr'
//
// with W+- the roots of W^2 - kappa_eff W + g1^2. Delays shift the output
// towards negative r.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "padsim/numerics.hpp"
#include "padsim/params.hpp"

namespace padsim::scattering {

using cplx = std::complex<double>;

struct PhotonWavepacket {
  double dr = 0.0;  ///< grid spacing
  double r0 = 0.0;  ///< coordinate of amps[0]
  std::vector<cplx> amps;
  double L = 0.0;   ///< nominal pulse length, 0 if not a double-exponential pulse

  std::size_t size() const { return amps.size(); }
  double r(std::size_t k) const { return r0 + static_cast<double>(k) * dr; }
  double r_end() const { return r(amps.empty() ? 0 : amps.size() - 1); }
  double norm_squared() const;
  /// Linear interpolation of the amplitude; zero outside the grid.
  cplx at(double r) const;
};

struct KernelParams {
  cplx omega_plus;
  cplx omega_minus;
  double g1_effective = 0.0;
  double kappa_effective = 1.0;
  double kappa = 1.0;  ///< prefactor rate of the cavity-leakage term
};

struct GridSpec {
  double dr = 0.0;     ///< 0 selects min(L, 1) / 200
  double r_min = 0.0;  ///< rounded down onto the grid through r = 0
  double r_max = 0.0;
};

struct FidelityCurve {
  std::vector<double> delays;
  std::vector<double> f_g;
  std::vector<double> f_xi2;
};

struct GateFidelityResult {
  double d_p = 0.0;
  double f_int = 0.0;
  double delta_t_int = 0.0;
  double g2_max = 0.0;
  double f_g_peak = 0.0;  ///< max F_g over the search window
  double f_g_peak_delay = 0.0;
};

struct GateOptions {
  bool include_spontaneous = false;
  double dr = 0.0;            ///< 0 selects the default grid spacing
  double bracket_step = 0.05;
  double tolerance = 1e-6;    ///< bisection width on d_p
};

/// Roots W+- of W^2 - kappa_eff W + g1^2 with kappa_eff = kappa (+ gamma1).
/// The degenerate point g1 = kappa_eff / 2 is evaluated with g1 nudged by
/// 1e-7 relative, and a warning is emitted.
KernelParams omega_pm(const SystemParams& p, bool include_spontaneous = false);

/// Grid wide enough that the slowest reemission tail decays past the left edge.
GridSpec default_grid(double L, const KernelParams& slowest);

/// psi(r) = exp(-2|r|/L) / sqrt(L/2), renormalised on the grid.
/// Throws DomainError for L <= 0, dr > L/50 or an inverted range.
PhotonWavepacket double_exponential_pulse(double L, const GridSpec& grid);

/// Reflected packet on the same grid. The convolution is integrated exactly
/// against the piecewise-linear interpolant of psi_in.
PhotonWavepacket scatter(const PhotonWavepacket& psi_in, const KernelParams& k);

/// F(d) = sign * Re int psi_in(r + d) psi_out(r) dr.
double overlap(const PhotonWavepacket& psi_in, const PhotonWavepacket& psi_out, double d,
               double sign);

/// F_g = -overlap(g branch), F_xi2 = +overlap(decoupled branch).
FidelityCurve fidelity_curve(const PhotonWavepacket& psi_in, const PhotonWavepacket& out_g,
                             const PhotonWavepacket& out_xi2, const std::vector<double>& delays);

/// Delay search window [0, 10 + L/10 + 2/Gamma1].
double delay_window(double L, const SystemParams& p);

/// Smallest crossing F_g(d_p) = F_xi2(d_p) in the delay window.
/// Throws ConvergenceError if the curves never cross there.
GateFidelityResult gate_fidelity(const SystemParams& p, double L, const GateOptions& opt = {});

/// Maximum of F_g over the delay window, whether or not the curves cross.
numerics::Peak fidelity_g_peak(const SystemParams& p, double L, const GateOptions& opt = {});

/// sqrt(kappa / (100 delta_t_int)).
double g2_bound(double delta_t_int, double kappa = 1.0);

/// Independent check of scatter(): integrates the atom (Phi) and cavity
/// (Lambda) amplitudes driven by the incoming packet and rebuilds
/// psi_out(r) = -psi_in(r) - sqrt(2 kappa) Lambda(-r). Lossless model only.
PhotonWavepacket time_domain_oracle(const PhotonWavepacket& psi_in, const SystemParams& p);

/// sqrt(sum |a - b|^2 dr) on a shared grid.
double l2_distance(const PhotonWavepacket& a, const PhotonWavepacket& b);

/// CSV with header "r_c_per_kappa,re_psi,im_psi".
void write_wavepacket_csv(std::ostream& os, const PhotonWavepacket& w);
/// Accepts three columns (r, Re, Im) or two (r, psi); the grid must be uniform.
PhotonWavepacket read_wavepacket_csv(std::istream& is);

}  // namespace padsim::scattering

#endif  // PADSIM_SCATTERING_HPP
