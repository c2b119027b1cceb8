#include "padsim/scattering.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "padsim/errors.hpp"
#include "padsim/numerics.hpp"

namespace padsim::scattering {

namespace {

constexpr double kDegenerateNudge = 1e-7;
constexpr double kRealnessTolerance = 1e-10;

// Weights (a, b) with int_0^h e^{-W s} p(s) ds = a p(0) + b p(h) for linear p.
struct PanelWeights {
  cplx decay;
  cplx a;
  cplx b;
};

PanelWeights panel_weights(cplx w, double h) {
  const cplx x = w * h;
  PanelWeights pw;
  pw.decay = std::exp(-x);
  cplx first;   // (1 - e^{-x}) / x
  cplx second;  // (1 - e^{-x} - x e^{-x}) / x^2
  if (std::abs(x) < 1e-3) {
    first = 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    second = 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
  } else {
    first = (1.0 - pw.decay) / x;
    second = (1.0 - pw.decay - x * pw.decay) / (x * x);
  }
  pw.b = h * second;
  pw.a = h * first - pw.b;
  return pw;
}

// acc[k] = int_{r_k}^{r_end} e^{-W (r' - r_k)} psi(r') dr'
std::vector<cplx> causal_tail(const std::vector<cplx>& psi, cplx w, double dr) {
  std::vector<cplx> acc(psi.size(), cplx(0.0));
  if (psi.size() < 2) return acc;
  const PanelWeights pw = panel_weights(w, dr);
  for (std::size_t k = psi.size() - 1; k-- > 0;) {
    acc[k] = pw.decay * acc[k + 1] + pw.a * psi[k] + pw.b * psi[k + 1];
  }
  return acc;
}

bool all_real(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return z.imag() == 0.0; });
}

void require_same_grid(const PhotonWavepacket& a, const PhotonWavepacket& b) {
  if (a.size() != b.size() || std::abs(a.dr - b.dr) > 1e-12 * a.dr ||
      std::abs(a.r0 - b.r0) > 1e-9 * std::max(1.0, std::abs(a.r0)))
    throw DomainError("wavepackets are not on the same grid");
}

}  // namespace

double PhotonWavepacket::norm_squared() const {
  double s = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double w = (k == 0 || k + 1 == amps.size()) ? 0.5 : 1.0;
    s += w * std::norm(amps[k]);
  }
  return s * dr;
}

cplx PhotonWavepacket::at(double x) const {
  if (amps.empty()) return 0.0;
  const double u = (x - r0) / dr;
  if (u < 0.0 || u > static_cast<double>(amps.size() - 1)) return 0.0;
  const auto k = static_cast<std::size_t>(u);
  if (k + 1 >= amps.size()) return amps.back();
  const double frac = u - static_cast<double>(k);
  return amps[k] + frac * (amps[k + 1] - amps[k]);
}

KernelParams omega_pm(const SystemParams& p, bool include_spontaneous) {
  p.validate();
  KernelParams k;
  k.kappa = p.kappa;
  k.kappa_effective = p.kappa + (include_spontaneous ? p.gamma1 : 0.0);
  k.g1_effective = p.g1;
  if (std::abs(2.0 * k.g1_effective - k.kappa_effective) <= 1e-12 * k.kappa_effective) {
    k.g1_effective = p.g1 * (1.0 + kDegenerateNudge);
    std::ostringstream os;
    os << "omega_pm: degenerate kernel at g1 = kappa_eff/2, g1 nudged to " << k.g1_effective;
    warn(os.str());
  }
  const double ke = k.kappa_effective;
  const cplx root = std::sqrt(cplx(ke * ke - 4.0 * k.g1_effective * k.g1_effective, 0.0));
  k.omega_plus = 0.5 * (ke + root);
  k.omega_minus = 0.5 * (ke - root);
  return k;
}

GridSpec default_grid(double L, const KernelParams& k) {
  if (!(L > 0.0)) throw DomainError("default_grid: L must be positive");
  double slowest = std::numeric_limits<double>::infinity();
  for (cplx w : {k.omega_plus, k.omega_minus})
    if (w.real() > 0.0) slowest = std::min(slowest, w.real());
  const double margin = 20.0 / k.kappa + (std::isfinite(slowest) ? 10.0 / slowest : 0.0);
  return {std::min(L, 1.0 / k.kappa) / 200.0, -2.5 * L - margin, 2.5 * L};
}

PhotonWavepacket double_exponential_pulse(double L, const GridSpec& grid) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("pulse: L must be positive");
  const double dr = grid.dr > 0.0 ? grid.dr : std::min(L, 1.0) / 200.0;
  if (dr > L / 50.0) throw DomainError("pulse: grid spacing coarser than L/50");
  if (!(grid.r_max > grid.r_min)) throw DomainError("pulse: empty grid range");

  const double lo = std::floor(grid.r_min / dr);
  const double hi = std::ceil(grid.r_max / dr);
  PhotonWavepacket w;
  w.dr = dr;
  w.r0 = lo * dr;
  w.L = L;
  const auto n = static_cast<std::size_t>(hi - lo) + 1;
  w.amps.resize(n);
  const double amp = 1.0 / std::sqrt(0.5 * L);
  for (std::size_t k = 0; k < n; ++k) w.amps[k] = amp * std::exp(-2.0 * std::abs(w.r(k)) / L);
  const double scale = 1.0 / std::sqrt(w.norm_squared());
  for (auto& a : w.amps) a *= scale;
  return w;
}

PhotonWavepacket scatter(const PhotonWavepacket& psi_in, const KernelParams& k) {
  const auto tail_plus = causal_tail(psi_in.amps, k.omega_plus, psi_in.dr);
  const auto tail_minus = causal_tail(psi_in.amps, k.omega_minus, psi_in.dr);
  const cplx pref = 2.0 * k.kappa / (k.omega_plus - k.omega_minus);
  const bool real_input = all_real(psi_in.amps);

  PhotonWavepacket out = psi_in;
  double scale = 0.0;
  for (cplx a : psi_in.amps) scale = std::max(scale, std::abs(a));
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx ac = pref * (k.omega_plus * tail_plus[i] - k.omega_minus * tail_minus[i]);
    if (real_input) {
      if (std::abs(ac.imag()) > kRealnessTolerance * std::max(scale, 1.0)) {
        std::ostringstream os;
        os << "scatter: imaginary residue " << ac.imag() << " for a real input";
        throw Error(os.str());
      }
      ac = ac.real();
    }
    out.amps[i] = -psi_in.amps[i] + ac;
  }
  return out;
}

double overlap(const PhotonWavepacket& psi_in, const PhotonWavepacket& psi_out, double d,
               double sign) {
  const double shift = d / psi_out.dr + (psi_out.r0 - psi_in.r0) / psi_in.dr;
  const double rounded = std::round(shift);
  if (std::abs(psi_in.dr - psi_out.dr) <= 1e-12 * psi_in.dr && std::abs(shift - rounded) < 1e-9) {
    // Delay is a whole number of grid steps: pair samples directly.
    const auto off = static_cast<std::ptrdiff_t>(rounded);
    const auto n_in = static_cast<std::ptrdiff_t>(psi_in.size());
    const auto n_out = static_cast<std::ptrdiff_t>(psi_out.size());
    const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, -off);
    const std::ptrdiff_t last = std::min(n_out - 1, n_in - 1 - off);
    double s = 0.0;
    for (std::ptrdiff_t i = first; i <= last; ++i) {
      const double w = (i == 0 || i == n_out - 1) ? 0.5 : 1.0;
      s += w * (psi_in.amps[static_cast<std::size_t>(i + off)] * psi_out.amps[static_cast<std::size_t>(i)]).real();
    }
    return sign * s * psi_out.dr;
  }

  // Only output samples whose shifted coordinate lands inside the input grid contribute.
  const double lo = psi_in.r0 - d;
  const double hi = psi_in.r_end() - d;
  const double dr = psi_out.dr;
  const auto n = static_cast<std::ptrdiff_t>(psi_out.size());
  std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor((lo - psi_out.r0) / dr)));
  std::ptrdiff_t last = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::ceil((hi - psi_out.r0) / dr)));
  double s = 0.0;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const auto idx = static_cast<std::size_t>(i);
    s += w * (psi_in.at(psi_out.r(idx) + d) * psi_out.amps[idx]).real();
  }
  return sign * s * dr;
}

FidelityCurve fidelity_curve(const PhotonWavepacket& psi_in, const PhotonWavepacket& out_g,
                             const PhotonWavepacket& out_xi2, const std::vector<double>& delays) {
  require_same_grid(psi_in, out_g);
  require_same_grid(psi_in, out_xi2);
  FidelityCurve c;
  c.delays = delays;
  c.f_g.reserve(delays.size());
  c.f_xi2.reserve(delays.size());
  for (double d : delays) {
    c.f_g.push_back(overlap(psi_in, out_g, d, -1.0));
    c.f_xi2.push_back(overlap(psi_in, out_xi2, d, +1.0));
  }
  return c;
}

double delay_window(double L, const SystemParams& p) {
  const double Gamma1 = p.g1 * p.g1 / p.kappa;
  const double extra = Gamma1 > 0.0 ? 2.0 / Gamma1 : 0.0;
  return 10.0 / p.kappa + L / 10.0 + extra;
}

double g2_bound(double delta_t_int, double kappa) {
  if (!(delta_t_int > 0.0)) throw DomainError("g2_bound: interaction time must be positive");
  return std::sqrt(kappa / (100.0 * delta_t_int));
}

namespace {

struct DelayScan {
  numerics::Peak peak;
  bool crossed = false;
  double d_p = 0.0;
  double f_int = 0.0;
  double window = 0.0;
  double gap_at_zero = 0.0;
};

DelayScan scan_delays(const SystemParams& p, double L, const GateOptions& opt, bool want_crossing) {
  p.validate();
  if (!(L > 0.0)) throw DomainError("gate_fidelity: L must be positive");
  if (!(opt.bracket_step > 0.0)) throw DomainError("gate_fidelity: bracket step must be positive");

  const KernelParams kg = omega_pm(p, opt.include_spontaneous);
  SystemParams decoupled = p;
  decoupled.g1 = 0.0;
  const KernelParams kx = omega_pm(decoupled, false);

  GridSpec grid = default_grid(L, kg);
  if (opt.dr > 0.0) grid.dr = opt.dr;
  const PhotonWavepacket in = double_exponential_pulse(L, grid);
  const PhotonWavepacket out_g = scatter(in, kg);
  const PhotonWavepacket out_x = scatter(in, kx);

  auto f_g = [&](double d) { return overlap(in, out_g, d, -1.0); };
  auto f_x = [&](double d) { return overlap(in, out_x, d, +1.0); };
  auto gap = [&](double d) { return f_g(d) - f_x(d); };

  DelayScan scan;
  scan.window = delay_window(L, p);
  const auto steps = static_cast<std::size_t>(std::ceil(scan.window / opt.bracket_step));
  scan.peak.value = -std::numeric_limits<double>::infinity();
  double prev_d = 0.0;
  double prev_gap = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double d = std::min(scan.window, static_cast<double>(i) * opt.bracket_step);
    const double g = f_g(d);
    if (g > scan.peak.value) {
      scan.peak = {d, g, false};
      best = i;
    }
    if (want_crossing) {
      const double cur = g - f_x(d);
      if (i == 0) scan.gap_at_zero = cur;
      if (!scan.crossed && i > 0 && ((prev_gap <= 0.0) != (cur <= 0.0))) {
        scan.d_p = numerics::find_root(gap, prev_d, d, opt.tolerance);
        scan.crossed = true;
      }
      prev_gap = cur;
    }
    prev_d = d;
  }
  scan.peak.at_boundary = (best == 0 || best == steps);
  const double lo = std::max(0.0, scan.peak.x - opt.bracket_step);
  const double hi = std::min(scan.window, scan.peak.x + opt.bracket_step);
  const numerics::Peak refined = numerics::golden_max(f_g, lo, hi, 1e-4);
  if (refined.value > scan.peak.value) {
    scan.peak.x = refined.x;
    scan.peak.value = refined.value;
  }
  if (scan.crossed) scan.f_int = 0.5 * (f_g(scan.d_p) + f_x(scan.d_p));
  return scan;
}

}  // namespace

numerics::Peak fidelity_g_peak(const SystemParams& p, double L, const GateOptions& opt) {
  return scan_delays(p, L, opt, false).peak;
}

GateFidelityResult gate_fidelity(const SystemParams& p, double L, const GateOptions& opt) {
  const DelayScan scan = scan_delays(p, L, opt, true);
  if (!scan.crossed) {
    std::ostringstream os;
    os << "gate_fidelity: F_g and F_xi2 do not cross on [0, " << scan.window << "] for g1 = " << p.g1
       << ", L = " << L << " (F_g - F_xi2 at d = 0: " << scan.gap_at_zero
       << ", max F_g = " << scan.peak.value << " at d = " << scan.peak.x << ")";
    throw ConvergenceError(os.str());
  }
  GateFidelityResult res;
  res.d_p = scan.d_p;
  res.f_int = scan.f_int;
  res.delta_t_int = 3.5 * L + res.d_p;
  res.g2_max = g2_bound(res.delta_t_int, p.kappa);
  res.f_g_peak = scan.peak.value;
  res.f_g_peak_delay = scan.peak.x;
  return res;
}

PhotonWavepacket time_domain_oracle(const PhotonWavepacket& psi_in, const SystemParams& p) {
  p.validate();
  if (psi_in.size() < 2) throw DomainError("time_domain_oracle: packet too short");
  const double kappa = p.kappa;
  const double g1 = p.g1;
  const double feed = std::sqrt(2.0 * kappa);

  // The photon reaches the mirror at t = -r; integrate from the right edge leftwards.
  const std::size_t n = psi_in.size();
  std::vector<double> times(n);
  for (std::size_t j = 0; j < n; ++j) times[j] = -psi_in.r(n - 1 - j);

  numerics::OdeProblem prob;
  prob.rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const cplx phi(y[0], y[1]);
    const cplx lam(y[2], y[3]);
    const cplx drive = psi_in.at(-t);
    const cplx i(0.0, 1.0);
    const cplx dphi = -i * g1 * lam;
    const cplx dlam = -i * g1 * phi - kappa * lam - feed * drive;
    dy[0] = dphi.real();
    dy[1] = dphi.imag();
    dy[2] = dlam.real();
    dy[3] = dlam.imag();
  };
  prob.initial = {0.0, 0.0, 0.0, 0.0};
  prob.t0 = times.front();
  prob.t1 = times.back();
  prob.rel_tol = 1e-9;
  prob.abs_tol = 1e-13;
  prob.max_step = 4.0 * psi_in.dr;
  const auto states = numerics::integrate(prob, times);

  PhotonWavepacket out = psi_in;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = n - 1 - j;
    const cplx lam(states[j][2], states[j][3]);
    out.amps[k] = -psi_in.amps[k] - feed * lam;
  }
  return out;
}

double l2_distance(const PhotonWavepacket& a, const PhotonWavepacket& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a.amps[k] - b.amps[k]);
  return std::sqrt(s * a.dr);
}

void write_wavepacket_csv(std::ostream& os, const PhotonWavepacket& w) {
  os << "r_c_per_kappa,re_psi,im_psi\n";
  os.precision(12);
  for (std::size_t k = 0; k < w.size(); ++k)
    os << w.r(k) << ',' << w.amps[k].real() << ',' << w.amps[k].imag() << '\n';
  if (!os) throw IoError("failed writing wavepacket CSV");
}

PhotonWavepacket read_wavepacket_csv(std::istream& is) {
  std::string line;
  std::vector<double> rs;
  PhotonWavepacket w;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' || line[0] == '+' ||
          line[0] == '.'))
      continue;  // header
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cols.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("wavepacket CSV: bad number on line " + std::to_string(line_no));
      }
    }
    if (cols.size() != 2 && cols.size() != 3)
      throw IoError("wavepacket CSV: expected 2 or 3 columns on line " + std::to_string(line_no));
    rs.push_back(cols[0]);
    w.amps.emplace_back(cols[1], cols.size() == 3 ? cols[2] : 0.0);
  }
  if (rs.size() < 2) throw IoError("wavepacket CSV: need at least two samples");
  w.r0 = rs.front();
  w.dr = (rs.back() - rs.front()) / static_cast<double>(rs.size() - 1);
  if (!(w.dr > 0.0)) throw IoError("wavepacket CSV: coordinates must increase");
  for (std::size_t k = 1; k < rs.size(); ++k)
    if (std::abs(rs[k] - rs[k - 1] - w.dr) > 1e-6 * w.dr)
      throw IoError("wavepacket CSV: grid is not uniform");
  return w;
}

}  // namespace padsim::scattering
