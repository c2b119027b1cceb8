#include "padsim/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "padsim/errors.hpp"
#include "padsim/numerics.hpp"

namespace padsim::bloch {

namespace {

constexpr double kRealnessTolerance = 1e-10;

// Nudge applied to n_in when 1 - 32 beta2 n_in vanishes (removable singularity).
constexpr double kCriticalNudge = 1e-12;

cplx drive_frame(double phase) { return std::polar(1.0, phase); }

double checked_real(cplx value, double scale, const char* what) {
  if (std::abs(value.imag()) > kRealnessTolerance * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "closed-form " << what << " has imaginary residue " << value.imag();
    throw Error(os.str());
  }
  return value.real();
}

// Closed-form state a time tau after the drive switched on.
BlochState driven_segment(const DerivedRates& r, const DrivePulse& pulse,
                          const BlochState& initial, double tau) {
  if (pulse.n_in == 0.0) return evolve_free(r, initial, tau);

  const RabiCoefficients c = rabi_coefficients(r, pulse, initial);
  const cplx ep = std::exp(c.lambda_plus * tau);
  const cplx em = std::exp(c.lambda_minus * tau);
  const cplx amp_plus = ep * (c.i_plus + c.f_plus);
  const cplx amp_minus = em * (c.i_minus + c.f_minus);
  const double scale = std::max(std::abs(amp_plus), std::abs(amp_minus));

  const double p3 = checked_real(amp_plus + amp_minus + c.s_3, scale, "<sigma_3>");

  const cplx rot = drive_frame(pulse.phase);
  const cplx u0 = std::conj(rot) * initial.sigma_minus();
  const double quad_steady = (std::conj(rot) * c.s_minus).imag();
  const double quad = checked_real(((1.0 - c.upsilon) * amp_plus + (1.0 + c.upsilon) * amp_minus) /
                                           (8.0 * c.rabi_ratio) +
                                       quad_steady,
                                   scale / c.rabi_ratio, "<sigma_->");
  const double in_phase = u0.real() * std::exp(-c.relaxation * tau);
  const cplx sm = rot * cplx(in_phase, quad);
  return {2.0 * sm.real(), 2.0 * sm.imag(), p3};
}

}  // namespace

void DrivePulse::validate() const {
  if (!(n_in >= 0.0) || !std::isfinite(n_in)) throw DomainError("drive: n_in must be nonnegative");
  if (!std::isfinite(phase)) throw DomainError("drive: phase must be finite");
  if (!(t_end >= t_start)) throw DomainError("drive: t_end must not precede t_start");
}

double BlochState::norm() const { return std::sqrt(p1 * p1 + p2 * p2 + p3 * p3); }

RabiCoefficients rabi_coefficients(const DerivedRates& r, const DrivePulse& pulse,
                                   const BlochState& initial) {
  pulse.validate();
  const double G = r.total();
  if (!(G > 0.0))
    throw DomainError("rabi_coefficients: Gamma2 + gamma2 must be positive to define the drive");

  RabiCoefficients c;
  c.relaxation = G;
  c.n_in = pulse.n_in;
  double disc = 1.0 - 32.0 * r.beta2 * c.n_in;
  if (std::abs(disc) < kCriticalNudge) {
    c.n_in = pulse.n_in * (1.0 + kCriticalNudge);
    disc = 1.0 - 32.0 * r.beta2 * c.n_in;
  }
  const double bn = r.beta2 * c.n_in;
  c.upsilon = std::sqrt(cplx(disc, 0.0));
  c.lambda_plus = -0.5 * G * (3.0 + c.upsilon);
  c.lambda_minus = -0.5 * G * (3.0 - c.upsilon);
  c.rabi_ratio = std::sqrt(2.0 * bn);

  if (c.n_in == 0.0) {
    c.upsilon = 1.0;
    c.lambda_plus = -2.0 * G;
    c.lambda_minus = -G;
    c.f_plus = c.f_minus = 0.0;
    c.i_plus = initial.p3 + 1.0;
    c.i_minus = 0.0;
    c.s_minus = 0.0;
    c.s_3 = -1.0;
    return c;
  }

  c.f_plus = 16.0 * bn / (c.upsilon * (3.0 + c.upsilon));
  c.f_minus = -16.0 * bn / (c.upsilon * (3.0 - c.upsilon));

  const cplx rot = drive_frame(pulse.phase);
  const double quad0 = (std::conj(rot) * initial.sigma_minus()).imag();
  const double pop0 = initial.p3 + 1.0;
  c.i_plus = (0.5 * (1.0 + c.upsilon) * pop0 - 4.0 * c.rabi_ratio * quad0) / c.upsilon;
  c.i_minus = -(0.5 * (1.0 - c.upsilon) * pop0 - 4.0 * c.rabi_ratio * quad0) / c.upsilon;

  const cplx fsum = c.f_plus + c.f_minus;
  c.s_3 = checked_real(-(fsum + 1.0), std::abs(c.f_plus), "s_3");
  const double quad_ss = checked_real(
      -((1.0 - c.upsilon) * c.f_plus + (1.0 + c.upsilon) * c.f_minus) / (8.0 * c.rabi_ratio),
      std::abs(c.f_plus) / c.rabi_ratio, "s_-");
  c.s_minus = rot * cplx(0.0, quad_ss);
  return c;
}

BlochState evolve_free(const DerivedRates& r, const BlochState& s, double dt) {
  if (!(dt >= 0.0)) throw DomainError("evolve_free: dt must be nonnegative");
  const double G = r.total();
  const double e = std::exp(-G * dt);
  return {s.p1 * e, s.p2 * e, (s.p3 + 1.0) * e * e - 1.0};
}

BlochState evolve_driven(const DerivedRates& r, const DrivePulse& pulse,
                         const BlochState& initial, double t) {
  pulse.validate();
  if (t < pulse.t_start) throw DomainError("evolve_driven: t precedes the pulse start");
  const double on = std::min(t, pulse.t_end) - pulse.t_start;
  BlochState s = driven_segment(r, pulse, initial, on);
  if (t > pulse.t_end) s = evolve_free(r, s, t - pulse.t_end);
  return s;
}

HalfwayProjection halfway_projection(const BlochState& s) {
  return {0.5 * (1.0 + s.p1), 0.5 * (1.0 - s.p1), 0.5 * s.p3};
}

double quarter_period_estimate(const DerivedRates& r, double n_in) {
  const double disc = 1.0 - 32.0 * r.beta2 * n_in;
  if (disc >= 0.0) return std::numeric_limits<double>::infinity();
  const double omega = 0.5 * r.total() * std::sqrt(-disc);
  return 0.5 * std::numbers::pi / omega;
}

double find_rotation_time(const DerivedRates& r, double n_in, double phase) {
  if (!(r.total() > 0.0)) throw DomainError("find_rotation_time: no dipole relaxation rate");
  if (!(32.0 * r.beta2 * n_in > 1.0))
    throw ConvergenceError("find_rotation_time: drive is overdamped, no Rabi oscillation");

  const double tq = quarter_period_estimate(r, n_in);
  const DrivePulse pulse{n_in, phase, 0.0, std::numeric_limits<double>::max()};
  auto p_h = [&](double t) {
    return halfway_projection(evolve_driven(r, pulse, BlochState::ground(), t)).p_h;
  };

  const double step = tq / 100.0;
  const double horizon = 20.0 * tq + 10.0 / r.total();
  double prev = p_h(0.0);
  double cur = p_h(step);
  for (double t = step; t < horizon; t += step) {
    const double next = p_h(t + step);
    if (cur > prev && cur >= next) {
      return numerics::golden_max(p_h, t - step, t + step, 1e-3).x;
    }
    prev = cur;
    cur = next;
  }
  throw ConvergenceError("find_rotation_time: no local maximum of P_h within the search horizon");
}

double max_halfway_probability(const DerivedRates& r, double n_in, double window) {
  if (!(window > 0.0)) throw DomainError("max_halfway_probability: window must be positive");
  const DrivePulse pulse{n_in, kHalfwayPhase, 0.0, window};
  auto p_h = [&](double t) {
    return halfway_projection(evolve_driven(r, pulse, BlochState::ground(), t)).p_h;
  };
  const double tq = quarter_period_estimate(r, n_in);
  std::size_t points = 4001;
  if (std::isfinite(tq)) {
    const double wanted = 40.0 * window / tq;
    points = std::max<std::size_t>(points, static_cast<std::size_t>(std::min(wanted, 2e6)));
  }
  return numerics::find_peak(p_h, 0.0, window, 1e-6 * window, points).value;
}

AtomTrajectory sample_driven(const DerivedRates& r, const DrivePulse& pulse,
                             const BlochState& initial, std::span<const double> times) {
  AtomTrajectory tr;
  tr.times.assign(times.begin(), times.end());
  tr.states.reserve(times.size());
  for (double t : times) tr.states.push_back(evolve_driven(r, pulse, initial, t));
  return tr;
}

AtomTrajectory ode_oracle(const DerivedRates& r, const DrivePulse& pulse,
                          std::span<const double> t_grid, double kappa, const BlochState& initial,
                          CavityDrive drive) {
  pulse.validate();
  if (!(kappa > 0.0)) throw DomainError("ode_oracle: kappa must be positive");
  if (t_grid.empty()) return {};
  if (t_grid.front() < pulse.t_start) throw DomainError("ode_oracle: grid precedes the pulse");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw DomainError("ode_oracle: grid must be strictly increasing");

  const double G = r.total();
  const double coupling = std::sqrt(r.Gamma2 * kappa) * std::sqrt(2.0 * kappa);  // g2 sqrt(2 kappa)
  const double eps = std::sqrt(pulse.n_in * G);
  const cplx rot = drive_frame(pulse.phase);

  auto make_rhs = [&](bool drive_on) -> numerics::Rhs {
    return [=](double, std::span<const double> y, std::span<double> dy) {
      const cplx sm(y[0], y[1]);
      const double s3 = y[2];
      double e = y[3];
      double de = 0.0;
      if (drive == CavityDrive::kMemoryKernel) {
        de = -kappa * e + (drive_on ? eps : 0.0);
      } else {
        e = drive_on ? eps / kappa : 0.0;
      }
      const cplx field = rot * e;
      const cplx dsm = -G * sm - cplx(0.0, 1.0) * coupling * field * s3;
      const cplx cross = std::conj(field) * sm - std::conj(sm) * field;
      const double ds3 = -2.0 * G * (s3 + 1.0) + (cplx(0.0, -2.0) * coupling * cross).real();
      dy[0] = dsm.real();
      dy[1] = dsm.imag();
      dy[2] = ds3;
      dy[3] = de;
    };
  };

  AtomTrajectory out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());

  numerics::State y{0.5 * initial.p1, 0.5 * initial.p2, initial.p3, 0.0};
  double t = pulse.t_start;
  std::size_t idx = 0;
  const double t_last = t_grid.back();

  auto run_segment = [&](double t_stop, bool drive_on) {
    if (!(t_stop > t)) return;
    std::vector<double> samples;
    const std::size_t first = idx;
    while (idx < t_grid.size() && t_grid[idx] <= t_stop) samples.push_back(t_grid[idx++]);
    samples.push_back(t_stop);
    numerics::OdeProblem prob;
    prob.rhs = make_rhs(drive_on);
    prob.initial = y;
    prob.t0 = t;
    prob.t1 = t_stop;
    prob.rel_tol = 1e-8;
    prob.abs_tol = 1e-11;
    auto states = numerics::integrate(prob, samples);
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
      const auto& s = states[i];
      out.states.push_back({2.0 * s[0], 2.0 * s[1], s[2]});
    }
    (void)first;
    y = states.back();
    t = t_stop;
  };

  // Samples sitting exactly at the pulse start.
  while (idx < t_grid.size() && t_grid[idx] <= pulse.t_start) {
    out.states.push_back(initial);
    ++idx;
  }
  run_segment(std::min(pulse.t_end, t_last), true);
  run_segment(t_last, false);
  return out;
}

}  // namespace padsim::bloch
