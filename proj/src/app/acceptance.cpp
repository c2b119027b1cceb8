#include "app/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "app/commands.hpp"
#include "padsim/bloch.hpp"
#include "padsim/errors.hpp"
#include "padsim/pad.hpp"
#include "padsim/params.hpp"
#include "padsim/scattering.hpp"

namespace padsim::app {

namespace {

// Pinned tolerances.
constexpr double kFig4Tol = 0.002;
constexpr double kFig4aTol = 0.01;
constexpr double kPeakDelayTol = 0.5;
constexpr double kRotationTimeTol = 1.0;
constexpr double kPiTol = 0.003;
constexpr double kPiiTol = 0.01;
constexpr double kP11RelTol = 0.02;
constexpr double kP01RelTol = 0.05;
constexpr double kAccuracyTol = 0.005;
constexpr double kVolumeTol = 0.5;
constexpr double kGRatioTol = 0.02;
constexpr double kCnotTol = 0.005;
constexpr double kUnitarityTol = 1e-6;
constexpr double kOracleL2Tol = 1e-3;
constexpr double kBlochOracleTol = 1e-4;
constexpr double kSteadyIdentityTol = 1e-10;
constexpr double kWaitingTol = 0.05;
constexpr double kSurvivalTol = 1e-4;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check near(int c, std::string name, double measured, double expected, double tol) {
  return {c, std::move(name), measured, num(expected) + " +- " + num(tol),
          std::abs(measured - expected) <= tol, false, {}};
}

Check near_rel(int c, std::string name, double measured, double expected, double rel) {
  return {c, std::move(name), measured, num(expected) + " +- " + num(100.0 * rel) + "%",
          std::abs(measured - expected) <= rel * std::abs(expected), false, {}};
}

Check below(int c, std::string name, double measured, double bound) {
  return {c, std::move(name), measured, "< " + num(bound), measured < bound, false, {}};
}

Check above(int c, std::string name, double measured, double bound) {
  return {c, std::move(name), measured, "> " + num(bound), measured > bound, false, {}};
}

Check within(int c, std::string name, double measured, double lo, double hi) {
  return {c, std::move(name), measured, "in [" + num(lo) + ", " + num(hi) + "]",
          measured >= lo && measured <= hi, false, {}};
}

Check info(int c, std::string name, double measured, std::string note) {
  return {c, std::move(name), measured, "-", true, true, std::move(note)};
}

double truncate3(double x) { return std::floor(x * 1000.0 + 1e-9) / 1000.0; }

SystemParams with_couplings(double g1, double g2, double gamma1 = 0.0) {
  SystemParams p;
  p.g1 = g1;
  p.g2 = g2;
  p.gamma1 = gamma1;
  return p;
}

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<Check>()> run;
};

std::vector<Check> fig4b(const RunConfig& cfg) {
  const DerivedRates r = derive_rates(with_couplings(1.0, cfg.bloch.g2));
  const double window = 5.0 / r.Gamma2;
  std::vector<Check> out;
  const double n_in[] = {1e2, 1e3, 1e4};
  const double expected[] = {0.993, 0.997, 0.999};
  for (int i = 0; i < 3; ++i)
    out.push_back(near(1, "max P_h, n_in = " + num(n_in[i]),
                       bloch::max_halfway_probability(r, n_in[i], window), expected[i], kFig4Tol));
  return out;
}

std::vector<Check> fig4a(const RunConfig& cfg) {
  const DerivedRates r = derive_rates(with_couplings(1.0, cfg.bloch.g2));
  const double window = 5.0 / r.Gamma2;
  return {
      near(2, "max P_h, n_in = 3", bloch::max_halfway_probability(r, 3.0, window), 0.96, kFig4aTol),
      above(2, "max P_h, n_in = 51", bloch::max_halfway_probability(r, 51.0, window), 0.99),
  };
}

std::vector<Check> gate_values(const RunConfig& cfg, unsigned threads) {
  struct Case {
    double g1, L, expected;
  };
  const std::vector<Case> cases = {{1, 4, 0.964},  {1, 40, 0.999},  {1, 400, 0.999}, {10, 4, 0.937},
                                   {10, 40, 0.998}, {10, 400, 0.999}, {0.1, 400, 0.936}};
  std::vector<Check> out(cases.size() + 2);
  parallel_for(cases.size(), threads, [&](std::size_t i) {
    const Case& c = cases[i];
    const std::string name = "F_int, g1 = " + num(c.g1) + ", L = " + num(c.L);
    try {
      const auto res = scattering::gate_fidelity(with_couplings(c.g1, 0.0), c.L);
      Check ck = near(3, name + " (truncated)", truncate3(res.f_int), c.expected, cfg.accept.f_int_tolerance);
      ck.note = "raw " + num(res.f_int) + ", d_p = " + num(res.d_p);
      out[i] = ck;
      if (c.g1 == 1.0 && c.L == 4.0) {
        out[cases.size()] = near(3, "peak F_g, g1 = 1, L = 4 (truncated)", truncate3(res.f_g_peak), 0.982,
                                 cfg.accept.f_int_tolerance);
        out[cases.size()].note = "raw " + num(res.f_g_peak);
        out[cases.size() + 1] = near(3, "peak F_g delay, g1 = 1, L = 4", res.f_g_peak_delay, 3.0, kPeakDelayTol);
      }
    } catch (const Error& e) {
      out[i] = {3, name, NAN, num(c.expected), false, false, e.what()};
    }
  });
  return out;
}

std::vector<Check> leaky_bounds(unsigned threads) {
  const double lengths[] = {4.0, 40.0};
  const double bounds[] = {0.1, 0.7};
  std::vector<Check> out(2);
  parallel_for(2, threads, [&](std::size_t i) {
    const auto peak = scattering::fidelity_g_peak(with_couplings(0.1, 0.0), lengths[i]);
    out[i] = below(4, "max F_g, g1 = 0.1, L = " + num(lengths[i]), peak.value, bounds[i]);
    out[i].note = "at d = " + num(peak.x);
  });
  return out;
}

std::vector<Check> derived_couplings() {
  std::vector<Check> out;
  out.push_back(near(5, "g2_max at delta_t_int = 144", scattering::g2_bound(144.0), 1.0 / 120.0, 1e-15));
  const auto res = scattering::gate_fidelity(with_couplings(1.0, 0.0), 40.0);
  out.push_back(within(5, "d_p, g1 = 1, L = 40", res.d_p, 3.0, 5.0));
  out.push_back(info(5, "delta_t_int = 3.5 L + d_p", res.delta_t_int,
                     "g2_max there = " + num(res.g2_max)));
  return out;
}

std::vector<Check> rotation_time(const RunConfig& cfg) {
  const DerivedRates r = derive_rates(with_couplings(1.0, 1.0 / 120.0));
  const double t_r = bloch::find_rotation_time(r, cfg.pad.n_in);
  Check ck = near(6, "t_r, n_in = 1e4, g2 = 1/120", t_r, 80.64, kRotationTimeTol);
  ck.note = "quarter-period estimate " + num(bloch::quarter_period_estimate(r, cfg.pad.n_in));
  return {ck};
}

pad::PadProbabilities operating_point(const RunConfig& cfg, double gamma1) {
  const DerivedRates r = derive_rates(with_couplings(1.0, 1.0 / 120.0, gamma1));
  const double t_r = bloch::find_rotation_time(r, cfg.pad.n_in);
  pad::PadProbabilities probs = pad::sequence_probabilities(
      r, cfg.pad.n_in, cfg.pad.f_int, {t_r, cfg.pad.delta_t_int, cfg.pad.tau});
  pad::apply_detector(probs, cfg.pad.detector);
  return probs;
}

std::vector<Check> sequence(const RunConfig& cfg) {
  const auto probs = operating_point(cfg, 0.0);
  return {near(7, "p_i", probs.p_i, 0.994, kPiTol), near(7, "p_ii_xi2", probs.p_ii_xi2, 0.981, kPiiTol)};
}

std::vector<Check> conditional(const RunConfig& cfg) {
  const auto base = operating_point(cfg, 0.0);
  const auto variant = operating_point(cfg, cfg.pad.gamma1_variant);
  return {
      near_rel(8, "p11", base.p11, 9.785e-2, kP11RelTol),
      near_rel(8, "p01", base.p01, 1.048e-3, kP01RelTol),
      near_rel(8, "p11, gamma2 = 1.2 Gamma2", variant.p11, 9.515e-2, kP11RelTol),
      near_rel(8, "p01, gamma2 = 1.2 Gamma2", variant.p01, 1.635e-3, kP01RelTol),
  };
}

std::vector<Check> accuracy_efficiency(const RunConfig& cfg) {
  const auto base = operating_point(cfg, 0.0);
  const auto variant = operating_point(cfg, cfg.pad.gamma1_variant);
  const double p0 = cfg.pad.p0;
  const double p1 = cfg.pad.p1;
  std::vector<Check> out;
  const double at25 = pad::accuracy(25.0, 1.0, p0, p1, variant.p11, variant.p01);
  const double limit = pad::accuracy_limit(1.0, p0, p1, variant.p11, variant.p01);
  Check ck = near(9, "P_PAD, gamma2 = 1.2 Gamma2, P_T = 1, n = 25", at25, 0.983, kAccuracyTol);
  const bool limit_ok = std::abs(limit - 0.983) <= kAccuracyTol;
  ck.note = "n -> inf gives " + num(limit);
  ck.pass = ck.pass || limit_ok;
  out.push_back(ck);
  for (double p_t : {0.90, 0.95, 1.0}) {
    const auto e = pad::efficiency(p_t, p0, p1, base.p11, base.p01, 25.0);
    Check c = above(9, "efficiency, P_T = " + num(p_t), e.value, 0.95);
    c.note = "n* = " + num(e.n_star) + (e.at_boundary ? " (no crossing, n = 25)" : "");
    out.push_back(c);
  }
  return out;
}

std::vector<Check> speedup(const RunConfig& cfg) {
  const auto s = pad::cnot_speedup(cfg.geometry);
  return {
      near(10, "volume ratio", s.volume_ratio, 165.65, kVolumeTol),
      near(10, "g ratio", s.g_ratio, 12.87, kGRatioTol),
      near(10, "C-NOT time ratio", s.t_cnot_ratio, 1.787, kCnotTol),
      near(10, "speedup", s.speedup, 1.679, kCnotTol),
  };
}

std::vector<Check> properties(unsigned threads) {
  std::vector<Check> out;
  const double g1s[] = {0.1, 1.0, 10.0};
  const double lengths[] = {4.0, 40.0, 400.0};
  std::vector<double> unitarity(9), l2(9);
  parallel_for(9, threads, [&](std::size_t i) {
    const SystemParams p = with_couplings(g1s[i / 3], 0.0);
    const double L = lengths[i % 3];
    const auto k = scattering::omega_pm(p);
    const auto in = scattering::double_exponential_pulse(L, scattering::default_grid(L, k));
    const auto out_s = scattering::scatter(in, k);
    unitarity[i] = std::abs(std::sqrt(out_s.norm_squared()) - std::sqrt(in.norm_squared()));
    l2[i] = scattering::l2_distance(out_s, scattering::time_domain_oracle(in, p));
  });
  const auto worst_u = std::max_element(unitarity.begin(), unitarity.end()) - unitarity.begin();
  const auto worst_l = std::max_element(l2.begin(), l2.end()) - l2.begin();
  Check cu = below(11, "scattering | ||psi_out|| - ||psi_in|| |, 3x3 grid", unitarity[worst_u], kUnitarityTol);
  cu.note = "worst at g1 = " + num(g1s[worst_u / 3]) + ", L = " + num(lengths[worst_u % 3]);
  out.push_back(cu);
  Check cl = below(11, "scatter vs time-domain oracle L2, 3x3 grid", l2[worst_l], kOracleL2Tol);
  cl.note = "worst at g1 = " + num(g1s[worst_l / 3]) + ", L = " + num(lengths[worst_l % 3]);
  out.push_back(cl);

  // Closed form against the memory-kernel integration in the leaky regime.
  const double n_ins[] = {1e2, 1e3, 1e4};
  const double g2s[] = {0.005, 1.0 / 120.0, 0.01};
  std::vector<double> sup(9), sup_adiabatic(9);
  parallel_for(9, threads, [&](std::size_t i) {
    const DerivedRates r = derive_rates(with_couplings(1.0, g2s[i % 3]));
    const double n_in = n_ins[i / 3];
    const bloch::DrivePulse pulse{n_in, bloch::kHalfwayPhase, 0.0, 4.0 / r.Gamma2};
    std::vector<double> times(501);
    for (std::size_t j = 0; j < times.size(); ++j)
      times[j] = 5.0 / r.Gamma2 * static_cast<double>(j) / static_cast<double>(times.size() - 1);
    for (auto drive : {bloch::CavityDrive::kMemoryKernel, bloch::CavityDrive::kAdiabatic}) {
      const auto traj = bloch::ode_oracle(r, pulse, times, 1.0, bloch::BlochState::ground(), drive);
      double worst = 0.0;
      for (std::size_t j = 0; j < times.size(); ++j) {
        const auto c = bloch::evolve_driven(r, pulse, bloch::BlochState::ground(), times[j]);
        const auto& o = traj.states[j];
        worst = std::max({worst, std::abs(c.p1 - o.p1), std::abs(c.p2 - o.p2), std::abs(c.p3 - o.p3)});
      }
      (drive == bloch::CavityDrive::kMemoryKernel ? sup : sup_adiabatic)[i] = worst;
    }
  });
  const auto worst_b = std::max_element(sup.begin(), sup.end()) - sup.begin();
  Check cb = below(11, "closed-form Bloch vs memory-kernel ODE, sup error", sup[worst_b], kBlochOracleTol);
  cb.note = "worst at n_in = " + num(n_ins[worst_b / 3]) + ", g2 = " + num(g2s[worst_b % 3]);
  out.push_back(cb);
  out.push_back(info(11, "closed-form Bloch vs adiabatic-cavity ODE, sup error",
                     *std::max_element(sup_adiabatic.begin(), sup_adiabatic.end()),
                     "same equations with the cavity following the drive instantly"));

  double worst_identity = 0.0;
  for (double n : {0.01, 0.5, 1.0, 3.0, 1e2, 1e4}) {
    DerivedRates r;
    r.Gamma2 = 1e-4;
    r.beta2 = 1.0;
    const auto c = bloch::rabi_coefficients(r, {n, bloch::kHalfwayPhase, 0.0, 1.0}, bloch::BlochState::ground());
    worst_identity = std::max(worst_identity, std::abs(c.s_3 - (-1.0 + 4.0 * n / (1.0 + 4.0 * r.beta2 * n))));
  }
  out.push_back(below(11, "steady state s_3 identity (beta2 = 1)", worst_identity, kSteadyIdentityTol));

  const double n_as[] = {2e-2, 2e-1, 2.0};
  const double taus[] = {3.0, 5.3, 7.6};
  for (int i = 0; i < 3; ++i) {
    const double tau = waiting_time(n_as[i], 1e-3);
    Check c = near(11, "waiting time, n_a = " + num(n_as[i]), tau, taus[i], kWaitingTol);
    c.note = "n_a exp(-tau) = " + num(n_as[i] * std::exp(-tau));
    out.push_back(c);
  }
  return out;
}

std::vector<Check> survival() {
  const double taus[] = {3.0, 5.3, 7.6};
  const double expected[] = {0.9994, 0.9989, 0.9985};
  std::vector<Check> out;
  for (int i = 0; i < 3; ++i)
    out.push_back(near(12, "exp(-2 Gamma2 tau), tau = " + num(taus[i]), excited_survival(1e-4, taus[i]),
                       expected[i], kSurvivalTol));
  return out;
}

}  // namespace

bool AcceptanceReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

std::size_t AcceptanceReport::check_count() const {
  std::size_t n = 0;
  for (const auto& c : criteria) n += c.checks.size();
  return n;
}

AcceptanceReport run_acceptance(const RunConfig& cfg, unsigned threads) {
  const std::vector<Criterion> list = {
      {1, "half-way projection maxima, strong drive", [&] { return fig4b(cfg); }},
      {2, "half-way projection maxima, weak drive", [&] { return fig4a(cfg); }},
      {3, "gate fidelities", [&] { return gate_values(cfg, threads); }},
      {4, "leaky-regime fidelity bounds", [&] { return leaky_bounds(threads); }},
      {5, "derived couplings", [&] { return derived_couplings(); }},
      {6, "rotation time", [&] { return rotation_time(cfg); }},
      {7, "sequence probabilities", [&] { return sequence(cfg); }},
      {8, "conditional detection probabilities", [&] { return conditional(cfg); }},
      {9, "accuracy and efficiency", [&] { return accuracy_efficiency(cfg); }},
      {10, "speedup arithmetic", [&] { return speedup(cfg); }},
      {11, "property suite", [&] { return properties(threads); }},
      {12, "survival probabilities", [&] { return survival(); }},
  };
  AcceptanceReport report;
  report.criteria.resize(list.size());
  // Criteria run one after another; the heavy ones fan out internally.
  for (std::size_t i = 0; i < list.size(); ++i) {
    CriterionResult& res = report.criteria[i];
    res.id = list[i].id;
    res.title = list[i].title;
    try {
      res.checks = list[i].run();
    } catch (const std::exception& e) {
      res.checks.push_back({res.id, "evaluation", NAN, "no error", false, false, e.what()});
    }
    res.pass = !res.checks.empty() &&
               std::all_of(res.checks.begin(), res.checks.end(),
                           [](const Check& c) { return c.informational || c.pass; });
  }
  return report;
}

void print_report(std::ostream& os, const AcceptanceReport& report) {
  for (const auto& c : report.criteria) {
    for (const auto& ck : c.checks) {
      char line[256];
      std::snprintf(line, sizeof line, "  [%2d] %-4s %-52s measured %-12s expected %s", c.id,
                    ck.informational ? "info" : (ck.pass ? "ok" : "MISS"), ck.name.c_str(),
                    num(ck.measured).c_str(), ck.expected.c_str());
      os << line;
      if (!ck.note.empty()) os << "  (" << ck.note << ")";
      os << '\n';
    }
    os << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << '\n';
  }
  std::size_t passed = 0;
  for (const auto& c : report.criteria) passed += c.pass ? 1 : 0;
  os << passed << "/" << report.criteria.size() << " criteria passed, " << report.check_count()
     << " checks\n";
}

}  // namespace padsim::app
