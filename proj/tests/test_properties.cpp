// Randomised invariant checks. Fixed seeds keep every run identical.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "padsim/bloch.hpp"
#include "padsim/numerics.hpp"
#include "padsim/pad.hpp"
#include "padsim/params.hpp"
#include "padsim/scattering.hpp"

using namespace padsim;
namespace fs = std::filesystem;

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  SystemParams system() {
    return {log_uniform(0.2, 5.0), log_uniform(0.05, 20.0), log_uniform(1e-3, 0.2), coin() ? 0.0 : log_uniform(1e-4, 0.1)};
  }
  // Leaky-cavity parameters for the atom dynamics.
  DerivedRates rates() { return derive_rates({1.0, 1.0, log_uniform(3e-3, 3e-2), coin() ? 0.0 : log_uniform(1e-4, 0.05)}); }
  bloch::BlochState state() {
    const double th = uniform(0.0, std::numbers::pi), ph = uniform(0.0, 2 * std::numbers::pi), len = uniform(0.0, 1.0);
    return {len * std::sin(th) * std::cos(ph), len * std::sin(th) * std::sin(ph), len * std::cos(th)};
  }

 private:
  std::mt19937_64 rng_;
};

constexpr int kCases = 200;

}  // namespace

TEST_CASE("derived rates scale with the parameters") {
  Gen g(11);
  for (int i = 0; i < kCases; ++i) {
    const SystemParams p = g.system();
    const double s = g.log_uniform(0.1, 10.0);
    const DerivedRates a = derive_rates(p);
    const DerivedRates b = derive_rates({s * p.kappa, s * p.g1, s * p.g2, s * p.gamma1});
    CHECK(b.Gamma1 == doctest::Approx(s * a.Gamma1));
    CHECK(b.Gamma2 == doctest::Approx(s * a.Gamma2));
    CHECK(b.gamma2 == doctest::Approx(s * a.gamma2));
    CHECK(b.beta2 == doctest::Approx(a.beta2));
    CHECK(a.beta2 > 0.0);
    CHECK(a.beta2 <= 1.0);
    CHECK((a.beta2 == 1.0) == (a.gamma2 == 0.0));
    const DerivedRates again = derive_rates(p);
    CHECK(again.Gamma2 == a.Gamma2);
  }
}

TEST_CASE("waiting time inverts the exponential decay") {
  Gen g(12);
  for (int i = 0; i < kCases; ++i) {
    const double thr = g.log_uniform(1e-5, 1e-1);
    const double n_a = thr * g.log_uniform(1.01, 1e5);
    const double kappa = g.log_uniform(0.5, 2.0);
    const double t = waiting_time(n_a, thr, kappa);
    const double bisected =
        numerics::find_root([&](double x) { return n_a * std::exp(-kappa * x) - thr; }, 0.0, 100.0, 1e-12);
    CHECK(t == doctest::Approx(bisected).epsilon(1e-9));
  }
}

TEST_CASE("survival decreases in time and rate") {
  Gen g(13);
  for (int i = 0; i < kCases; ++i) {
    const double rate = g.log_uniform(1e-5, 1.0), tau = g.uniform(0.0, 10.0), dt = g.uniform(1e-3, 1.0);
    CHECK(excited_survival(rate, tau + dt) < excited_survival(rate, tau));
    CHECK(excited_survival(rate * 1.5, tau + dt) < excited_survival(rate, tau + dt));
  }
}

TEST_CASE("closed-form trajectories stay real and inside the Bloch ball") {
  Gen g(21);
  for (int i = 0; i < kCases; ++i) {
    const DerivedRates r = g.rates();
    const double n = g.log_uniform(1e-3, 1e5);
    const bloch::DrivePulse pulse{n, g.uniform(-std::numbers::pi, std::numbers::pi), 0.0, g.uniform(0.0, 5.0) / r.total()};
    const bloch::BlochState s0 = g.state();
    for (int k = 0; k < 20; ++k) {
      const double t = g.uniform(0.0, 8.0) / r.total();
      bloch::BlochState s;
      REQUIRE_NOTHROW(s = bloch::evolve_driven(r, pulse, s0, t));
      CHECK(s.norm() <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("steady-state coefficients") {
  Gen g(22);
  for (int i = 0; i < kCases; ++i) {
    const DerivedRates r = g.rates();
    const double n = g.log_uniform(1e-3, 1e5);
    const bloch::RabiCoefficients c = bloch::rabi_coefficients(r, {n, 0.0, 0.0, 1.0}, bloch::BlochState::ground());
    const double beta_n = r.beta2 * c.n_in;
    const bloch::cplx f_sum = c.f_plus + c.f_minus;
    CHECK(std::abs(f_sum - (-4.0 * beta_n / (1.0 + 4.0 * beta_n))) < 1e-9 * (1.0 + std::abs(f_sum)));
    CHECK(c.s_3 >= -1.0);
    CHECK(c.s_3 < 0.0);
    CHECK(c.lambda_plus.real() < 0.0);
    CHECK(c.lambda_minus.real() < 0.0);

    const double n2 = n * g.uniform(1.01, 3.0);
    const bloch::RabiCoefficients d = bloch::rabi_coefficients(r, {n2, 0.0, 0.0, 1.0}, bloch::BlochState::ground());
    CHECK(d.s_3 > c.s_3);
  }
}

TEST_CASE("driven solution hands over continuously at the pulse end") {
  Gen g(23);
  for (int i = 0; i < kCases; ++i) {
    const DerivedRates r = g.rates();
    const bloch::DrivePulse pulse{g.log_uniform(0.01, 1e4), g.uniform(-std::numbers::pi, std::numbers::pi), 0.0, g.uniform(0.1, 5.0) / r.total()};
    const bloch::BlochState s0 = g.state();
    const bloch::BlochState at = bloch::evolve_driven(r, pulse, s0, pulse.t_end);
    const bloch::BlochState handed = bloch::evolve_free(r, at, 0.0);
    const bloch::BlochState after = bloch::evolve_driven(r, pulse, s0, std::nextafter(pulse.t_end, 1e300));
    CHECK(std::abs(handed.p1 - after.p1) < 1e-12);
    CHECK(std::abs(handed.p2 - after.p2) < 1e-12);
    CHECK(std::abs(handed.p3 - after.p3) < 1e-12);
  }
}

TEST_CASE("drive phase rotates the transverse components") {
  Gen g(24);
  for (int i = 0; i < 50; ++i) {
    const DerivedRates r = g.rates();
    const double n = g.log_uniform(0.05, 1e4);
    const double phi = g.uniform(-std::numbers::pi, std::numbers::pi), delta = g.uniform(-std::numbers::pi, std::numbers::pi);
    const double t = g.uniform(0.0, 6.0) / r.total();
    const bloch::BlochState a = bloch::evolve_driven(r, {n, phi, 0.0, 1e12}, bloch::BlochState::ground(), t);
    const bloch::BlochState b = bloch::evolve_driven(r, {n, phi + delta, 0.0, 1e12}, bloch::BlochState::ground(), t);
    // Ground-start trajectories carry the drive phase on <s_->.
    const double c = std::cos(delta), s = std::sin(delta);
    CHECK(b.p1 == doctest::Approx(c * a.p1 - s * a.p2).scale(1.0).epsilon(1e-9));
    CHECK(b.p2 == doctest::Approx(s * a.p1 + c * a.p2).scale(1.0).epsilon(1e-9));
    CHECK(b.p3 == doctest::Approx(a.p3).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("kernel identities") {
  Gen g(31);
  for (int i = 0; i < kCases; ++i) {
    SystemParams p = g.system();
    const bool lossy = g.coin();
    if (std::abs(p.g1 - 0.5 * (p.kappa + (lossy ? p.gamma1 : 0.0))) < 1e-3) continue;
    const scattering::KernelParams k = scattering::omega_pm(p, lossy);
    const double scale = 1.0 + std::abs(k.omega_plus) + p.g1 * p.g1;
    CHECK(std::abs(k.omega_plus + k.omega_minus - k.kappa_effective) < 1e-12 * scale);
    CHECK(std::abs(k.omega_plus * k.omega_minus - p.g1 * p.g1) < 1e-12 * scale);
  }
}

TEST_CASE("scattering is unitary and fidelities are bounded") {
  Gen g(32);
  for (int i = 0; i < 12; ++i) {
    const SystemParams p{1.0, g.log_uniform(0.3, 10.0), 0.0, 0.0};
    if (std::abs(p.g1 - 0.5) < 1e-3) continue;
    const double L = g.log_uniform(2.0, 20.0);
    const scattering::KernelParams k = scattering::omega_pm(p);
    const scattering::PhotonWavepacket in = scattering::double_exponential_pulse(L, scattering::default_grid(L, k));
    const scattering::PhotonWavepacket out = scattering::scatter(in, k);
    CAPTURE(p.g1);
    CAPTURE(L);
    CHECK(std::abs(std::sqrt(out.norm_squared()) - std::sqrt(in.norm_squared())) < 1e-6);
    for (int j = 0; j < 10; ++j) {
      const double d = g.uniform(0.0, 10.0);
      CHECK(std::abs(scattering::overlap(in, out, d, -1.0)) <= 1.0 + 1e-6);
    }
  }
}

TEST_CASE("accuracy and counts follow the transmittance and attempt count") {
  Gen g(41);
  for (int i = 0; i < kCases; ++i) {
    const double p01 = g.log_uniform(1e-5, 1e-2);
    const double p11 = p01 * g.log_uniform(1.5, 1e3);
    const double p1 = g.uniform(0.05, 0.95), p0 = 1.0 - p1;
    const double n = g.integer(2, 40);
    const double pt = g.uniform(0.5, 0.99), pt2 = std::min(1.0, pt + g.uniform(1e-3, 0.2));

    const double a1 = pad::accuracy(n, pt, p0, p1, p11, p01);
    const double a2 = pad::accuracy(n, pt2, p0, p1, p11, p01);
    CHECK(a2 >= a1 - 1e-15);
    CHECK(a1 >= 0.0);
    CHECK(a1 <= 1.0);

    CHECK(pad::average_counts(n, pt2, p0, p1, p11, p01).total > pad::average_counts(n, pt, p0, p1, p11, p01).total);
    CHECK(pad::average_counts(n + 1, pt, p0, p1, p11, p01).total > pad::average_counts(n, pt, p0, p1, p11, p01).total);

    const double single = pad::accuracy(1.0, pt, p0, p1, p11, p01);
    CHECK(single == doctest::Approx(p1 * p11 / (p1 * p11 + p0 * p01)));
  }
}

TEST_CASE("detector probabilities respect their floors") {
  Gen g(42);
  for (int i = 0; i < kCases; ++i) {
    const pad::DetectorModel det{g.uniform(0.0, 1.0), g.uniform(0.0, 1e-3), g.uniform(0.0, 1e-3)};
    const double p_h = g.uniform(0.0, 1.0), f = g.uniform(0.0, 1.0), p_ii = g.uniform(0.0, 1.0);
    const double v11 = pad::p11(p_h * f, p_ii, det), v01 = pad::p01(p_h, p_ii, det);
    CHECK(v11 >= det.p_noise);
    CHECK(v01 >= det.p_dark + det.p_noise);
    CHECK(v11 <= 1.0);
    CHECK(v01 <= 1.0);
  }
}

TEST_CASE("spontaneous emission degrades both detection probabilities") {
  Gen g(43);
  for (int i = 0; i < 8; ++i) {
    const double g2 = g.uniform(1.0 / 140.0, 1.0 / 100.0);
    const double gamma1 = g.log_uniform(1e-3, 2e-2);
    const DerivedRates clean = derive_rates({1.0, 1.0, g2, 0.0});
    const DerivedRates lossy = derive_rates({1.0, 1.0, g2, gamma1});
    auto probs = [](const DerivedRates& r) {
      pad::PadProbabilities p =
          pad::sequence_probabilities(r, 1e4, 0.999, {bloch::find_rotation_time(r, 1e4), 144.0, 4.2});
      pad::apply_detector(p, pad::DetectorModel{});
      return p;
    };
    const pad::PadProbabilities a = probs(clean), b = probs(lossy);
    CHECK(b.p11 < a.p11);
    CHECK(b.p01 > a.p01);
  }
}

TEST_CASE("speedup identity") {
  Gen g(44);
  for (int i = 0; i < kCases; ++i) {
    const pad::Speedup s = pad::cnot_speedup({g.log_uniform(1.0, 1e6), g.log_uniform(1.0, 1e6)});
    CHECK(s.speedup * s.t_cnot_ratio == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("integrator error falls with the tolerance") {
  numerics::OdeProblem p;
  p.rhs = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  p.initial = {1.0};
  p.t1 = 5.0;
  const std::vector<double> ts{5.0};
  double prev = 1.0;
  for (double tol : {1e-4, 1e-5, 1e-6, 1e-7}) {
    p.rel_tol = tol;
    p.abs_tol = tol * 1e-3;
    const double err = std::abs(numerics::integrate(p, ts)[0][0] - std::exp(-5.0));
    CHECK(err <= 0.5 * prev);
    prev = err;
  }
}

TEST_CASE("quadrature is exact on low-order polynomials") {
  Gen g(45);
  for (int i = 0; i < kCases; ++i) {
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3), c = g.uniform(-3, 3), d = g.uniform(-3, 3);
    const int n = 2 * g.integer(2, 100) + 1;
    const double dx = g.uniform(0.001, 0.1), len = dx * (n - 1);
    std::vector<double> lin(n), cub(n);
    for (int k = 0; k < n; ++k) {
      const double x = k * dx;
      lin[k] = a + b * x;
      cub[k] = a + b * x + c * x * x + d * x * x * x;
    }
    const double lin_exact = a * len + b * len * len / 2;
    const double cub_exact = lin_exact + c * std::pow(len, 3) / 3 + d * std::pow(len, 4) / 4;
    CHECK(numerics::trapezoid(lin, dx) == doctest::Approx(lin_exact).epsilon(1e-12).scale(1.0));
    CHECK(numerics::simpson(cub, dx) == doctest::Approx(cub_exact).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("identical configs give byte-identical outputs") {
  const fs::path a = fs::temp_directory_path() / "padsim_det_a";
  const fs::path b = fs::temp_directory_path() / "padsim_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  app::RunConfig cfg;
  app::run_command("pad", cfg, {a, 2});
  app::run_command("pad", cfg, {b, 1});
  app::run_command("bloch", cfg, {a, 2});
  app::run_command("bloch", cfg, {b, 1});
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const std::string body = slurp(e.path());
    CHECK(body == slurp(b / e.path().filename()));
    if (e.path().extension() == ".csv") {
      ++csvs;
      CHECK(body.substr(0, body.find('\n')).find_first_of("0123456789") != 0);
    }
  }
  CHECK(csvs >= 5);
  fs::remove_all(a);
  fs::remove_all(b);
}
