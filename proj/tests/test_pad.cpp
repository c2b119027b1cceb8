#include <doctest.h>

#include <cmath>

#include "bloch_reference.hpp"
#include "padsim/bloch.hpp"
#include "padsim/errors.hpp"
#include "padsim/pad.hpp"

using namespace padsim;
using namespace padsim::pad;
using padsim::bloch::BlochState;

namespace {

BlochState relax(const DerivedRates& r, BlochState s, double dt) {
  return padsim::testing::rk4_reference(r, 0.0, 0.0, s, dt, 2000);
}

// Whole detection sequence rebuilt from the RK4 reference.
PadProbabilities sequence_reference(const DerivedRates& r, double n_in, double f_int, const PadTimings& t) {
  using padsim::testing::rk4_reference;
  const double half = padsim::bloch::kHalfwayPhase;
  BlochState s = rk4_reference(r, n_in, half, BlochState::ground(), t.t_r, 200000);
  s = relax(r, s, t.delta_t_int);
  PadProbabilities out;
  out.p_h_end = 0.5 * (1.0 + s.p1);
  out.p_i = out.p_h_end * f_int;
  s.p1 *= 1.0 - 2.0 * f_int;
  s.p2 *= 1.0 - 2.0 * f_int;
  s = rk4_reference(r, n_in, -half, s, t.t_r, 200000);
  s = relax(r, s, t.tau);
  out.p_ii_xi2 = 0.5 * (1.0 + s.p3);
  return out;
}

}  // namespace

TEST_CASE("sequence probabilities at the operating point") {
  const DerivedRates r = derive_rates({1.0, 1.0, 1.0 / 120.0, 0.0});
  const double t_r = padsim::bloch::find_rotation_time(r, 1e4);
  const PadTimings t{t_r, 144.0, 4.2};
  PadProbabilities p = sequence_probabilities(r, 1e4, 0.999, t);
  const PadProbabilities ref = sequence_reference(r, 1e4, 0.999, t);
  CHECK(p.p_h_end == doctest::Approx(ref.p_h_end).epsilon(1e-7));
  CHECK(p.p_i == doctest::Approx(ref.p_i).epsilon(1e-7));
  CHECK(p.p_ii_xi2 == doctest::Approx(ref.p_ii_xi2).epsilon(1e-7));

  apply_detector(p, DetectorModel{});
  CHECK(p.p11 == doctest::Approx(p.p_i * p.p_ii_xi2 * 0.1 + 4.5e-4));
  CHECK(p.p01 == doctest::Approx((1.0 - p.p_h_end) * p.p_ii_xi2 * 0.1 + 1e-5 + 4.5e-4));
  CHECK(p.p01_gate_bookkeeping > p.p01);
}

TEST_CASE("sequence without a photon returns the atom to the ground state") {
  const DerivedRates r = derive_rates({1.0, 1.0, 1.0 / 120.0, 0.0});
  const double t_r = padsim::bloch::find_rotation_time(r, 1e4);
  const PadProbabilities none = sequence_probabilities(r, 1e4, 0.0, {t_r, 144.0, 4.2});
  const PadProbabilities full = sequence_probabilities(r, 1e4, 1.0, {t_r, 144.0, 4.2});
  CHECK(none.p_ii_xi2 < 0.02);
  CHECK(full.p_ii_xi2 > 0.97);
  CHECK_THROWS_AS(sequence_probabilities(r, 1e4, 1.5, {t_r, 144.0, 4.2}), DomainError);
  CHECK_THROWS_AS(sequence_probabilities(r, 1e4, 0.5, {-1.0, 144.0, 4.2}), DomainError);
}

TEST_CASE("detector formulas") {
  const DetectorModel det{0.2, 1e-3, 2e-3};
  CHECK(p11(0.9, 0.8, det) == doctest::Approx(0.9 * 0.8 * 0.2 + 2e-3));
  CHECK(p01(0.9, 0.8, det) == doctest::Approx(0.1 * 0.8 * 0.2 + 1e-3 + 2e-3));
  CHECK_THROWS_AS(p11(1.2, 0.8, det), DomainError);
  CHECK_THROWS_AS(p11(0.5, 0.8, DetectorModel{1.5, 0, 0}), DomainError);
  CHECK(p_noise(0.02, 4.2) == doctest::Approx(0.02 * std::exp(-4.2)));
}

TEST_CASE("geometric sums and counts") {
  CHECK(geometric_sum(1.0, 7.0) == 7.0);
  double s = 0.0;
  for (int k = 0; k < 10; ++k) s += std::pow(0.9, k);
  CHECK(geometric_sum(0.9, 10.0) == doctest::Approx(s));
  CHECK(geometric_sum(0.0, 5.0) == doctest::Approx(1.0));

  const RepeatedRun run{10, 0.9, 0.5, 0.5};
  const Counts c = average_counts(run, 0.1, 0.001);
  // Brute force: attempt k carries the photon with probability p_t^{k-1}.
  double n1 = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double alive = std::pow(0.9, k - 1);
    n1 += alive * 0.1 + (1.0 - alive) * 0.001;
  }
  CHECK(c.with_photon == doctest::Approx(n1));
  CHECK(c.without_photon == doctest::Approx(10 * 0.001));
  CHECK(c.total == doctest::Approx(0.5 * n1 + 0.5 * 0.01));
  CHECK(accuracy(run, 0.1, 0.001) == doctest::Approx(0.5 * 0.1 * s / c.total));

  CHECK_THROWS_AS(average_counts(RepeatedRun{0, 1.0, 0.5, 0.5}, 0.1, 0.001), DomainError);
  CHECK_THROWS_AS(average_counts(RepeatedRun{3, 1.0, 0.4, 0.5}, 0.1, 0.001), DomainError);
  CHECK_THROWS_AS(accuracy(RepeatedRun{3, 1.0, 0.5, 0.5}, 0.0, 0.0), DomainError);
}

TEST_CASE("accuracy limits") {
  CHECK(accuracy_limit(1.0, 0.5, 0.5, 0.1, 0.001) == doctest::Approx(0.1 / 0.101));
  CHECK(accuracy_limit(0.9, 0.5, 0.5, 0.1, 0.001) == 0.0);
  CHECK(accuracy(1e6, 0.9, 0.5, 0.5, 0.1, 0.001) < 0.01);
  CHECK(accuracy(25.0, 1.0, 0.5, 0.5, 0.1, 0.001) == doctest::Approx(0.1 / 0.101));
}

TEST_CASE("efficiency") {
  const double p11v = 0.0966942, p01v = 0.00160972;
  const Efficiency e = efficiency(1.0, 0.5, 0.5, p11v, p01v);
  CHECK_FALSE(e.at_boundary);
  CHECK(average_counts(e.n_star, 1.0, 0.5, 0.5, p11v, p01v).total == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(e.value == doctest::Approx(p11v / (p11v + p01v)));

  const Efficiency b = efficiency(0.9, 0.5, 0.5, p11v, p01v);
  CHECK(b.at_boundary);
  CHECK(b.n_star == 25.0);

  const Efficiency one = efficiency(1.0, 0.5, 0.5, 0.99, 0.5);
  CHECK(one.n_star == 1.0);
  CHECK_THROWS_AS(efficiency(1.0, 0.5, 0.5, p11v, p01v, 0.5), DomainError);
}

TEST_CASE("speedup arithmetic") {
  const Speedup s = cnot_speedup({1.3e4, 78.4});
  CHECK(s.volume_ratio == doctest::Approx(1.3e4 / 78.4));
  CHECK(s.g_ratio == doctest::Approx(std::sqrt(1.3e4 / 78.4)));
  CHECK(s.t_cnot_ratio == doctest::Approx(23.0 / s.g_ratio));
  CHECK(s.speedup == doctest::Approx(3.0 * s.g_ratio / 23.0));
  CHECK_THROWS_AS(cnot_speedup({0.0, 1.0}), DomainError);
}
