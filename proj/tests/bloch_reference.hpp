#ifndef PADSIM_TESTS_BLOCH_REFERENCE_HPP
#define PADSIM_TESTS_BLOCH_REFERENCE_HPP

#include <cmath>
#include <complex>

#include "padsim/bloch.hpp"
#include "padsim/params.hpp"

namespace padsim::testing {

using bloch::BlochState;
using cplx = std::complex<double>;

// Fixed-step RK4 of the driven equations with the cavity field slaved to the
// drive. Works on (<s_->, <s_3>) directly.
inline BlochState rk4_reference(const DerivedRates& r, double n_in, double phase, BlochState s0, double t, int steps) {
  const double G = r.total();
  const double omega = std::sqrt(2.0 * r.Gamma2) * std::sqrt(n_in * G);  // coupling * field amplitude
  const cplx field = std::polar(omega, phase);
  auto f = [&](cplx sm, double s3, cplx& dsm, double& ds3) {
    dsm = -G * sm - cplx(0, 1) * field * s3;
    const cplx cross = std::conj(field) * sm - std::conj(sm) * field;
    ds3 = -2.0 * G * (s3 + 1.0) + (cplx(0, -2) * cross).real();
  };
  cplx sm(0.5 * s0.p1, 0.5 * s0.p2);
  double s3 = s0.p3;
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    cplx a1, a2, a3, a4;
    double b1, b2, b3, b4;
    f(sm, s3, a1, b1);
    f(sm + 0.5 * h * a1, s3 + 0.5 * h * b1, a2, b2);
    f(sm + 0.5 * h * a2, s3 + 0.5 * h * b2, a3, b3);
    f(sm + h * a3, s3 + h * b3, a4, b4);
    sm += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    s3 += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  }
  return {2.0 * sm.real(), 2.0 * sm.imag(), s3};
}

}  // namespace padsim::testing

#endif  // PADSIM_TESTS_BLOCH_REFERENCE_HPP
