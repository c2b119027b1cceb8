#ifndef PADSIM_NUMERICS_HPP
#define PADSIM_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace padsim::numerics {

using State = std::vector<double>;

/// Right-hand side f(t, y, dydt). Must be reentrant.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeProblem {
  Rhs rhs;
  State initial;
  double t0 = 0.0;
  double t1 = 1.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// Upper bound on a single step; 0 means the whole span.
  double max_step = 0.0;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Dormand-Prince 5(4) with step-size control and the fifth-order dense
/// output. Returns the state at each sample time; sample times must be
/// nondecreasing and lie in [t0, t1]. Throws IntegratorError when the step
/// falls below 1e-12 of the span.
std::vector<State> integrate(const OdeProblem& problem, std::span<const double> sample_times,
                             IntegrationStats* stats = nullptr);

/// Samples on a uniform grid x_k = x0 + k*dx.
template <typename T>
struct GridFunction {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<T> values;
};

double trapezoid(std::span<const double> values, double dx);
std::complex<double> trapezoid(std::span<const std::complex<double>> values, double dx);
/// Composite Simpson; an even sample count closes with one trapezoid panel.
double simpson(std::span<const double> values, double dx);

template <typename T>
T quad(const GridFunction<T>& f) {
  return trapezoid(std::span<const T>(f.values), f.dx);
}

/// Bisection until the bracket is narrower than tol.
/// Throws ConvergenceError if f(lo) and f(hi) share a sign.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol);

struct Peak {
  double x = 0.0;
  double value = 0.0;
  bool at_boundary = false;
};

/// Coarse scan of `coarse_points` samples, then golden-section refinement
/// around the best sample until the bracket is below tol.
Peak find_peak(const std::function<double(double)>& f, double lo, double hi, double tol,
               std::size_t coarse_points = 201);

/// Golden-section maximisation on [lo, hi], assumed unimodal.
Peak golden_max(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace padsim::numerics

#endif  // PADSIM_NUMERICS_HPP
