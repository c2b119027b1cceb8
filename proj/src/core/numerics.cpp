#include "padsim/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "padsim/errors.hpp"

namespace padsim::numerics {

namespace {

// Dormand-Prince 5(4) tableau, with the dense-output coefficients of
// Hairer, Norsett & Wanner.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double rms_norm(std::span<const double> v, std::span<const double> scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v[i] / scale[i];
    acc += r * r;
  }
  return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

std::vector<State> integrate(const OdeProblem& problem, std::span<const double> sample_times,
                             IntegrationStats* stats) {
  const std::size_t n = problem.initial.size();
  const double span = problem.t1 - problem.t0;
  if (!problem.rhs) throw DomainError("integrate: missing right-hand side");
  if (!(problem.rel_tol > 0.0) || !(problem.abs_tol > 0.0))
    throw DomainError("integrate: tolerances must be positive");
  if (!(span > 0.0)) throw DomainError("integrate: time span must be nondegenerate");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double ts = sample_times[i];
    if (ts < problem.t0 - 1e-12 * span || ts > problem.t1 + 1e-12 * span)
      throw DomainError("integrate: sample time outside the integration span");
    if (i > 0 && ts < sample_times[i - 1])
      throw DomainError("integrate: sample times must be nondecreasing");
  }

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  st = {};

  const double max_step = problem.max_step > 0.0 ? std::min(problem.max_step, span) : span;
  const double min_step = 1e-12 * span;

  std::vector<State> out;
  out.reserve(sample_times.size());
  std::size_t next_sample = 0;

  State y = problem.initial, y1(n), ytmp(n), err(n), scale(n);
  std::array<State, 7> k;
  for (auto& ki : k) ki.assign(n, 0.0);
  std::array<State, 5> cont;
  for (auto& ci : cont) ci.assign(n, 0.0);

  auto f = [&](double t, const State& in, State& dydt) {
    problem.rhs(t, in, dydt);
    ++st.rhs_evaluations;
  };

  double t = problem.t0;
  f(t, y, k[0]);

  // Initial step from the scale of y and y'.
  for (std::size_t i = 0; i < n; ++i) scale[i] = problem.abs_tol + problem.rel_tol * std::abs(y[i]);
  const double dnorm0 = rms_norm(y, scale);
  const double dnorm1 = rms_norm(k[0], scale);
  double h = (dnorm0 < 1e-5 || dnorm1 < 1e-5) ? 1e-6 * span : 0.01 * dnorm0 / dnorm1;
  h = std::clamp(h, 10.0 * min_step, max_step);

  while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
    out.push_back(y);
    ++next_sample;
  }

  bool last_rejected = false;
  while (t < problem.t1 && next_sample < sample_times.size()) {
    if (t + h > problem.t1) h = problem.t1 - t;
    if (h < min_step) {
      std::ostringstream os;
      os << "integrate: step size underflow (h=" << h << ") at t=" << t;
      throw IntegratorError(os.str());
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
    f(t + c2 * h, ytmp, k[1]);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    f(t + c3 * h, ytmp, k[2]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    f(t + c4 * h, ytmp, k[3]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    f(t + c5 * h, ytmp, k[4]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                            a65 * k[4][i]);
    f(t + h, ytmp, k[5]);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                          a76 * k[5][i]);
    f(t + h, y1, k[6]);

    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                    e7 * k[6][i]);
      scale[i] = problem.abs_tol + problem.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
    }
    const double enorm = rms_norm(err, scale);
    if (!std::isfinite(enorm)) throw IntegratorError("integrate: non-finite state encountered");

    if (enorm <= 1.0) {
      ++st.accepted;
      const double t_new = t + h;
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k[0][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[6][i] - bspl;
        cont[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                          d6 * k[5][i] + d7 * k[6][i]);
      }
      const bool final_step = t_new >= problem.t1;
      while (next_sample < sample_times.size() &&
             (sample_times[next_sample] <= t_new || final_step)) {
        const double theta = std::clamp((sample_times[next_sample] - t) / h, 0.0, 1.0);
        const double theta1 = 1.0 - theta;
        State ys(n);
        for (std::size_t i = 0; i < n; ++i)
          ys[i] = cont[0][i] +
                  theta * (cont[1][i] +
                           theta1 * (cont[2][i] + theta * (cont[3][i] + theta1 * cont[4][i])));
        out.push_back(std::move(ys));
        ++next_sample;
      }
      t = t_new;
      y.swap(y1);
      k[0].swap(k[6]);  // FSAL
      double fac = enorm > 0.0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, max_step);
      last_rejected = false;
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
      last_rejected = true;
    }
  }
  return out;
}

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * dx;
}

std::complex<double> trapezoid(std::span<const std::complex<double>> values, double dx) {
  if (values.size() < 2) return {};
  std::complex<double> acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * dx;
}

double simpson(std::span<const double> values, double dx) {
  const std::size_t n = values.size();
  if (n < 3) return trapezoid(values, dx);
  const std::size_t m = (n % 2 == 1) ? n : n - 1;  // odd count for Simpson
  double acc = values[0] + values[m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
  double total = acc * dx / 3.0;
  if (m != n) total += 0.5 * dx * (values[n - 2] + values[n - 1]);
  return total;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(hi > lo)) throw DomainError("find_root: empty bracket");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw ConvergenceError("find_root: no sign change over bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Peak golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), false};
}

Peak find_peak(const std::function<double(double)>& f, double lo, double hi, double tol,
               std::size_t coarse_points) {
  if (!(hi > lo)) throw DomainError("find_peak: empty window");
  coarse_points = std::max<std::size_t>(coarse_points, 3);
  const double step = (hi - lo) / static_cast<double>(coarse_points - 1);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  bool all_equal = true;
  double first = 0.0;
  for (std::size_t i = 0; i < coarse_points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (i == 0) first = v;
    if (v != first) all_equal = false;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (all_equal || best == 0 || best == coarse_points - 1) {
    const double x = lo + step * static_cast<double>(best);
    return {x, best_val, true};
  }
  const double a = lo + step * static_cast<double>(best - 1);
  const double b = lo + step * static_cast<double>(best + 1);
  Peak p = golden_max(f, a, b, tol);
  if (p.value < best_val) p = {lo + step * static_cast<double>(best), best_val, false};
  return p;
}

}  // namespace padsim::numerics
