#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlcs/errors.hpp"

namespace nlcs {

template <class F, class R>
double integrate_log_concave(F&& log_f, R&& log_ratio, double guess, double scale, double quad_tol) {
  // Walk uphill until the peak is bracketed by lower values on both sides.
  double step = scale;
  double b = guess;
  double fb = log_f(b);
  double a = b - step;
  double fa = log_f(a);
  double c = b + step;
  double fc = log_f(c);
  for (int iter = 0; iter < 200 && !(fb >= fa && fb >= fc); ++iter) {
    step *= 2.0;
    if (fa > fb) {
      c = b;
      fc = fb;
      b = a;
      fb = fa;
      a = b - step;
      fa = log_f(a);
    } else {
      a = b;
      fa = fb;
      b = c;
      fb = fc;
      c = b + step;
      fc = log_f(c);
    }
  }
  if (!(fb >= fa && fb >= fc)) throw QuadratureError("could not bracket the peak of the integrand");

  // Golden-section refinement of the peak.
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = c - kInvPhi * (c - a);
  double x2 = a + kInvPhi * (c - a);
  double f1 = log_f(x1);
  double f2 = log_f(x2);
  for (int iter = 0; iter < 200 && (c - a) > 1e-9 * (1.0 + std::fabs(b)); ++iter) {
    if (f1 > f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kInvPhi * (c - a);
      f1 = log_f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (c - a);
      f2 = log_f(x2);
    }
  }
  const double t_peak = f1 > f2 ? x1 : x2;
  const double peak = log_f(t_peak);

  // Grow the interval until the integrand is e^-60 below its peak on both ends.
  constexpr double kDrop = 60.0;
  double width = scale;
  double lo = t_peak - width;
  for (int iter = 0; iter < 200 && log_f(lo) > peak - kDrop; ++iter) {
    width *= 2.0;
    lo = t_peak - width;
  }
  width = scale;
  double hi = t_peak + width;
  for (int iter = 0; iter < 200 && log_f(hi) > peak - kDrop; ++iter) {
    width *= 2.0;
    hi = t_peak + width;
  }

  double error = 0.0;
  auto g = [&](double t) { return std::exp(log_ratio(t, t_peak)); };
  // Panels stop on their own relative error, so the summed estimate can overshoot; request a margin.
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, lo, hi, 20, 0.25 * quad_tol, &error);
  if (!(value > 0.0) || error > quad_tol * value) {
    std::ostringstream os;
    os << "adaptive quadrature reached relative error " << error / value << " above tolerance " << quad_tol;
    throw QuadratureError(os.str());
  }
  return peak + std::log(value);
}

template <class F>
double integrate_log_concave(F&& log_f, double guess, double scale, double quad_tol) {
  auto ratio = [&](double t, double t0) { return log_f(t) - log_f(t0); };
  return integrate_log_concave(log_f, ratio, guess, scale, quad_tol);
}

}  // namespace nlcs
