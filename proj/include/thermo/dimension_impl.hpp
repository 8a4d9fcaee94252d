#pragma once

#include <cmath>

#include "thermo/errors.hpp"

namespace thermo {

template <typename F>
RootData decreasing_root(F &&f, double tolerance) {
  RootData out;
  double lo = 0.0, hi = 1.0;
  double f_lo = f(lo);
  if (f_lo < 0.0) throw NumericalError("decreasing_root: f(0) < 0");
  double f_hi = f(hi);
  while (f_hi >= 0.0) {
    if (f_hi > f_lo) throw NumericalError("decreasing_root: function is not decreasing");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("decreasing_root: no sign change");
    f_hi = f(hi);
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid > f_lo || f_mid < f_hi) throw NumericalError("decreasing_root: function is not decreasing");
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    ++out.iterations;
  }
  out.root = 0.5 * (lo + hi);
  return out;
}

}  // namespace thermo
