#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pbound {

struct ScalarMaximum {
  double x;
  double fx;
  std::int64_t evaluations;
};

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
/// Stops when the bracket is narrower than tol or when the two interior
/// values become indistinguishable and the bracket cannot shrink further.
template <typename F>
ScalarMaximum golden_section_maximize(F&& f, double lo, double hi, double tol,
                                      int max_iterations = 500) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section_maximize: empty bracket");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section_maximize: tol must be positive");

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  std::int64_t evals = 2;

  for (int it = 0; it < max_iterations && (hi - lo) > tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      if (!(c > lo && c < d)) break;
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      if (!(d > c && d < hi)) break;
      fd = f(d);
    }
    ++evals;
  }
  return fc >= fd ? ScalarMaximum{c, fc, evals} : ScalarMaximum{d, fd, evals};
}

}  // namespace pbound
