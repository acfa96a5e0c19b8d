#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pbound/detail/summation.hpp"
#include "pbound/errors.hpp"

namespace pbound {

struct QuadratureConfig {
  std::int64_t initial_points = 8;  // power of two, >= 8
  double tolerance = 1e-13;
  int max_doublings = 15;  // 8 -> 2^18 points

  void validate() const {
    if (initial_points < 8 || (initial_points & (initial_points - 1)) != 0) {
      throw std::invalid_argument("quadrature: initial_points must be a power of two >= 8");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("quadrature: tolerance must be positive");
    if (max_doublings < 1) throw std::invalid_argument("quadrature: max_doublings must be positive");
  }
};

struct QuadratureResult {
  double value;
  std::int64_t points;
};

/// Mean value (1/2pi) * integral over [0, 2pi) of a smooth 2pi-periodic f by
/// the trapezoid rule. The point count doubles (reusing previous nodes) until
/// two successive estimates differ by less than cfg.tolerance.
template <typename F>
QuadratureResult periodic_mean(F&& f, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::int64_t n = cfg.initial_points;
  detail::CompensatedSum acc;
  for (std::int64_t j = 0; j < n; ++j) {
    acc += f(two_pi * static_cast<double>(j) / static_cast<double>(n));
  }
  double previous = acc.value() / static_cast<double>(n);
  for (int d = 0; d < cfg.max_doublings; ++d) {
    // New nodes are the odd multiples of pi/n.
    for (std::int64_t j = 0; j < n; ++j) {
      acc += f(std::numbers::pi * static_cast<double>(2 * j + 1) / static_cast<double>(n));
    }
    n *= 2;
    const double current = acc.value() / static_cast<double>(n);
    if (std::abs(current - previous) < cfg.tolerance) return {current, n};
    previous = current;
  }
  throw NonConvergence("periodic trapezoid rule did not converge within " +
                       std::to_string(cfg.max_doublings) + " doublings");
}

}  // namespace pbound
