#pragma once

// The sharp constant M = max_u sqrt(2u) phi^inf(u) and the checks of
// sigma * P(S = i) <= M for Bernoulli sums and Poisson differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "pbound/detail/loader.hpp"
#include "pbound/dist_core.hpp"
#include "pbound/golden_section.hpp"
#include "pbound/special.hpp"

namespace pbound {

/// The maximizer u_star of M(u) and the constant m_star = M(u_star).
struct ConstantResult {
  double u_star = 0.0;
  double m_star = 0.0;
  double tolerance = 0.0;
  std::int64_t evaluations = 0;
};

struct BoundReport {
  std::string input_descriptor;
  double sigma_value = 0.0;
  std::int64_t argmax_index = 0;
  double max_product = 0.0;
  double margin = 0.0;
  double m_used = 0.0;
};

/// Closed integer interval [lo, hi].
struct IndexRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Golden-section maximization of M on [0, 1] followed by one Newton step on
/// the analytic M'. The second derivative in that step is a central
/// difference of M'. Golden section alone stalls around 1e-8 in the abscissa
/// because M is flat to double precision near its peak; the Newton step
/// recovers the remaining digits.
inline ConstantResult compute_constants(double tolerance = 1e-13) {
  if (!(tolerance >= 1e-15 && tolerance <= 1e-6)) {
    throw std::invalid_argument("compute_constants: tolerance must lie in [1e-15, 1e-6]");
  }
  std::int64_t evaluations = 0;
  auto objective = [&evaluations](double u) {
    ++evaluations;
    return m_of_u(u);
  };
  const ScalarMaximum coarse = golden_section_maximize(objective, 0.0, 1.0, tolerance);
  double u = coarse.x;

  constexpr double h = 1e-5;
  const double slope = m_prime(u);
  const double curvature = (m_prime(u + h) - m_prime(u - h)) / (2.0 * h);
  evaluations += 3;
  if (curvature < 0.0) {
    const double step = -slope / curvature;
    if (std::abs(step) < 1e-4) u += step;
  }
  ++evaluations;
  return ConstantResult{u, m_of_u(u), tolerance, evaluations};
}

/// Maximizes sigma * P(S = i) over i for the Bernoulli sum with parameters p.
/// Ties go to the smallest index.
inline BoundReport check_bound(const ParameterVector& p, double m_used,
                               std::string descriptor = {}) {
  const PmfTable table = poisson_binomial_pmf(p);
  const double s = sigma(p);
  BoundReport r;
  r.input_descriptor = std::move(descriptor);
  r.sigma_value = s;
  r.m_used = m_used;
  r.argmax_index = table.min_index();
  r.max_product = s * table.at(table.min_index());
  for (std::int64_t i = table.min_index() + 1; i <= table.max_index(); ++i) {
    const double v = s * table.at(i);
    if (v > r.max_product) {
      r.max_product = v;
      r.argmax_index = i;
    }
  }
  r.margin = m_used - r.max_product;
  return r;
}

/// Maximizes sqrt(x + y) * P(X - Y = i) over the supplied index window, which
/// must contain floor(x - y) and ceil(x - y).
inline BoundReport check_skellam_bound(double x, double y, IndexRange range, double m_used) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::invalid_argument("check_skellam_bound: rates must be nonnegative");
  }
  const double d = x - y;
  if (range.lo > range.hi || static_cast<double>(range.lo) > std::floor(d) ||
      static_cast<double>(range.hi) < std::ceil(d)) {
    throw std::invalid_argument("check_skellam_bound: index range [" + std::to_string(range.lo) +
                                ", " + std::to_string(range.hi) +
                                "] does not cover the mode near " + std::to_string(d));
  }
  const double s = skellam_sigma(x, y);
  BoundReport r;
  r.input_descriptor = "skellam(x=" + std::to_string(x) + ", y=" + std::to_string(y) + ")";
  r.sigma_value = s;
  r.m_used = m_used;
  r.argmax_index = range.lo;
  r.max_product = s * skellam_pmf(x, y, range.lo);
  for (std::int64_t i = range.lo + 1; i <= range.hi; ++i) {
    const double v = s * skellam_pmf(x, y, i);
    if (v > r.max_product) {
      r.max_product = v;
      r.argmax_index = i;
    }
  }
  r.margin = m_used - r.max_product;
  return r;
}

/// sqrt(2 a lam (1 - lam)) * B^a_k(lam). Dividing by sqrt(2) gives sigma * P
/// for a single binomial.
inline double single_binomial_product(std::int64_t a, std::int64_t k, double lam) {
  if (a < 1 || k < 0 || k > a) {
    throw std::invalid_argument("single_binomial_product: need a >= 1 and 0 <= k <= a");
  }
  return std::sqrt(2.0 * static_cast<double>(a) * lam * (1.0 - lam)) * binomial_pmf(a, k, lam);
}

/// Maximizer (k + 1/2) / (a + 1) of single_binomial_product in lam.
inline double single_binomial_argmax(std::int64_t a, std::int64_t k) {
  return (static_cast<double>(k) + 0.5) / (static_cast<double>(a) + 1.0);
}

/// log C^a_k where
///   C^a_k = C(a,k) sqrt(2a) (k+1/2)^{k+1/2} (a-k+1/2)^{a-k+1/2} / (a+1)^{a+1}.
/// The expression is symmetric in k <-> a-k and is evaluated at min(k, a-k),
/// so C^a_k and C^a_{a-k} come out bitwise equal.
inline double log_c_ak(std::int64_t a, std::int64_t k) {
  if (a < 1 || k < 0 || k > a) throw std::invalid_argument("c_ak: need a >= 1 and 0 <= k <= a");
  k = std::min(k, a - k);
  const double n = static_cast<double>(a);
  const double j = static_cast<double>(k);

  double log_choose = 0.0;
  if (k > 0) {
    log_choose = detail::stirlerr(n) - detail::stirlerr(j) - detail::stirlerr(n - j) -
                 0.5 * (detail::kLog2Pi + std::log(j) + std::log1p(-j / n)) -
                 j * std::log(j / n) - (n - j) * std::log1p(-j / n);
  }
  const double lo = j + 0.5;
  const double hi = n - j + 0.5;
  return log_choose + 0.5 * std::log(2.0 * n) + lo * std::log(lo / (n + 1.0)) +
         hi * std::log1p(-lo / (n + 1.0));
}

inline double c_ak(std::int64_t a, std::int64_t k) { return std::exp(log_c_ak(a, k)); }

/// H(x) = x (x - 1/2)^{x - 1/2} / (x + 1/2)^{x + 1/2} for x >= 1, so that
/// C^a_{k+1} / C^a_k = H(a - k) / H(k + 1).
inline double h_ratio(double x) {
  if (!(x >= 1.0)) throw std::invalid_argument("h_ratio: x must be >= 1");
  return std::exp(-std::log1p(0.5 / x) + (x - 0.5) * std::log1p(-1.0 / (x + 0.5)));
}

/// sigma * P(S = a) for S the sum of a Bernoullis with parameter u/a and a
/// Bernoullis with parameter 1 - u/a:
///   sqrt(2u(1 - u/a)) * sum_k C(a,k)^2 (u/a)^{2k} (1 - u/a)^{2(a-k)}.
inline double sharpness_value(std::int64_t a, double u) {
  if (a < 1) throw std::invalid_argument("sharpness_value: a must be positive");
  const double n = static_cast<double>(a);
  if (!(u > 0.0 && u <= n)) throw std::invalid_argument("sharpness_value: need 0 < u <= a");
  const double lam = u / n;
  return std::sqrt(2.0 * u * (1.0 - lam)) * psi_n(a, lam);
}

}  // namespace pbound
