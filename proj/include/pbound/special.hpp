#pragma once

// Collision probabilities of binomial laws and their Poisson limit:
//   psi^n(p)   = sum_k B^n_k(p)^2                    (P(U = V), U, V ~ B(n, p))
//   phi^n(u)   = psi^n(p^n(u)),  n p^n(u) (1 - p^n(u)) = u
//   phi^inf(u) = e^{-2u} sum_k (u^k / k!)^2 = e^{-2u} I_0(2u)
//   M(u)       = sqrt(2u) phi^inf(u)
// Each phi is available both as a finite sum and as a periodic integral.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pbound/detail/summation.hpp"
#include "pbound/dist_core.hpp"
#include "pbound/errors.hpp"
#include "pbound/quadrature.hpp"

namespace pbound {

struct SeriesConfig {
  double relative_cutoff = 1e-18;
  std::int64_t max_terms = 4096;

  void validate() const {
    if (!(relative_cutoff > 0.0 && relative_cutoff <= 1e-6)) {
      throw std::invalid_argument("series: relative_cutoff must lie in (0, 1e-6]");
    }
    if (max_terms < 64) throw std::invalid_argument("series: max_terms must be >= 64");
  }
};

inline double psi_n(std::int64_t n, double p) {
  if (n < 1) throw std::invalid_argument("psi_n: n must be positive");
  detail::CompensatedSum s;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double b = binomial_pmf(n, k, p);
    s += b * b;
  }
  return s.value();
}

/// Smaller root of n p (1 - p) = u. Evaluated as 2(u/n) / (1 + sqrt(1 - 4u/n)),
/// which equals (1 - sqrt(1 - 4u/n)) / 2 without the cancellation at small u.
inline double p_of_u(std::int64_t n, double u) {
  if (n < 1) throw std::invalid_argument("p_of_u: n must be positive");
  const double nn = static_cast<double>(n);
  if (!(u >= 0.0) || u > nn / 4.0) {
    throw std::domain_error("p_of_u: variance " + std::to_string(u) +
                            " is not attainable with n = " + std::to_string(n));
  }
  const double r = u / nn;
  return 2.0 * r / (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * r)));
}

inline double phi_n_series(std::int64_t n, double u) { return psi_n(n, p_of_u(n, u)); }

/// (1/2pi) * integral of [1 - 2u(1 - cos t)/n]^n over one period.
inline double phi_n_integral(std::int64_t n, double u, const QuadratureConfig& cfg = {}) {
  (void)p_of_u(n, u);  // same domain
  const double scale = 4.0 * u / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  auto integrand = [scale, nn](double t) {
    const double s = std::sin(0.5 * t);
    return std::pow(1.0 - scale * s * s, nn);
  };
  return periodic_mean(integrand, cfg).value;
}

namespace detail {

struct PoissonSquareSums {
  double same;      // sum_k p_k^2
  double adjacent;  // sum_k p_k p_{k+1}
};

// Sums over the Poisson(u) weights p_k, walking outward from the mode so that
// e^{-2u} never has to be formed on its own.
inline PoissonSquareSums poisson_square_sums(double u, const SeriesConfig& cfg) {
  cfg.validate();
  if (!(u >= 0.0)) throw std::invalid_argument("phi_infinity: u must be nonnegative");
  if (u == 0.0) return {1.0, 0.0};

  const double mode = std::floor(u);
  const double p_mode = poisson_pmf(u, static_cast<std::int64_t>(mode));
  CompensatedSum same;
  CompensatedSum adjacent;
  same += p_mode * p_mode;
  std::int64_t terms = 1;

  double prev = p_mode;
  for (double k = mode + 1.0;; k += 1.0) {
    const double pk = prev * u / k;
    same += pk * pk;
    adjacent += prev * pk;
    prev = pk;
    if (++terms > cfg.max_terms) {
      throw NonConvergence("phi_infinity: series did not converge within " +
                           std::to_string(cfg.max_terms) + " terms");
    }
    if (k > u && pk * pk < cfg.relative_cutoff * same.value()) break;
  }

  prev = p_mode;
  for (double k = mode - 1.0; k >= 0.0; k -= 1.0) {
    const double pk = prev * (k + 1.0) / u;
    same += pk * pk;
    adjacent += prev * pk;
    prev = pk;
    if (++terms > cfg.max_terms) {
      throw NonConvergence("phi_infinity: series did not converge within " +
                           std::to_string(cfg.max_terms) + " terms");
    }
    if (pk * pk < cfg.relative_cutoff * same.value()) break;
  }
  return {same.value(), adjacent.value()};
}

}  // namespace detail

inline double phi_infinity(double u, const SeriesConfig& cfg = {}) {
  return detail::poisson_square_sums(u, cfg).same;
}

/// (1/2pi) * integral of exp(-2u(1 - cos t)) over one period.
inline double phi_infinity_integral(double u, const QuadratureConfig& cfg = {}) {
  if (!(u >= 0.0)) throw std::invalid_argument("phi_infinity_integral: u must be nonnegative");
  auto integrand = [u](double t) {
    const double s = std::sin(0.5 * t);
    return std::exp(-4.0 * u * s * s);
  };
  return periodic_mean(integrand, cfg).value;
}

/// h(u) = ln phi^inf(u).
inline double log_phi(double u, const SeriesConfig& cfg = {}) { return std::log(phi_infinity(u, cfg)); }

/// M(u) = sqrt(2u) phi^inf(u), with M(0) = 0.
inline double m_of_u(double u, const SeriesConfig& cfg = {}) {
  if (!(u >= 0.0)) throw std::invalid_argument("m_of_u: u must be nonnegative");
  if (u == 0.0) return 0.0;
  return std::sqrt(2.0 * u) * phi_infinity(u, cfg);
}

/// Analytic M'(u) for u > 0, from d/du sum (u^k/k!)^2 = 2 sum u^{2k+1} / (k!(k+1)!).
inline double m_prime(double u, const SeriesConfig& cfg = {}) {
  if (!(u > 0.0)) throw std::invalid_argument("m_prime: u must be positive");
  const auto sums = detail::poisson_square_sums(u, cfg);
  const double r = std::sqrt(2.0 * u);
  return sums.same / r + 2.0 * r * (sums.adjacent - sums.same);
}

/// Central second difference of ln phi^inf at u.
inline double log_phi_curvature(double u, double step) {
  if (!(step > 0.0) || !(u > 2.0 * step)) {
    throw std::invalid_argument("log_phi_curvature: requires u > 2*step > 0");
  }
  return (log_phi(u + step) - 2.0 * log_phi(u) + log_phi(u - step)) / (step * step);
}

/// 4 sum 1/(k!(k+1)!) - 3 sum 1/(k!)^2, each series truncated at relative 1e-18.
inline double m_prime_at_1_bracket() {
  detail::CompensatedSum same;
  detail::CompensatedSum shifted;
  double inv_fact = 1.0;  // 1/k!
  for (int k = 0; k < 200; ++k) {
    if (k > 0) inv_fact /= k;
    const double a = inv_fact * inv_fact;
    const double b = a / (k + 1);
    same += a;
    shifted += b;
    if (a < 1e-18 * same.value() && b < 1e-18 * shifted.value()) break;
  }
  return 4.0 * shifted.value() - 3.0 * same.value();
}

/// M'(1) = (e^{-2} / sqrt 2) * [4 sum 1/(k!(k+1)!) - 3 sum 1/(k!)^2].
inline double m_prime_at_1() { return std::exp(-2.0) / std::numbers::sqrt2 * m_prime_at_1_bracket(); }

/// Cauchy-Schwarz envelope sqrt(x + y) sqrt(phi^a(x) phi^b(y)).
inline double cs_envelope(std::int64_t a, std::int64_t b, double x, double y) {
  return std::sqrt(x + y) * std::sqrt(phi_n_series(a, x) * phi_n_series(b, y));
}

}  // namespace pbound
