#pragma once

// Probability mass functions for sums of independent Bernoulli variables and
// for the Poisson / Skellam limits of such sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbound/detail/loader.hpp"
#include "pbound/detail/summation.hpp"

namespace pbound {

/// Success probabilities p_1..p_n of independent Bernoulli variables.
/// Every entry is validated to lie in [0, 1]; the empty vector is allowed and
/// describes the point mass at 0.
class ParameterVector {
 public:
  ParameterVector() = default;

  explicit ParameterVector(std::vector<double> probs) : probs_(std::move(probs)) {
    for (std::size_t j = 0; j < probs_.size(); ++j) {
      const double p = probs_[j];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("probability at position " + std::to_string(j) +
                                    " is outside [0, 1]: " + std::to_string(p));
      }
    }
  }

  ParameterVector(std::initializer_list<double> probs)
      : ParameterVector(std::vector<double>(probs)) {}

  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return probs_.empty(); }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] double operator[](std::size_t j) const { return probs_[j]; }

  bool operator==(const ParameterVector&) const = default;

 private:
  std::vector<double> probs_;
};

/// Probabilities of an integer-valued law on a contiguous index window:
/// value(i) = P(S = i) for min_index <= i < min_index + size(), 0 elsewhere.
class PmfTable {
 public:
  PmfTable(std::int64_t min_index, std::vector<double> values)
      : min_index_(min_index), values_(std::move(values)) {}

  [[nodiscard]] std::int64_t min_index() const noexcept { return min_index_; }
  [[nodiscard]] std::int64_t max_index() const noexcept {
    return min_index_ + static_cast<std::int64_t>(values_.size()) - 1;
  }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double at(std::int64_t i) const noexcept {
    if (i < min_index_ || i > max_index()) return 0.0;
    return values_[static_cast<std::size_t>(i - min_index_)];
  }

  [[nodiscard]] double total() const noexcept {
    detail::CompensatedSum s;
    for (double v : values_) s += v;
    return s.value();
  }

 private:
  std::int64_t min_index_;
  std::vector<double> values_;
};

/// U + V with U ~ B(a, lambda), V ~ B(b, mu) independent.
struct TwoBinomialSpec {
  std::int64_t a = 0;
  double lambda = 0.0;
  std::int64_t b = 0;
  double mu = 0.0;

  void validate() const {
    if (a < 0 || b < 0) throw std::invalid_argument("binomial sizes must be nonnegative");
    if (!(lambda >= 0.0 && lambda <= 1.0) || !(mu >= 0.0 && mu <= 1.0)) {
      throw std::invalid_argument("binomial probabilities must lie in [0, 1]");
    }
  }

  [[nodiscard]] double variance() const noexcept {
    return static_cast<double>(a) * lambda * (1.0 - lambda) +
           static_cast<double>(b) * mu * (1.0 - mu);
  }

  /// The equivalent Bernoulli vector: lambda repeated a times, then mu b times.
  [[nodiscard]] ParameterVector expand() const {
    std::vector<double> p(static_cast<std::size_t>(a), lambda);
    p.insert(p.end(), static_cast<std::size_t>(b), mu);
    return ParameterVector(std::move(p));
  }

  auto operator<=>(const TwoBinomialSpec&) const = default;
};

namespace detail {

inline constexpr std::int64_t kExactBinomialLimit = 60;

// Exact C(n, k) for n <= 60 (fits in 64 bits; the running product never overflows
// because each partial value is itself a binomial coefficient times k).
inline std::uint64_t binomial_coefficient(std::int64_t n, std::int64_t k) {
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::int64_t j = 1; j <= k; ++j) {
    c = c / static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(n - k + j) +
        c % static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(n - k + j) /
            static_cast<std::uint64_t>(j);
  }
  return c;
}

}  // namespace detail

/// B^n_k(p) = C(n,k) p^k (1-p)^(n-k); exactly 0 for k outside [0, n].
inline double binomial_pmf(std::int64_t n, std::int64_t k, double p) {
  if (n < 0) throw std::invalid_argument("binomial_pmf: n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_pmf: p outside [0, 1]");
  if (k < 0 || k > n) return 0.0;
  if (n <= detail::kExactBinomialLimit) {
    const auto c = static_cast<double>(detail::binomial_coefficient(n, k));
    return c * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(n - k));
  }
  return detail::dbinom_raw(static_cast<double>(k), static_cast<double>(n), p, 1.0 - p);
}

/// Full table P(S = i), i = 0..n, built one Bernoulli at a time with
/// P^n_i = p_n P^{n-1}_{i-1} + (1 - p_n) P^{n-1}_i.
inline PmfTable poisson_binomial_pmf(const ParameterVector& p) {
  std::vector<double> v(p.size() + 1, 0.0);
  v[0] = 1.0;
  std::size_t len = 1;
  for (double pj : p.probs()) {
    const double qj = 1.0 - pj;
    v[len] = pj * v[len - 1];
    for (std::size_t i = len - 1; i > 0; --i) {
      v[i] = pj * v[i - 1] + qj * v[i];
    }
    v[0] *= qj;
    ++len;
  }
  for (double& x : v) {
    // Convex combinations of nonnegative values; only roundoff could go below zero.
    if (x < 0.0) x = 0.0;
  }
  return PmfTable(0, std::move(v));
}

/// Standard deviation sqrt(sum p_i (1 - p_i)).
inline double sigma(const ParameterVector& p) {
  detail::CompensatedSum s;
  for (double pj : p.probs()) s += pj * (1.0 - pj);
  return std::sqrt(std::max(s.value(), 0.0));
}

inline double mean(const ParameterVector& p) {
  detail::CompensatedSum s;
  for (double pj : p.probs()) s += pj;
  return s.value();
}

/// P(U + V = i) for the two-binomial law, summing B^a_k(lambda) B^b_{i-k}(mu)
/// over the k for which both factors are in support.
inline double two_binomial_point(const TwoBinomialSpec& spec, std::int64_t i) {
  spec.validate();
  if (i < 0 || i > spec.a + spec.b) return 0.0;
  const std::int64_t k_lo = std::max<std::int64_t>(0, i - spec.b);
  const std::int64_t k_hi = std::min(i, spec.a);
  detail::CompensatedSum s;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    s += binomial_pmf(spec.a, k, spec.lambda) * binomial_pmf(spec.b, i - k, spec.mu);
  }
  return s.value();
}

/// e^{-x} x^i / i!; 0 for i < 0.
inline double poisson_pmf(double x, std::int64_t i) {
  if (!(x >= 0.0)) throw std::invalid_argument("poisson_pmf: rate must be nonnegative");
  if (i < 0) return 0.0;
  return detail::dpois_raw(static_cast<double>(i), x);
}

/// P(X - Y = i) for independent X ~ Poisson(x), Y ~ Poisson(y).
/// The series over k (the value of Y) stops once the term drops below 1e-18
/// times the partial sum and k is past both Poisson modes.
inline double skellam_pmf(double x, double y, std::int64_t i) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::invalid_argument("skellam_pmf: rates must be nonnegative");
  }
  // Canonical orientation i >= 0 makes (x, y, i) <-> (y, x, -i) exact.
  if (i < 0) {
    std::swap(x, y);
    i = -i;
  }
  constexpr double kCutoff = 1e-18;
  const double k_guard = std::max(x, y);
  detail::CompensatedSum s;
  for (std::int64_t k = 0;; ++k) {
    const double term = poisson_pmf(x, k + i) * poisson_pmf(y, k);
    s += term;
    if (static_cast<double>(k) > k_guard && term <= kCutoff * s.value()) break;
  }
  return s.value();
}

/// Standard deviation of X - Y for independent Poissons: sqrt(x + y).
inline double skellam_sigma(double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::invalid_argument("skellam_sigma: rates must be nonnegative");
  }
  return std::sqrt(x + y);
}

}  // namespace pbound
