#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pbound/special.hpp"

namespace {

using namespace pbound;
namespace oracle = pbound::testing;

TEST(PsiN, Values) {
  EXPECT_DOUBLE_EQ(psi_n(1, 0.5), 0.5);
  EXPECT_EQ(psi_n(3, 0.0), 1.0);
  EXPECT_THROW(psi_n(0, 0.5), std::invalid_argument);
}

TEST(PsiN, VandermondeAtOneHalf) {
  // sum_k C(n,k)^2 = C(2n, n)
  for (int n = 1; n <= 20; ++n) {
    const double ref = static_cast<double>(oracle::pascal_binomial(2 * n, n)) / std::pow(4.0, n);
    EXPECT_NEAR(psi_n(n, 0.5), ref, 1e-15 * ref) << n;
  }
}

TEST(PofU, RootAndDomain) {
  EXPECT_EQ(p_of_u(4, 1.0), 0.5);
  EXPECT_EQ(p_of_u(9, 0.0), 0.0);
  const double p = p_of_u(10, 0.9);
  EXPECT_LT(std::abs(10.0 * p * (1.0 - p) - 0.9), 1e-13);
  EXPECT_LE(p, 0.5);
  EXPECT_THROW(p_of_u(4, 1.0000001), std::domain_error);
  EXPECT_THROW(p_of_u(4, -0.1), std::domain_error);
}

TEST(PofU, ResidualOnGrid) {
  for (std::int64_t n = 1; n <= 200; n += 7) {
    for (int j = 0; j <= 40; ++j) {
      const double u = j * static_cast<double>(n) / 160.0;
      const double p = p_of_u(n, u);
      ASSERT_LT(std::abs(static_cast<double>(n) * p * (1.0 - p) - u), 1e-13 * std::max(1.0, u));
    }
  }
}

TEST(PhiN, SeriesValues) {
  EXPECT_DOUBLE_EQ(phi_n_series(1, 0.25), 0.5);
  EXPECT_EQ(phi_n_series(6, 0.0), 1.0);
  EXPECT_NEAR(phi_n_series(8, 0.3), phi_n_integral(8, 0.3), 1e-12);
}

TEST(PhiN, IntegralValues) {
  EXPECT_NEAR(phi_n_integral(1, 0.25), 0.5, 1e-15);
  EXPECT_EQ(phi_n_integral(6, 0.0), 1.0);
  EXPECT_NEAR(phi_n_integral(20, 1.7), phi_n_series(20, 1.7), 1e-12);
  EXPECT_THROW(phi_n_integral(4, 2.0), std::domain_error);
}

TEST(PhiN, CrossRepresentationGrid) {
  for (std::int64_t n = 1; n <= 50; ++n) {
    for (int j = 0; j <= 20; ++j) {
      const double u = 0.05 * j * static_cast<double>(n) / 4.0;
      ASSERT_NEAR(phi_n_series(n, u), phi_n_integral(n, u), 1e-11) << n << " " << u;
    }
  }
}

TEST(PhiN, IncreasesWithNAndStaysBelowLimit) {
  for (double u : {0.05, 0.39, 1.0, 3.3, 12.0, 49.0}) {
    const double limit = phi_infinity(u);
    const auto first = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(4.0 * u)));
    double prev = phi_n_series(first, u);
    EXPECT_LE(prev, limit + 1e-12);
    for (std::int64_t n = first + 1; n <= 200; ++n) {
      const double cur = phi_n_series(n, u);
      ASSERT_LE(prev, cur + 1e-12) << u << " " << n;
      ASSERT_LE(cur, limit + 1e-12) << u << " " << n;
      prev = cur;
    }
  }
}

TEST(Quadrature, ReportsNonConvergence) {
  QuadratureConfig cfg;
  cfg.max_doublings = 1;
  EXPECT_THROW(phi_infinity_integral(200.0, cfg), NonConvergence);
}

TEST(Quadrature, ValidatesConfig) {
  QuadratureConfig cfg;
  cfg.initial_points = 12;
  EXPECT_THROW(phi_infinity_integral(1.0, cfg), std::invalid_argument);
  cfg.initial_points = 4;
  EXPECT_THROW(phi_infinity_integral(1.0, cfg), std::invalid_argument);
  cfg.initial_points = 8;
  cfg.tolerance = 0.0;
  EXPECT_THROW(phi_infinity_integral(1.0, cfg), std::invalid_argument);
}

TEST(PhiInfinity, Values) {
  EXPECT_EQ(phi_infinity(0.0), 1.0);
  const double u = oracle::kReferenceUStar;
  EXPECT_NEAR(std::sqrt(2.0 * u) * phi_infinity(u), oracle::kReferenceMStar, 1e-15);
  EXPECT_NEAR(phi_infinity(2.5), phi_infinity_integral(2.5), 1e-12);
  EXPECT_THROW(phi_infinity(-0.5), std::invalid_argument);
}

TEST(PhiInfinity, TargetPairIsConsistent) {
  // The target M equals M at the target u to ~3e-16.
  EXPECT_NEAR(m_of_u(oracle::kTargetUStar), oracle::kTargetMStar, 1e-15);
}

TEST(PhiInfinity, SeriesMatchesIntegral) {
  EXPECT_EQ(phi_infinity_integral(0.0), 1.0);
  EXPECT_NEAR(phi_infinity_integral(1.0), phi_infinity(1.0), 1e-12);
  EXPECT_NEAR(phi_infinity_integral(10.0) / phi_infinity(10.0), 1.0, 1e-12);
  for (int j = 0; j <= 200; ++j) {
    const double u = 0.05 * j;
    ASSERT_NEAR(phi_infinity(u), phi_infinity_integral(u), 1e-11) << u;
  }
}

TEST(PhiInfinity, BesselIdentity) {
  for (int j = 0; j <= 100; ++j) {
    const double u = 0.05 * j;
    const double scaled = phi_infinity(u) * std::exp(2.0 * u);
    const auto ascending = static_cast<double>(oracle::bessel_i0_ascending(2.0L * u));
    ASSERT_NEAR(scaled / ascending, 1.0, 1e-12) << u;
    ASSERT_NEAR(scaled / std::cyl_bessel_i(0.0, 2.0 * u), 1.0, 1e-12) << u;
  }
}

TEST(PhiInfinity, LargeArgumentsStayFinite) {
  // e^{-2u} underflows for u > ~354; the mode-centred sum does not need it.
  const double u = 2000.0;
  const double v = phi_infinity(u);
  EXPECT_TRUE(std::isfinite(v));
  // Asymptotically e^{-2u} I_0(2u) ~ (1 + 1/(16u)) / sqrt(4 pi u).
  EXPECT_NEAR(v * std::sqrt(4.0 * std::numbers::pi * u), 1.0 + 1.0 / (16.0 * u), 1e-7);
}

TEST(PhiInfinity, SeriesBudget) {
  SeriesConfig cfg;
  cfg.max_terms = 64;
  EXPECT_THROW(phi_infinity(1000.0, cfg), NonConvergence);
  cfg.max_terms = 10;
  EXPECT_THROW(phi_infinity(1.0, cfg), std::invalid_argument);
  cfg = SeriesConfig{};
  cfg.relative_cutoff = 1e-3;
  EXPECT_THROW(phi_infinity(1.0, cfg), std::invalid_argument);
}

TEST(MofU, Values) {
  EXPECT_EQ(m_of_u(0.0), 0.0);
  EXPECT_NEAR(m_of_u(oracle::kReferenceUStar), oracle::kReferenceMStar, 1e-15);
  EXPECT_LT(m_of_u(1.0), m_of_u(oracle::kReferenceUStar));
}

TEST(MofU, UnimodalOnGrid) {
  constexpr int kPoints = 10000;
  int changes = 0;
  int last = 0;
  double prev = m_of_u(0.0);
  for (int j = 1; j <= kPoints; ++j) {
    const double cur = m_of_u(3.0 * j / kPoints);
    const int sign = cur > prev ? 1 : (cur < prev ? -1 : 0);
    if (sign != 0) {
      if (last != 0 && sign != last) ++changes;
      last = sign;
    }
    prev = cur;
  }
  EXPECT_EQ(changes, 1);
}

TEST(MPrime, MatchesFiniteDifferences) {
  for (double u : {0.05, 0.3, 0.39498921067178398, 1.0, 4.0, 20.0}) {
    const double h = 1e-6;
    const double fd = (m_of_u(u + h) - m_of_u(u - h)) / (2.0 * h);
    EXPECT_NEAR(m_prime(u), fd, 1e-8) << u;
  }
  EXPECT_NEAR(m_prime(oracle::kReferenceUStar), 0.0, 1e-15);
}

TEST(MPrimeAtOne, SignAndValue) {
  const double v = m_prime_at_1();
  EXPECT_LT(v, 0.0);
  // 40-digit reference.
  EXPECT_NEAR(v, -0.045571483954033801676, 1e-16);
  const double h = 1e-6;
  EXPECT_NEAR(v, (m_of_u(1.0 + h) - m_of_u(1.0 - h)) / (2.0 * h), 1e-8);
  EXPECT_DOUBLE_EQ(v, m_prime(1.0));
}

TEST(MPrimeAtOne, LeadingTermsCancel) {
  long double tail = 0.0L;
  long double inv_fact = 1.0L;
  for (int k = 1; k < 40; ++k) {
    inv_fact /= k;
    if (k >= 2) tail += 4.0L * inv_fact * inv_fact * (1.0L / (k + 1) - 0.75L);
  }
  EXPECT_NEAR(m_prime_at_1_bracket(), static_cast<double>(tail), 1e-15);
}

// ln phi^inf is the log of a Laplace transform in the variable u, so its
// second derivative is 4 Var(1 - cos T) > 0 under the tilted density. The
// finite difference must reproduce that positive curvature.
TEST(LogPhiCurvature, MatchesHighPrecisionSecondDerivative) {
  EXPECT_NEAR(log_phi_curvature(0.5, 1e-4), 1.417384129801425, 1e-6);
  EXPECT_NEAR(log_phi_curvature(2.0, 1e-4), 0.15379218997282027, 1e-6);
  EXPECT_NEAR(log_phi_curvature(oracle::kReferenceUStar, 1e-4), 1.6023948593948463, 1e-6);
  EXPECT_THROW(log_phi_curvature(1e-4, 1e-4), std::invalid_argument);
  EXPECT_THROW(log_phi_curvature(1.0, 0.0), std::invalid_argument);
}

TEST(LogPhiCurvature, PositiveAcrossRange) {
  for (int j = 0; j < 200; ++j) {
    const double u = 0.01 + (10.0 - 0.01) * (j + 0.5) / 200.0;
    EXPECT_GT(log_phi_curvature(u, 1e-4), 0.0) << u;
  }
}

TEST(CsEnvelope, Values) {
  EXPECT_EQ(cs_envelope(3, 5, 0.0, 0.0), 0.0);
  EXPECT_NEAR(cs_envelope(4, 4, 0.3, 0.3), std::sqrt(0.6) * phi_n_series(4, 0.3), 1e-15);
}

TEST(CsEnvelope, DominatesTwoBinomialObjectiveAndLimit) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> size(1, 60);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const TwoBinomialSpec s{size(rng), prob(rng), size(rng), prob(rng)};
    const double x = static_cast<double>(s.a) * s.lambda * (1.0 - s.lambda);
    const double y = static_cast<double>(s.b) * s.mu * (1.0 - s.mu);
    const double env = cs_envelope(s.a, s.b, x, y);
    for (std::int64_t i = 0; i <= s.a + s.b; ++i) {
      ASSERT_LE(std::sqrt(x + y) * two_binomial_point(s, i), env + 1e-12);
    }
    ASSERT_LE(env, std::sqrt(x + y) * std::sqrt(phi_infinity(x) * phi_infinity(y)) + 1e-12);
  }
}

}  // namespace
