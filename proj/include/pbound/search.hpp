#pragma once

// Extremal search for sigma * P(S = i) over the two-binomial family
// U + V, U ~ B(a, lambda), V ~ B(b, mu), and random stress tests over
// arbitrary Bernoulli vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "pbound/bound.hpp"
#include "pbound/detail/parallel.hpp"
#include "pbound/dist_core.hpp"
#include "pbound/golden_section.hpp"

namespace pbound {

enum class SearchStrategy { grid, coordinate_ascent, random };

inline const char* to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::grid: return "grid";
    case SearchStrategy::coordinate_ascent: return "coordinate-ascent";
    case SearchStrategy::random: return "random";
  }
  return "unknown";
}

struct SearchRecord {
  std::variant<TwoBinomialSpec, ParameterVector> spec;
  std::int64_t index = 0;
  double objective = 0.0;
  SearchStrategy strategy = SearchStrategy::grid;
};

/// sqrt(Var(U + V)) * P(U + V = i).
inline double two_binomial_objective(const TwoBinomialSpec& spec, std::int64_t i) {
  return std::sqrt(spec.variance()) * two_binomial_point(spec, i);
}

inline double recompute_objective(const SearchRecord& r) {
  if (const auto* tb = std::get_if<TwoBinomialSpec>(&r.spec)) {
    return two_binomial_objective(*tb, r.index);
  }
  const auto& p = std::get<ParameterVector>(r.spec);
  return sigma(p) * poisson_binomial_pmf(p).at(r.index);
}

/// Search configuration. Sizes a >= b are enumerated from {1..a_max} x {0..a}
/// (or a geometric ladder of sizes). For each size n the probability grid is
/// j / (resolution * n) where the binomial mean stays below tail_mean (and the
/// mirror image near 1), plus bulk_points evenly spaced interior values.
/// The swaps (a, lambda) <-> (b, mu) and (lambda, mu, i) -> (1 - lambda, 1 - mu, a + b - i)
/// leave the objective unchanged, so only a >= b and lambda <= 1/2 are visited.
struct SearchGrid {
  std::int64_t a_max = 200;
  bool geometric_sizes = true;
  int resolution = 4;
  double tail_mean = 4.0;
  int bulk_points = 9;
  double sigma_window = 6.0;
  std::size_t refine_seeds = 5;
  int refine_rounds = 40;
  std::size_t top_k = 10;
};

namespace detail {

inline std::vector<std::int64_t> size_ladder(std::int64_t n_max, bool geometric) {
  std::vector<std::int64_t> sizes;
  for (std::int64_t n = 1; n <= n_max;) {
    sizes.push_back(n);
    if (!geometric || n < 16) {
      ++n;
    } else {
      n = std::max(n + 1, static_cast<std::int64_t>(std::llround(static_cast<double>(n) * 1.25)));
    }
  }
  if (!sizes.empty() && sizes.back() != n_max) sizes.push_back(n_max);
  return sizes;
}

inline std::vector<double> probability_grid(std::int64_t n, const SearchGrid& g, bool lower_half) {
  std::vector<double> values;
  const double step = 1.0 / (static_cast<double>(g.resolution) * static_cast<double>(n));
  const auto fine = static_cast<std::int64_t>(
      std::min<double>(static_cast<double>(g.resolution) * static_cast<double>(n),
                       std::floor(g.tail_mean * g.resolution)));
  for (std::int64_t j = 0; j <= fine; ++j) {
    values.push_back(static_cast<double>(j) * step);
    values.push_back(1.0 - static_cast<double>(j) * step);
  }
  for (int j = 1; j <= g.bulk_points; ++j) {
    values.push_back(static_cast<double>(j) / (g.bulk_points + 1));
  }
  if (lower_half) std::erase_if(values, [](double v) { return v > 0.5; });
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

struct TrimmedPmf {
  std::int64_t lo = 0;
  std::vector<double> values;
};

inline TrimmedPmf trimmed_binomial(std::int64_t n, double p) {
  std::vector<double> full(static_cast<std::size_t>(n + 1));
  double peak = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    full[static_cast<std::size_t>(k)] = binomial_pmf(n, k, p);
    peak = std::max(peak, full[static_cast<std::size_t>(k)]);
  }
  const double floor_value = 1e-20 * peak;
  std::int64_t lo = 0;
  std::int64_t hi = n;
  while (lo < hi && full[static_cast<std::size_t>(lo)] < floor_value) ++lo;
  while (hi > lo && full[static_cast<std::size_t>(hi)] < floor_value) --hi;
  return {lo, std::vector<double>(full.begin() + lo, full.begin() + hi + 1)};
}

// Record ordering: objective descending, then (a, b, lambda, mu, i) ascending.
inline bool record_before(const SearchRecord& x, const SearchRecord& y) {
  if (x.objective != y.objective) return x.objective > y.objective;
  const auto key = [](const SearchRecord& r) {
    const auto& s = std::get<TwoBinomialSpec>(r.spec);
    return std::make_tuple(s.a, s.b, s.lambda, s.mu, r.index);
  };
  return key(x) < key(y);
}

// Best (objective, index) for a fixed spec over the +-sigma_window band
// around the mean, using trimmed supports.
inline std::pair<double, std::int64_t> best_index(const TrimmedPmf& u, const TrimmedPmf& v,
                                                  double mean, double sd, double window) {
  if (sd <= 0.0) return {0.0, 0};
  const std::int64_t total_lo = u.lo + v.lo;
  const auto u_len = static_cast<std::int64_t>(u.values.size());
  const auto v_len = static_cast<std::int64_t>(v.values.size());
  const std::int64_t total_hi = total_lo + u_len + v_len - 2;
  const std::int64_t i_lo = std::max(total_lo, static_cast<std::int64_t>(std::floor(mean - window * sd)));
  const std::int64_t i_hi = std::min(total_hi, static_cast<std::int64_t>(std::ceil(mean + window * sd)));
  double best = -1.0;
  std::int64_t best_i = i_lo;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    const std::int64_t r = i - total_lo;
    const std::int64_t k_lo = std::max<std::int64_t>(0, r - (v_len - 1));
    const std::int64_t k_hi = std::min(r, u_len - 1);
    double s = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      s += u.values[static_cast<std::size_t>(k)] * v.values[static_cast<std::size_t>(r - k)];
    }
    if (s > best) {
      best = s;
      best_i = i;
    }
  }
  return {sd * std::max(best, 0.0), best_i};
}

// Best grid cell for one size pair (a, b).
inline SearchRecord best_cell(std::int64_t a, std::int64_t b, const SearchGrid& g) {
  const auto lambdas = probability_grid(a, g, true);
  const std::vector<double> mus = b > 0 ? probability_grid(b, g, false) : std::vector<double>{0.0};
  std::vector<TrimmedPmf> v_pmfs;
  v_pmfs.reserve(mus.size());
  for (double mu : mus) v_pmfs.push_back(trimmed_binomial(b, mu));

  SearchRecord best{TwoBinomialSpec{a, 0.0, b, 0.0}, 0, -1.0, SearchStrategy::grid};
  for (double lam : lambdas) {
    const TrimmedPmf u = trimmed_binomial(a, lam);
    for (std::size_t m = 0; m < mus.size(); ++m) {
      const TwoBinomialSpec spec{a, lam, b, mus[m]};
      const double mean = static_cast<double>(a) * lam + static_cast<double>(b) * mus[m];
      const auto [obj, i] = best_index(u, v_pmfs[m], mean, std::sqrt(spec.variance()), g.sigma_window);
      const SearchRecord cand{spec, i, obj, SearchStrategy::grid};
      if (record_before(cand, best)) best = cand;
    }
  }
  best.objective = recompute_objective(best);
  return best;
}

inline std::pair<double, std::int64_t> best_nearby_index(const TwoBinomialSpec& s, std::int64_t i) {
  double best = -1.0;
  std::int64_t best_i = i;
  for (std::int64_t j = i - 2; j <= i + 2; ++j) {
    const double v = two_binomial_objective(s, j);
    if (v > best) {
      best = v;
      best_i = j;
    }
  }
  return {best, best_i};
}

// Alternating golden-section line searches in lambda and mu (each within one
// grid step of the current point), re-selecting the index after every move.
inline SearchRecord coordinate_ascent(SearchRecord start, const SearchGrid& g) {
  auto spec = std::get<TwoBinomialSpec>(start.spec);
  std::int64_t index = start.index;
  double value = two_binomial_objective(spec, index);
  const double da = 1.0 / (g.resolution * static_cast<double>(spec.a));
  const double db = spec.b > 0 ? 1.0 / (g.resolution * static_cast<double>(spec.b)) : 0.0;

  for (int round = 0; round < g.refine_rounds; ++round) {
    const double before = value;
    for (int coord = 0; coord < 2; ++coord) {
      if (coord == 1 && spec.b == 0) continue;
      double& param = coord == 0 ? spec.lambda : spec.mu;
      const double delta = coord == 0 ? da : db;
      const double lo = std::max(0.0, param - delta);
      const double hi = std::min(1.0, param + delta);
      auto line = [&](double t) {
        TwoBinomialSpec trial = spec;
        (coord == 0 ? trial.lambda : trial.mu) = t;
        return best_nearby_index(trial, index).first;
      };
      const ScalarMaximum m = golden_section_maximize(line, lo, hi, 1e-12);
      const double old = param;
      param = m.x;
      const auto [v, i] = best_nearby_index(spec, index);
      if (v >= value) {
        value = v;
        index = i;
      } else {
        param = old;
      }
    }
    if (value - before < 1e-15) break;
  }
  return SearchRecord{spec, index, two_binomial_objective(spec, index), SearchStrategy::coordinate_ascent};
}

}  // namespace detail

/// Grid search over the two-binomial family followed by coordinate ascent from
/// the best cells. Returns at most top_k records in record order. Parallel
/// evaluation writes into per-pair slots, so the result matches a sequential run.
inline std::vector<SearchRecord> search_two_binomial(const SearchGrid& grid) {
  const auto sizes = detail::size_ladder(grid.a_max, grid.geometric_sizes);
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t a : sizes) {
    pairs.emplace_back(a, 0);
    for (std::int64_t b : sizes) {
      if (b <= a) pairs.emplace_back(a, b);
    }
  }
  if (pairs.empty()) return {};

  std::vector<SearchRecord> cells(pairs.size());
  detail::parallel_for(pairs.size(), [&](std::size_t j) {
    cells[j] = detail::best_cell(pairs[j].first, pairs[j].second, grid);
  });
  std::sort(cells.begin(), cells.end(), detail::record_before);

  const std::size_t seeds = std::min(grid.refine_seeds, cells.size());
  std::vector<SearchRecord> refined(seeds);
  detail::parallel_for(seeds, [&](std::size_t j) { refined[j] = detail::coordinate_ascent(cells[j], grid); });

  std::vector<SearchRecord> all = std::move(cells);
  all.insert(all.end(), refined.begin(), refined.end());
  std::sort(all.begin(), all.end(), detail::record_before);
  if (all.size() > grid.top_k) all.resize(grid.top_k);
  return all;
}

/// Largest sigma * B^a_k(lambda) over 1 <= a <= a_max and all k, with lambda at
/// its analytic optimum (k + 1/2) / (a + 1).
inline SearchRecord single_binomial_scan(std::int64_t a_max) {
  SearchRecord best{TwoBinomialSpec{}, 0, -1.0, SearchStrategy::grid};
  for (std::int64_t a = 1; a <= a_max; ++a) {
    for (std::int64_t k = 0; k <= a; ++k) {
      const double lam = single_binomial_argmax(a, k);
      const double v = single_binomial_product(a, k, lam) / std::numbers::sqrt2;
      if (v > best.objective) best = SearchRecord{TwoBinomialSpec{a, lam, 0, 0.0}, k, v, SearchStrategy::grid};
    }
  }
  return best;
}

/// Draws `trials` vectors (length uniform in [1, n_max], entries uniform in
/// [0, 1]) from a seeded mt19937_64 and returns the report with the smallest
/// margin; the first such trial wins ties.
inline BoundReport search_random_vectors(std::int64_t n_max, std::int64_t trials, std::uint64_t seed,
                                         double m_ref) {
  if (n_max < 1 || trials < 1) {
    throw std::invalid_argument("search_random_vectors: n_max and trials must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> length(1, n_max);
  std::uniform_real_distribution<double> prob(0.0, 1.0);

  BoundReport worst;
  bool have = false;
  std::vector<double> p;
  for (std::int64_t t = 0; t < trials; ++t) {
    p.resize(static_cast<std::size_t>(length(rng)));
    for (double& x : p) x = prob(rng);
    BoundReport r = check_bound(ParameterVector(p), m_ref);
    if (!have || r.margin < worst.margin) {
      r.input_descriptor = "random trial " + std::to_string(t) + " (seed " + std::to_string(seed) +
                           ", n=" + std::to_string(p.size()) + ")";
      worst = std::move(r);
      have = true;
    }
  }
  return worst;
}

}  // namespace pbound
