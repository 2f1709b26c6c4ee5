#include "drt/lp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "drt/error.hpp"
#include "drt/mixture.hpp"
#include "drt/random.hpp"

namespace drt {

LpSolution solve_lp(const DesignGrid& grid, double budget) {
  if (grid.size() > kMaxOracleGridSize) throw Error("grid too large for the LP oracle");
  const auto entries = grid.entries();

  std::optional<LpSolution> best;
  auto offer = [&](LpSolution cand) {
    if (!best || cand.value < best->value) best = std::move(cand);
  };

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].cost <= budget) offer({entries[i].perf, {{i, 1.0}}, entries[i].cost == budget});
  }
  if (!best) throw Error("infeasible budget");

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i].cost < budget)) continue;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (!(entries[j].cost > budget)) continue;
      const double wj = (budget - entries[i].cost) / (entries[j].cost - entries[i].cost);
      const double wi = 1.0 - wj;
      offer({wi * entries[i].perf + wj * entries[j].perf, {{i, wi}, {j, wj}}, true});
    }
  }
  return *best;
}

DesignGrid random_design_grid(std::uint64_t seed, std::size_t size, FuzzShape shape) {
  SplitMix64 rng(seed);
  std::vector<DesignEntry> entries;
  entries.reserve(size);
  // A third of the entries are dominated extras in the mixed shape.
  const std::size_t extras = shape == FuzzShape::mixed ? size / 3 : 0;
  const std::size_t staircase = size - extras;

  double cost = rng.uniform() < 0.3 ? 0.0 : rng.uniform() * 2.0;
  double perf = rng.uniform() * 10.0 - 5.0;
  double run_slope = 0.0;
  std::size_t run_left = 0;
  for (std::size_t k = 0; k < staircase; ++k) {
    entries.push_back({"d" + std::to_string(k), cost, perf});
    const double step = 0.01 + rng.uniform();
    if (run_left == 0 && (shape == FuzzShape::collinear || rng.uniform() < 0.15)) {
      run_left = 2 + static_cast<std::size_t>(rng.uniform() * 6.0);
      run_slope = rng.uniform() * 2.0;
    }
    cost += step;
    if (run_left > 0) {
      --run_left;
      perf -= run_slope * step;
    } else {
      // Heavy-tailed drops give alternating convex and concave stretches.
      const double u = rng.uniform();
      perf -= (u < 0.5 ? 0.0 : std::pow(u, 6.0) * 3.0) + rng.uniform() * 0.2;
    }
  }
  for (std::size_t k = 0; k < extras; ++k) {
    const DesignEntry& base = entries[static_cast<std::size_t>(rng.uniform() * static_cast<double>(staircase))];
    entries.push_back({"x" + std::to_string(k), base.cost + rng.uniform() * 0.5, base.perf + 0.05 + rng.uniform()});
  }
  return DesignGrid(std::move(entries));
}

namespace {

bool on_envelope(const EnvelopeResult& env, const DesignEntry& e, double tol) {
  for (const Contact& c : env.contacts)
    if (std::abs(c.xi - e.cost) <= kContactTolerance * std::max(1.0, c.xi) && std::abs(c.g - e.perf) <= tol)
      return true;
  // Value-level fallback for points collinear with a segment.
  return e.cost >= env.min_xi() && std::abs(env.value_at(e.cost) - e.perf) <= tol;
}

FuzzRecord run_case(std::uint64_t seed, std::size_t case_id, std::size_t max_grid_size, FuzzShape shape) {
  SplitMix64 rng(derive_seed(seed, case_id));
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_grid_size));
  const DesignGrid grid = random_design_grid(rng(), std::min(n, max_grid_size), shape);

  FuzzRecord rec;
  rec.case_id = case_id;
  rec.grid_size = grid.size();
  const double lo = grid.min_cost();
  const double hi = grid.max_cost();
  const double u = rng.uniform();
  // Mostly interior budgets; a few on a grid cost and a few past the end.
  if (u < 0.1)
    rec.budget = grid[static_cast<std::size_t>(rng.uniform() * static_cast<double>(grid.size()))].cost;
  else if (u < 0.2)
    rec.budget = hi + rng.uniform() * (1.0 + hi - lo);
  else
    rec.budget = lo + rng.uniform() * (hi - lo);

  try {
    const LpSolution oracle = solve_lp(grid, rec.budget);
    const FrontSample front = build_front(grid);
    const EnvelopeResult env = lower_convex_envelope(front);
    const MixedStrategy mix = build_mixture(env, front, rec.budget);
    rec.oracle_value = oracle.value;
    rec.mixture_value = expected_performance(mix, front);
    rec.delta = rec.mixture_value - rec.oracle_value;
    rec.value_ok = std::abs(rec.delta) <= 1e-9 * std::max(1.0, std::abs(rec.oracle_value));

    const double tol = 1e-9 * grid.perf_scale();
    rec.support_ok = std::all_of(oracle.atoms.begin(), oracle.atoms.end(),
                                 [&](const LpAtom& a) { return a.weight == 0.0 || on_envelope(env, grid[a.index], tol); });
    rec.kkt_ok = verify_kkt(grid, mix, rec.budget).valid();
  } catch (const Error&) {
    rec.value_ok = rec.support_ok = rec.kkt_ok = false;
  }
  return rec;
}

}  // namespace

FuzzReport random_front_fuzz(std::uint64_t seed, std::size_t n_cases, std::size_t max_grid_size, FuzzShape shape) {
  FuzzReport report;
  report.seed = seed;
  if (max_grid_size == 0) max_grid_size = 1;
  report.records.reserve(n_cases);
  for (std::size_t k = 0; k < n_cases; ++k) {
    FuzzRecord rec = run_case(seed, k, max_grid_size, shape);
    if (rec.pass()) {
      ++report.passes;
    } else {
      ++report.failures;
      if (!report.first_failure) report.first_failure = rec;
    }
    report.records.push_back(rec);
  }
  return report;
}

}  // namespace drt
