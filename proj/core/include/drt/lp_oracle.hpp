#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "drt/tradeoff.hpp"

namespace drt {

/// Largest grid the O(n^2) pair enumeration accepts.
inline constexpr std::size_t kMaxOracleGridSize = 10000;

struct LpAtom {
  std::size_t index = 0;
  double weight = 0.0;
};

struct LpSolution {
  double value = 0.0;
  std::vector<LpAtom> atoms;  // at most two
  bool active = false;        // cost constraint binds
};

/// Brute-force solution of min sum_i p_i e_i s.t. sum_i p_i c_i <= C over the
/// probability simplex on the grid.
///
/// An LP with one inequality on the simplex has a basic optimum with at most
/// two support points, so enumerating every feasible single entry and every
/// pair straddling C (with the unique weights giving mean cost C) is exact.
/// Throws drt::Error("infeasible budget") when no entry costs <= C, and when
/// the grid exceeds kMaxOracleGridSize.
LpSolution solve_lp(const DesignGrid& grid, double budget);

enum class FuzzShape {
  mixed,      // random convex/concave runs, dominated extras, occasional collinear runs
  collinear,  // fronts made of long exactly-collinear runs
};

struct FuzzRecord {
  std::size_t case_id = 0;
  std::size_t grid_size = 0;
  double budget = 0.0;
  double oracle_value = 0.0;
  double mixture_value = 0.0;
  double delta = 0.0;
  bool value_ok = false;
  bool support_ok = false;
  bool kkt_ok = false;

  bool pass() const noexcept { return value_ok && support_ok && kkt_ok; }
};

struct FuzzReport {
  std::uint64_t seed = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::vector<FuzzRecord> records;
  std::optional<FuzzRecord> first_failure;
};

/// Random grid of `size` entries: a non-increasing staircase plus, for the
/// mixed shape, a third of dominated entries above it. Case generation for the
/// fuzz harness; exposed for tests and benchmarks.
DesignGrid random_design_grid(std::uint64_t seed, std::size_t size, FuzzShape shape = FuzzShape::mixed);

/// Compare solve_lp against build_mixture + expected_performance on random
/// grids (sizes 1..max_grid_size) and budgets. Each case also checks that the
/// oracle support sits on the envelope and that verify_kkt accepts the
/// mixture. Failures are reported, never thrown.
FuzzReport random_front_fuzz(std::uint64_t seed, std::size_t n_cases, std::size_t max_grid_size,
                             FuzzShape shape = FuzzShape::mixed);

}  // namespace drt
