#pragma once

#include <functional>
#include <string>
#include <vector>

#include "drt/tradeoff.hpp"

namespace drt {

struct DesignWeight {
  std::string id;
  double conditional_weight = 0.0;
};

struct MixtureAtom {
  double weight = 0.0;
  double xi = 0.0;
  std::vector<DesignWeight> designs;
};

/// A randomized strategy: a distribution over resource levels, each with a
/// conditional distribution over the designs optimal at that level.
struct MixedStrategy {
  std::vector<MixtureAtom> atoms;
  double budget = 0.0;

  double total_weight() const;
  double mean_resource() const;
};

/// Picks p(X | c(X) = xi) over the designs optimal at a front point.
using ConditionalRule = std::function<std::vector<DesignWeight>(const FrontPoint&)>;

/// Uniform over the point's representative designs.
std::vector<DesignWeight> uniform_conditional(const FrontPoint& point);

/// Sensing-optimal mixture at a budget.
///
/// One atom when the budget hits a contact or exceeds the achievable domain;
/// otherwise two atoms at the bracketing contacts xi1 < xi2 with weights
/// (xi2 - C)/(xi2 - xi1) and (C - xi1)/(xi2 - xi1), so the mean resource is C.
/// Throws drt::Error on an infeasible budget or when the envelope does not
/// belong to the front.
MixedStrategy build_mixture(const EnvelopeResult& env, const FrontSample& front, double budget,
                            const ConditionalRule& rule = uniform_conditional);

/// Sum of weight * g(xi). Throws drt::Error if an atom's xi is not a front
/// point.
double expected_performance(const MixedStrategy& mix, const FrontSample& front);

struct DesignSlack {
  std::string id;
  double nu = 0.0;
};

struct KktViolation {
  /// One of: normalization, negative_weight, unknown_design, mean_constraint,
  /// support_not_collinear, dual_sign, dominance, off_envelope,
  /// complementary_slackness, no_dual.
  std::string kind;
  std::string design_id;
  double margin = 0.0;
};

/// Dual certificate (lambda1, lambda2, nu) for the discretized program
/// min E[e] s.t. E[c] <= C over distributions on the grid.
struct KktCertificate {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<DesignSlack> slacks;
  std::vector<std::string> support_ids;
  double budget_slack = 0.0;
  double scale = 1.0;
  std::vector<KktViolation> violations;

  bool valid() const noexcept { return violations.empty(); }
};

/// Certify a mixture against the grid. Never throws for a bad mixture; every
/// failed condition is listed in violations with the offending design.
KktCertificate verify_kkt(const DesignGrid& grid, const MixedStrategy& mix, double budget);

}  // namespace drt
