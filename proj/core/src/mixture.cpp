#include "drt/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "drt/error.hpp"

namespace drt {

double MixedStrategy::total_weight() const {
  double s = 0.0;
  for (const MixtureAtom& a : atoms) s += a.weight;
  return s;
}

double MixedStrategy::mean_resource() const {
  double s = 0.0;
  for (const MixtureAtom& a : atoms) s += a.weight * a.xi;
  return s;
}

std::vector<DesignWeight> uniform_conditional(const FrontPoint& point) {
  std::vector<DesignWeight> out;
  const double w = 1.0 / static_cast<double>(point.designs.size());
  for (const std::string& id : point.designs) out.push_back({id, w});
  return out;
}

namespace {

const FrontPoint& contact_point(const FrontSample& front, const EnvelopeResult& env, double xi) {
  for (const Contact& c : env.contacts) {
    if (c.xi != xi) continue;
    if (c.front_index >= front.points.size() || front.points[c.front_index].xi != c.xi ||
        front.points[c.front_index].g != c.g)
      throw Error("envelope is inconsistent with front");
    return front.points[c.front_index];
  }
  throw Error("envelope is inconsistent with front");
}

}  // namespace

MixedStrategy build_mixture(const EnvelopeResult& env, const FrontSample& front, double budget,
                            const ConditionalRule& rule) {
  const TangentSet ts = tangent_set(env, budget);
  MixedStrategy mix;
  mix.budget = budget;

  if (ts.xis.size() == 1) {
    const FrontPoint& p = contact_point(front, env, ts.xis[0]);
    mix.atoms.push_back({1.0, p.xi, rule(p)});
    return mix;
  }

  const double xi1 = ts.xis[0];
  const double xi2 = ts.xis[1];
  const double p2 = (budget - xi1) / (xi2 - xi1);
  const double p1 = 1.0 - p2;
  const FrontPoint& lo = contact_point(front, env, xi1);
  const FrontPoint& hi = contact_point(front, env, xi2);
  mix.atoms.push_back({p1, xi1, rule(lo)});
  mix.atoms.push_back({p2, xi2, rule(hi)});
  return mix;
}

double expected_performance(const MixedStrategy& mix, const FrontSample& front) {
  double value = 0.0;
  for (const MixtureAtom& a : mix.atoms) {
    const auto idx = front.find(a.xi, kContactTolerance);
    if (!idx) throw Error("atom resource is not on the front");
    value += a.weight * front.points[*idx].g;
  }
  return value;
}

namespace {

// Lower convex hull of the raw grid in (cost, perf); used to name support
// designs that sit above the envelope when the certificate fails.
std::vector<std::pair<double, double>> grid_hull(const DesignGrid& grid) {
  std::map<double, double> best;
  for (const DesignEntry& e : grid.entries()) {
    auto [it, inserted] = best.emplace(e.cost, e.perf);
    if (!inserted) it->second = std::min(it->second, e.perf);
  }
  std::vector<std::pair<double, double>> hull;
  for (const auto& pt : best) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const double cr = (a.first - o.first) * (pt.second - o.second) - (a.second - o.second) * (pt.first - o.first);
      if (cr <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  return hull;
}

double hull_value(const std::vector<std::pair<double, double>>& hull, double x) {
  if (x <= hull.front().first) return hull.front().second;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    if (x <= hull[k + 1].first) {
      const auto& [x0, y0] = hull[k];
      const auto& [x1, y1] = hull[k + 1];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return hull.back().second;
}

struct SupportPoint {
  std::string id;
  double cost;
  double perf;
  double weight;
};

}  // namespace

KktCertificate verify_kkt(const DesignGrid& grid, const MixedStrategy& mix, double budget) {
  KktCertificate cert;
  if (grid.empty()) {
    cert.violations.push_back({"no_dual", "", 0.0});
    return cert;
  }
  const double cost_scale = std::max({1.0, grid.max_cost(), std::abs(budget)});
  const double eps = 1e-9;

  // Primal feasibility and per-design weights.
  std::map<std::string, SupportPoint> support;
  double total = 0.0;
  double mean_cost = 0.0;
  for (const MixtureAtom& atom : mix.atoms) {
    if (atom.weight < -eps) cert.violations.push_back({"negative_weight", atom.designs.empty() ? "" : atom.designs.front().id, atom.weight});
    double cond_total = 0.0;
    for (const DesignWeight& dw : atom.designs) {
      cond_total += dw.conditional_weight;
      const auto idx = grid.find(dw.id);
      if (!idx) {
        cert.violations.push_back({"unknown_design", dw.id, 0.0});
        continue;
      }
      const DesignEntry& e = grid[*idx];
      const double w = atom.weight * dw.conditional_weight;
      total += w;
      mean_cost += w * e.cost;
      if (w > 0.0) {
        auto [it, inserted] = support.emplace(e.id, SupportPoint{e.id, e.cost, e.perf, 0.0});
        it->second.weight += w;
      }
    }
    if (std::abs(cond_total - 1.0) > eps) cert.violations.push_back({"normalization", "", cond_total - 1.0});
  }
  if (std::abs(total - 1.0) > eps) cert.violations.push_back({"normalization", "", total - 1.0});
  cert.budget_slack = budget - mean_cost;
  if (cert.budget_slack < -eps * cost_scale) cert.violations.push_back({"mean_constraint", "", cert.budget_slack});
  if (support.empty()) {
    cert.violations.push_back({"no_dual", "", 0.0});
    return cert;
  }

  std::vector<SupportPoint> pts;
  for (auto& [id, sp] : support) {
    cert.support_ids.push_back(id);
    pts.push_back(sp);
  }
  const auto [lo_it, hi_it] = std::minmax_element(
      pts.begin(), pts.end(), [](const SupportPoint& a, const SupportPoint& b) { return a.cost < b.cost; });
  const SupportPoint lo = *lo_it;
  const SupportPoint hi = *hi_it;
  const bool budget_active = std::abs(cert.budget_slack) <= eps * cost_scale;

  if (hi.cost - lo.cost > eps * cost_scale) {
    // Dual line through the extreme support points: nu = e + l1 + l2 c = 0.
    cert.lambda2 = -(hi.perf - lo.perf) / (hi.cost - lo.cost);
    cert.lambda1 = -lo.perf - cert.lambda2 * lo.cost;
  } else {
    // Single resource level: lambda2 ranges over an interval fixed by the
    // grid. Take the smallest admissible value; it must be 0 if the budget
    // is slack.
    double l2_lo = 0.0;
    double l2_hi = std::numeric_limits<double>::infinity();
    for (const DesignEntry& e : grid.entries()) {
      const double dc = e.cost - lo.cost;
      const double de = e.perf - lo.perf;
      if (dc > eps * cost_scale)
        l2_lo = std::max(l2_lo, -de / dc);
      else if (dc < -eps * cost_scale)
        l2_hi = std::min(l2_hi, de / -dc);
    }
    cert.lambda2 = budget_active ? l2_lo : 0.0;
    cert.lambda1 = -lo.perf - cert.lambda2 * lo.cost;
  }

  cert.scale = std::max({grid.perf_scale(), std::abs(cert.lambda1), std::abs(cert.lambda2) * cost_scale});
  const double tol = eps * cert.scale;

  if (cert.lambda2 < -tol) cert.violations.push_back({"dual_sign", "", cert.lambda2});

  for (const SupportPoint& sp : pts) {
    const double nu = sp.perf + cert.lambda1 + cert.lambda2 * sp.cost;
    if (std::abs(nu) > tol) cert.violations.push_back({"support_not_collinear", sp.id, nu});
  }

  bool dominance_ok = true;
  cert.slacks.reserve(grid.size());
  for (const DesignEntry& e : grid.entries()) {
    const double nu = e.perf + cert.lambda1 + cert.lambda2 * e.cost;
    cert.slacks.push_back({e.id, nu});
    if (nu < -tol) {
      cert.violations.push_back({"dominance", e.id, nu});
      dominance_ok = false;
    }
  }

  if (cert.lambda2 > tol && cert.budget_slack > eps * cost_scale)
    cert.violations.push_back({"complementary_slackness", "", cert.lambda2 * cert.budget_slack});

  if (!dominance_ok || !cert.violations.empty()) {
    const auto hull = grid_hull(grid);
    for (const SupportPoint& sp : pts) {
      const double gap = sp.perf - hull_value(hull, sp.cost);
      if (gap > tol) cert.violations.push_back({"off_envelope", sp.id, gap});
    }
  }
  return cert;
}

}  // namespace drt
