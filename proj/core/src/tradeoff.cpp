#include "drt/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drt/error.hpp"

namespace drt {

namespace {

constexpr double kCollinearTolerance = 1e-12;

bool close_rel(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// z-component of (a - o) x (b - o), with the magnitude of its two products.
struct Cross {
  double value;
  double magnitude;
};

Cross cross(double ox, double oy, double ax, double ay, double bx, double by) {
  const double t1 = (ax - ox) * (by - oy);
  const double t2 = (ay - oy) * (bx - ox);
  return {t1 - t2, std::abs(t1) + std::abs(t2)};
}

}  // namespace

DesignGrid::DesignGrid(std::vector<DesignEntry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const DesignEntry& e = entries_[i];
    if (!std::isfinite(e.cost) || e.cost < 0.0)
      throw Error("design '" + e.id + "': cost must be finite and nonnegative");
    if (!std::isfinite(e.perf)) throw Error("design '" + e.id + "': perf must be finite");
    if (!index_.emplace(e.id, i).second) throw Error("duplicate design id '" + e.id + "'");
  }
  if (!entries_.empty()) {
    const auto [lo, hi] = std::minmax_element(
        entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.cost < b.cost; });
    min_cost_ = lo->cost;
    max_cost_ = hi->cost;
    for (const DesignEntry& e : entries_) perf_scale_ = std::max(perf_scale_, std::abs(e.perf));
  }
}

std::optional<std::size_t> DesignGrid::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FrontSample::find(double xi, double rel_tol) const {
  const auto it = std::lower_bound(points.begin(), points.end(), xi,
                                   [](const FrontPoint& p, double x) { return p.xi < x; });
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (auto cand : {it, it == points.begin() ? it : std::prev(it)}) {
    if (cand == points.end()) continue;
    const double dist = std::abs(cand->xi - xi);
    if (close_rel(cand->xi, xi, rel_tol) && (!best || dist < best_dist)) {
      best = static_cast<std::size_t>(cand - points.begin());
      best_dist = dist;
    }
  }
  return best;
}

double FrontSample::perf_scale() const {
  double s = 1.0;
  for (const FrontPoint& p : points) s = std::max(s, std::abs(p.g));
  return s;
}

FrontSample build_front(const DesignGrid& grid, std::optional<double> bin_tol) {
  if (grid.empty()) throw Error("empty design grid");
  const double tol = bin_tol.value_or(1e-9 * grid.max_cost());
  if (!(tol >= 0.0)) throw Error("bin tolerance must be nonnegative");
  const double value_tol = 1e-12 * grid.perf_scale();

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a].cost < grid[b].cost; });

  FrontSample front;
  std::size_t i = 0;
  while (i < order.size()) {
    const double bin_cost = grid[order[i]].cost;
    std::size_t j = i;
    double bin_min = grid[order[i]].perf;
    while (j < order.size() && grid[order[j]].cost - bin_cost <= tol) {
      bin_min = std::min(bin_min, grid[order[j]].perf);
      ++j;
    }

    FrontPoint point{bin_cost, bin_min, {}};
    for (std::size_t k = i; k < j; ++k)
      if (grid[order[k]].perf <= bin_min + value_tol) point.designs.push_back(grid[order[k]].id);

    if (!front.points.empty() && front.points.back().g < bin_min - value_tol) {
      // Running minimum: the cheaper designs stay optimal at this budget.
      point.g = front.points.back().g;
      point.designs = front.points.back().designs;
    } else if (!front.points.empty()) {
      point.g = std::min(bin_min, front.points.back().g);
    }
    front.points.push_back(std::move(point));
    i = j;
  }
  return front;
}

bool collinear(double ax, double ay, double bx, double by, double cx, double cy) {
  const Cross c = cross(ax, ay, bx, by, cx, cy);
  return std::abs(c.value) <= kCollinearTolerance * c.magnitude;
}

std::vector<double> EnvelopeResult::domain() const {
  std::vector<double> xs;
  xs.reserve(contacts.size());
  for (const Contact& c : contacts) xs.push_back(c.xi);
  return xs;
}

double EnvelopeResult::value_at(double xi) const {
  if (xi >= contacts.back().xi || segments.empty()) return contacts.back().g;
  if (xi <= contacts.front().xi) return contacts.front().g;
  const auto it = std::lower_bound(segments.begin(), segments.end(), xi,
                                   [](const EnvelopeSegment& s, double x) { return s.xi_hi < x; });
  return it->value_at(xi);
}

EnvelopeResult lower_convex_envelope(const FrontSample& front) {
  if (front.points.empty()) throw Error("empty front");
  const auto& pts = front.points;

  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    while (hull.size() >= 2) {
      const FrontPoint& o = pts[hull[hull.size() - 2]];
      const FrontPoint& a = pts[hull.back()];
      const Cross c = cross(o.xi, o.g, a.xi, a.g, pts[k].xi, pts[k].g);
      // Clockwise turn: the middle point lies strictly above the chord.
      if (c.value < -kCollinearTolerance * c.magnitude)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }

  EnvelopeResult env;
  env.contacts.reserve(hull.size());
  for (std::size_t idx : hull) env.contacts.push_back({idx, pts[idx].xi, pts[idx].g});
  for (std::size_t k = 0; k + 1 < env.contacts.size(); ++k) {
    const Contact& lo = env.contacts[k];
    const Contact& hi = env.contacts[k + 1];
    const double mu = std::max(0.0, -(hi.g - lo.g) / (hi.xi - lo.xi));
    env.segments.push_back({lo.xi, hi.xi, -lo.g - mu * lo.xi, mu});
  }
  return env;
}

TangentSet tangent_set(const EnvelopeResult& env, double budget) {
  if (env.contacts.empty()) throw Error("empty envelope");
  if (!std::isfinite(budget)) throw Error("infeasible budget");
  const auto& cs = env.contacts;
  if (budget < cs.front().xi && !close_rel(budget, cs.front().xi, kContactTolerance))
    throw Error("infeasible budget");

  TangentSet ts;
  ts.budget = budget;

  // (i) budget coincides with a contact: right-hand subgradient.
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (close_rel(budget, cs[k].xi, kContactTolerance)) {
      ts.xis = {cs[k].xi};
      if (k < env.segments.size()) {
        ts.mu = env.segments[k].mu;
        ts.lambda = env.segments[k].lambda;
      } else {
        ts.mu = 0.0;
        ts.lambda = -cs[k].g;
      }
      return ts;
    }
  }

  // (ii) budget beyond the achievable domain: the cheapest global minimizer.
  if (budget > cs.back().xi) {
    ts.xis = {cs.back().xi};
    ts.mu = 0.0;
    ts.lambda = -cs.back().g;
    return ts;
  }

  // (iii) strictly inside a segment; widen across collinear runs.
  std::size_t lo = 0;
  while (lo + 1 < cs.size() && cs[lo + 1].xi < budget) ++lo;
  std::size_t hi = lo + 1;
  while (lo > 0 && collinear(cs[lo - 1].xi, cs[lo - 1].g, cs[lo].xi, cs[lo].g, cs[hi].xi, cs[hi].g)) --lo;
  while (hi + 1 < cs.size() && collinear(cs[lo].xi, cs[lo].g, cs[hi].xi, cs[hi].g, cs[hi + 1].xi, cs[hi + 1].g))
    ++hi;

  ts.xis = {cs[lo].xi, cs[hi].xi};
  ts.mu = std::max(0.0, -(cs[hi].g - cs[lo].g) / (cs[hi].xi - cs[lo].xi));
  ts.lambda = -cs[lo].g - ts.mu * cs[lo].xi;
  return ts;
}

}  // namespace drt
