#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace drt {

/// One pure strategy: an opaque identifier with its resource cost c(X) and
/// sensing performance e(X) (smaller is better).
struct DesignEntry {
  std::string id;
  double cost = 0.0;
  double perf = 0.0;
};

/// Finite discretization of the pure-strategy space.
///
/// Construction validates every entry (finite cost >= 0, finite perf, unique
/// ids) and throws drt::Error otherwise. An empty grid is representable;
/// operations that need a point reject it.
class DesignGrid {
 public:
  DesignGrid() = default;
  explicit DesignGrid(std::vector<DesignEntry> entries);

  std::span<const DesignEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const DesignEntry& operator[](std::size_t i) const { return entries_[i]; }

  /// Index of the entry with this id, if any.
  std::optional<std::size_t> find(std::string_view id) const;

  double max_cost() const noexcept { return max_cost_; }
  double min_cost() const noexcept { return min_cost_; }
  /// max(1, max |perf|): the scale used by relative tolerances.
  double perf_scale() const noexcept { return perf_scale_; }

 private:
  std::vector<DesignEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  double max_cost_ = 0.0;
  double min_cost_ = 0.0;
  double perf_scale_ = 1.0;
};

struct FrontPoint {
  double xi = 0.0;
  double g = 0.0;
  /// Designs attaining g at this resource level (never empty).
  std::vector<std::string> designs;
};

/// Sampled Pareto front: xi strictly increasing, g non-increasing.
struct FrontSample {
  std::vector<FrontPoint> points;

  /// Index of the point whose xi matches within relative rel_tol.
  std::optional<std::size_t> find(double xi, double rel_tol = 1e-9) const;
  double perf_scale() const;
};

/// Sample the best performance per resource level.
///
/// Costs within bin_tol of the first cost in a bin are merged; each bin keeps
/// its minimum perf, then a running minimum over increasing xi makes g
/// non-increasing. When the running minimum carries over, the point inherits
/// the designs of the earlier bin. bin_tol defaults to 1e-9 * max cost.
/// Throws drt::Error("empty design grid").
FrontSample build_front(const DesignGrid& grid, std::optional<double> bin_tol = std::nullopt);

struct Contact {
  std::size_t front_index = 0;
  double xi = 0.0;
  double g = 0.0;
};

/// Supporting line -g(xi) = lambda + mu * xi over [xi_lo, xi_hi].
struct EnvelopeSegment {
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  /// Envelope value g at xi on this segment's line.
  double value_at(double xi) const noexcept { return -(lambda + mu * xi); }
};

struct EnvelopeResult {
  std::vector<Contact> contacts;
  std::vector<EnvelopeSegment> segments;

  /// The scalarization-achievable resource levels (contact xi values).
  std::vector<double> domain() const;
  double min_xi() const { return contacts.front().xi; }
  double max_xi() const { return contacts.back().xi; }

  /// Lower-envelope value at xi in [min_xi, max_xi]; the last contact's g
  /// beyond max_xi.
  double value_at(double xi) const;
};

/// Lower convex envelope by a monotone-chain sweep. Points collinear with
/// their neighbours (cross product within 1e-12 relative) stay as contacts.
EnvelopeResult lower_convex_envelope(const FrontSample& front);

/// The one or two contact resources supporting the optimal mixture at a
/// budget, with the multipliers of their supporting line.
struct TangentSet {
  std::vector<double> xis;
  double lambda = 0.0;
  double mu = 0.0;
  double budget = 0.0;
};

/// Relative tolerance for treating a budget as coinciding with a contact.
inline constexpr double kContactTolerance = 1e-9;

/// Throws drt::Error("infeasible budget") if budget is below the smallest
/// contact resource.
TangentSet tangent_set(const EnvelopeResult& env, double budget);

/// True if b lies on the chord a-c within the collinearity tolerance used by
/// the envelope sweep.
bool collinear(double ax, double ay, double bx, double by, double cx, double cy);

}  // namespace drt
