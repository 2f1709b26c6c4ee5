#include "drt/radar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "drt/error.hpp"

namespace drt {

RadarScenario::RadarScenario(CMatrix gram, double mean_square_amp, int snapshots, double noise_psd, double pfa,
                             double power_budget)
    : RadarScenario(gram, CMatrix(), mean_square_amp, snapshots, noise_psd, pfa, power_budget) {}

RadarScenario::RadarScenario(CMatrix gram, CMatrix sensing, double mean_square_amp, int snapshots, double noise_psd,
                             double pfa, double power_budget)
    : gram_(std::move(gram)),
      sensing_(std::move(sensing)),
      mean_square_amp_(mean_square_amp),
      snapshots_(snapshots),
      noise_psd_(noise_psd),
      pfa_(pfa),
      power_budget_(power_budget) {
  if (gram_.size() == 0 || gram_.rows() != gram_.cols()) throw Error("gram must be a nonempty square matrix");
  if (!is_hermitian(gram_)) throw Error("gram is not Hermitian");
  require_psd(gram_, "gram");
  if (!(mean_square_amp_ >= 0.0) || !std::isfinite(mean_square_amp_))
    throw Error("mean square amplitude must be nonnegative");
  if (snapshots_ < 1) throw Error("snapshots must be positive");
  if (!(noise_psd_ > 0.0) || !std::isfinite(noise_psd_)) throw Error("noise psd must be positive");
  if (!(pfa_ > 0.0 && pfa_ < 1.0)) throw Error("pfa must lie strictly inside (0, 1)");
  if (!(power_budget_ >= 0.0) || !std::isfinite(power_budget_)) throw Error("power budget must be nonnegative");
  gram_ = 0.5 * (gram_ + gram_.adjoint());
  if (sensing_.size() == 0) sensing_ = psd_factor(gram_);
}

RadarScenario RadarScenario::from_sensing_matrix(CMatrix h_s, double mean_square_amp, int snapshots, double noise_psd,
                                                 double pfa, double power_budget) {
  if (h_s.size() == 0 || !h_s.allFinite()) throw Error("sensing matrix must be nonempty and finite");
  CMatrix gram = h_s.adjoint() * h_s;
  return RadarScenario(std::move(gram), std::move(h_s), mean_square_amp, snapshots, noise_psd, pfa, power_budget);
}

RadarScenario RadarScenario::with_power_budget(double p) const {
  return RadarScenario(gram_, sensing_, mean_square_amp_, snapshots_, noise_psd_, pfa_, p);
}

PrincipalEigen principal_eigen(const CMatrix& gram) {
  const HermitianEigen eig = jacobi_eigen(gram);
  PrincipalEigen out;
  out.lambda_max = eig.values(0);
  const double tol = 1e-8 * std::max(std::abs(out.lambda_max), 1e-300);
  out.multiplicity = static_cast<int>((eig.values.array() >= out.lambda_max - tol).count());
  out.basis = eig.vectors.leftCols(out.multiplicity);
  return out;
}

namespace {

void check_dims(const RadarScenario& s, const CMatrix& r) {
  if (r.rows() != s.antennas() || r.cols() != s.antennas())
    throw Error("covariance dimension does not match the number of transmit antennas");
}

double illumination(const RadarScenario& s, const CMatrix& r) {
  return (s.gram() * r).trace().real();
}

}  // namespace

double snr_of(const RadarScenario& scenario, const CMatrix& r) {
  check_dims(scenario, r);
  require_psd(r, "covariance");
  return scenario.snr_gain() * std::max(0.0, illumination(scenario, r));
}

double pd_closed_form(double rho, double pfa) { return std::pow(pfa, 1.0 / (1.0 + rho)); }

double threshold_for_pfa(const RadarScenario& scenario, const CMatrix& r) {
  check_dims(scenario, r);
  require_psd(r, "covariance");
  const double tr = illumination(scenario, r);
  const double floor = 1e-12 * scenario.gram().norm() * std::abs(r.trace().real());
  if (!(tr > floor)) throw Error("target unobservable");
  return -scenario.snapshots() * scenario.noise_psd() * tr * std::log(scenario.pfa());
}

DetectionCurve::DetectionCurve(double alpha, double pfa) : alpha_(alpha), pfa_(pfa), log_inv_pfa_(-std::log(pfa)) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw Error("target unobservable");
  if (!(pfa_ > 0.0 && pfa_ < 1.0)) throw Error("pfa must lie strictly inside (0, 1)");
}

DetectionCurve DetectionCurve::from_scenario(const RadarScenario& scenario) {
  return DetectionCurve(scenario.snr_gain() * principal_eigen(scenario.gram()).lambda_max, scenario.pfa());
}

double DetectionCurve::value(double p) const { return pd_closed_form(alpha_ * p, pfa_); }

double DetectionCurve::slope(double p) const {
  const double s = 1.0 + alpha_ * p;
  return value(p) * log_inv_pfa_ * alpha_ / (s * s);
}

double DetectionCurve::curvature(double p) const {
  const double s = 1.0 + alpha_ * p;
  const double s2 = s * s;
  return alpha_ * alpha_ * value(p) * log_inv_pfa_ * (log_inv_pfa_ - 2.0 * s) / (s2 * s2);
}

InflectionPoint inflection_power(const DetectionCurve& curve) {
  InflectionPoint out;
  out.analytic = curve.log_odds() / (2.0 * curve.alpha()) - 1.0 / curve.alpha();
  if (curve.log_odds() <= 2.0 * (1.0 + 1e-12) || !(curve.curvature(0.0) > 0.0)) {
    out.globally_concave = true;
    out.power = 0.0;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0 / curve.alpha();
  for (int k = 0; k < 2100 && curve.curvature(hi) > 0.0; ++k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 300 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (curve.curvature(mid) > 0.0 ? lo : hi) = mid;
  }
  out.power = 0.5 * (lo + hi);
  return out;
}

double tangent_power(const DetectionCurve& curve) {
  const InflectionPoint infl = inflection_power(curve);
  if (infl.globally_concave) return 0.0;

  const double f0 = curve.value(0.0);
  const auto residual = [&](double p) { return curve.slope(p) * p + f0 - curve.value(p); };

  const double lo = infl.power;
  double hi = 2.0 * infl.power + 1.0 / curve.alpha();
  const double limit = 1e3 * infl.power;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (hi > limit) throw Error("tangent bracket failure");
  }

  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, residual(lo), residual(hi),
                                                        boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double root = std::abs(residual(a)) <= std::abs(residual(b)) ? a : b;
  if (!(std::abs(residual(root)) <= 1e-10)) throw Error("tangent bracket failure");
  return root;
}

CurveGeometry analyze_curve(const DetectionCurve& curve) {
  return CurveGeometry{curve, inflection_power(curve), tangent_power(curve)};
}

CMatrix OptimalCovariance::covariance() const {
  CMatrix r = CMatrix::Zero(basis.rows(), basis.rows());
  for (int k = 0; k < multiplicity; ++k) r += (power * allocation[static_cast<std::size_t>(k)]) * basis.col(k) * basis.col(k).adjoint();
  return r;
}

OptimalCovariance optimal_covariance(const PrincipalEigen& eig, double power, std::optional<std::vector<double>> allocation) {
  if (!(power >= 0.0)) throw Error("power must be nonnegative");
  OptimalCovariance out{eig.lambda_max, eig.basis, eig.multiplicity, power, {}};
  if (allocation) {
    if (allocation->size() != static_cast<std::size_t>(eig.multiplicity))
      throw Error("allocation size must equal the principal eigenvalue multiplicity");
    const double total = std::accumulate(allocation->begin(), allocation->end(), 0.0);
    if (!(total > 0.0) || std::any_of(allocation->begin(), allocation->end(), [](double a) { return a < 0.0; }))
      throw Error("allocation must be nonnegative with positive sum");
    for (double& a : *allocation) a /= total;
    out.allocation = std::move(*allocation);
  } else {
    out.allocation.assign(static_cast<std::size_t>(eig.multiplicity), 0.0);
    out.allocation[0] = 1.0;
  }
  return out;
}

std::vector<WeightedCovariance> RadarPlan::covariance_mixture() const {
  std::vector<WeightedCovariance> out;
  for (const CovarianceAtom& a : atoms) out.push_back({a.weight, a.covariance});
  return out;
}

std::string power_design_id(double power) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "P=%.12g", power);
  return buf;
}

MixedStrategy RadarPlan::as_mixed_strategy() const {
  MixedStrategy mix;
  mix.budget = budget;
  for (const CovarianceAtom& a : atoms) mix.atoms.push_back({a.weight, a.trace, {{power_design_id(a.trace), 1.0}}});
  return mix;
}

double RadarPlan::mean_power() const {
  double s = 0.0;
  for (const CovarianceAtom& a : atoms) s += a.weight * a.trace;
  return s;
}

RadarPlan sensing_optimal_distribution(const RadarScenario& scenario, std::optional<std::vector<double>> allocation) {
  RadarPlan plan{analyze_curve(DetectionCurve::from_scenario(scenario)), principal_eigen(scenario.gram()),
                 scenario.power_budget(), {}, 0.0, 0.0};
  const double budget = plan.budget;
  const double pt = plan.geometry.tangent;

  auto add_atom = [&](double weight, double trace) {
    if (weight <= 0.0) return;
    CovarianceAtom atom;
    atom.weight = weight;
    atom.trace = trace;
    atom.covariance = optimal_covariance(plan.eigen, trace, allocation).covariance();
    atom.rho = snr_of(scenario, atom.covariance);
    atom.pd = pd_closed_form(atom.rho, scenario.pfa());
    plan.atoms.push_back(std::move(atom));
  };

  const bool on_contact = std::abs(budget - pt) <= kContactTolerance * std::max(1.0, pt);
  if (pt == 0.0 || budget >= pt || on_contact) {
    add_atom(1.0, budget);
  } else {
    const double w_hi = budget / pt;
    add_atom(1.0 - w_hi, 0.0);
    add_atom(w_hi, pt);
  }

  for (const CovarianceAtom& a : plan.atoms) plan.expected_pd += a.weight * a.pd;
  plan.deterministic_pd = plan.geometry.curve.value(budget);
  return plan;
}

DesignGrid radar_design_grid(const CurveGeometry& geometry, double p_max, std::size_t resolution, bool insert_tangent) {
  if (resolution == 0) throw Error("resolution must be positive");
  if (!(p_max >= 0.0) || !std::isfinite(p_max)) throw Error("maximum power must be nonnegative");
  std::vector<double> powers;
  powers.reserve(resolution + 1);
  for (std::size_t k = 0; k < resolution; ++k)
    powers.push_back(resolution == 1 ? 0.0 : p_max * static_cast<double>(k) / static_cast<double>(resolution - 1));
  const double pt = geometry.tangent;
  if (insert_tangent && pt > 0.0 && pt <= p_max) {
    const bool present = std::any_of(powers.begin(), powers.end(),
                                     [&](double p) { return power_design_id(p) == power_design_id(pt); });
    if (!present) powers.insert(std::upper_bound(powers.begin(), powers.end(), pt), pt);
  }
  std::vector<DesignEntry> entries;
  entries.reserve(powers.size());
  for (double p : powers) entries.push_back({power_design_id(p), p, -geometry.curve.value(p)});
  return DesignGrid(std::move(entries));
}

}  // namespace drt
