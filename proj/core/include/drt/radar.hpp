#pragma once

#include <optional>
#include <vector>

#include "drt/linalg.hpp"
#include "drt/mixture.hpp"
#include "drt/tradeoff.hpp"

namespace drt {

/// Colocated MIMO radar detection problem with a Rayleigh (Swerling-I) point
/// target: Y = A e^{j theta} H_s X + W.
class RadarScenario {
 public:
  /// Throws drt::Error if gram is not Hermitian PSD (1e-12), pfa is outside
  /// (0, 1), or any scalar is out of range.
  RadarScenario(CMatrix gram, double mean_square_amp, int snapshots, double noise_psd, double pfa,
                double power_budget);

  /// Build from the sensing channel H_s; gram = H_s^H H_s.
  static RadarScenario from_sensing_matrix(CMatrix h_s, double mean_square_amp, int snapshots, double noise_psd,
                                           double pfa, double power_budget);

  const CMatrix& gram() const noexcept { return gram_; }
  /// H_s if given, otherwise a square-root factor of the Gram matrix.
  const CMatrix& sensing_matrix() const noexcept { return sensing_; }
  int antennas() const noexcept { return static_cast<int>(gram_.rows()); }
  double mean_square_amp() const noexcept { return mean_square_amp_; }
  int snapshots() const noexcept { return snapshots_; }
  double noise_psd() const noexcept { return noise_psd_; }
  double pfa() const noexcept { return pfa_; }
  double power_budget() const noexcept { return power_budget_; }

  /// Ā² T / N0.
  double snr_gain() const noexcept { return mean_square_amp_ * snapshots_ / noise_psd_; }

  RadarScenario with_power_budget(double p) const;

 private:
  RadarScenario(CMatrix gram, CMatrix sensing, double mean_square_amp, int snapshots, double noise_psd, double pfa,
                double power_budget);

  CMatrix gram_;
  CMatrix sensing_;
  double mean_square_amp_;
  int snapshots_;
  double noise_psd_;
  double pfa_;
  double power_budget_;
};

struct PrincipalEigen {
  double lambda_max = 0.0;
  CMatrix basis;  // M x multiplicity, orthonormal columns
  int multiplicity = 0;
};

/// Largest eigenvalue of the Gram matrix and its eigenspace (eigenvalues
/// within 1e-8 relative of the maximum count toward the multiplicity).
PrincipalEigen principal_eigen(const CMatrix& gram);

/// rho = (Ā² T / N0) Tr(gram R). Throws if R is not PSD.
double snr_of(const RadarScenario& scenario, const CMatrix& r);

/// P_d = pfa^(1 / (1 + rho)).
double pd_closed_form(double rho, double pfa);

/// CFAR threshold -T N0 Tr(gram R) ln(pfa). Throws drt::Error("target
/// unobservable") for zero illumination.
double threshold_for_pfa(const RadarScenario& scenario, const CMatrix& r);

/// Detection probability along the optimal beam: f(P) = pfa^(1/(1 + alpha P)).
class DetectionCurve {
 public:
  DetectionCurve(double alpha, double pfa);
  static DetectionCurve from_scenario(const RadarScenario& scenario);

  double alpha() const noexcept { return alpha_; }
  double pfa() const noexcept { return pfa_; }
  /// -ln(pfa).
  double log_odds() const noexcept { return log_inv_pfa_; }

  double value(double p) const;
  double slope(double p) const;
  double curvature(double p) const;

 private:
  double alpha_;
  double pfa_;
  double log_inv_pfa_;
};

struct InflectionPoint {
  double power = 0.0;
  /// f'' <= 0 on all of P >= 0 (pfa >= e^-2).
  bool globally_concave = false;
  /// (-ln pfa)/(2 alpha) - 1/alpha, from f'' = 0 in closed form.
  double analytic = 0.0;
};

/// Sign change of f'' found by bisection.
InflectionPoint inflection_power(const DetectionCurve& curve);

/// Tangent power P_t solving f'(P) P + f(0) = f(P) on [P_*, inf); 0 for a
/// globally concave curve. Throws drt::Error("tangent bracket failure").
double tangent_power(const DetectionCurve& curve);

struct CurveGeometry {
  DetectionCurve curve;
  InflectionPoint inflection;
  double tangent = 0.0;
};

CurveGeometry analyze_curve(const DetectionCurve& curve);

struct OptimalCovariance {
  double lambda_max = 0.0;
  CMatrix basis;
  int multiplicity = 0;
  double power = 0.0;
  /// Power split over the basis columns; sums to 1.
  std::vector<double> allocation;

  CMatrix covariance() const;
};

/// Trace-P covariance maximizing Tr(gram R). Default allocation puts all
/// power on the first principal eigenvector.
OptimalCovariance optimal_covariance(const PrincipalEigen& eig, double power,
                                     std::optional<std::vector<double>> allocation = std::nullopt);

struct CovarianceAtom {
  double weight = 0.0;
  double trace = 0.0;
  CMatrix covariance;
  double rho = 0.0;
  double pd = 0.0;
};

struct RadarPlan {
  CurveGeometry geometry;
  PrincipalEigen eigen;
  double budget = 0.0;
  std::vector<CovarianceAtom> atoms;
  double expected_pd = 0.0;
  /// f(budget): best pure strategy.
  double deterministic_pd = 0.0;

  std::vector<WeightedCovariance> covariance_mixture() const;
  /// Same plan in the generic resource/design form (design ids "P=<trace>").
  MixedStrategy as_mixed_strategy() const;
  double mean_power() const;
};

/// Sensing-optimal covariance distribution for the scenario's power budget:
/// time-sharing between R = 0 and R = P_t u u^H below P_t, a single
/// full-power R = P u u^H otherwise.
RadarPlan sensing_optimal_distribution(const RadarScenario& scenario,
                                       std::optional<std::vector<double>> allocation = std::nullopt);

/// Discretized pure-strategy grid along the curve: `resolution` uniform
/// powers on [0, p_max] (plus P_t itself when insert_tangent), cost = P,
/// perf = -f(P). Design ids are "P=<power>".
DesignGrid radar_design_grid(const CurveGeometry& geometry, double p_max, std::size_t resolution,
                             bool insert_tangent = false);

std::string power_design_id(double power);

}  // namespace drt
