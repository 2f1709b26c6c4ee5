#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "drt/linalg.hpp"
#include "drt/radar.hpp"

namespace drt {

enum class Hypothesis { null, target };

struct SimConfig {
  RadarScenario scenario;
  CMatrix covariance;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  double power_cap = std::numeric_limits<double>::infinity();

  /// Throws drt::Error unless trials >= 1, R is PSD with Tr R <= power_cap and
  /// T >= rank(R).
  void validate() const;
};

/// Waveform X (M x T) whose sample covariance X X^H / T equals R:
/// X = sqrt(T) V Lambda^(1/2) Q^H with Q a seeded T x r matrix with
/// orthonormal columns. Throws drt::Error if T < rank(R).
CMatrix synthesize_waveform(const CMatrix& r, int snapshots, std::uint64_t seed);

/// Simulator of the detector statistic Z = |sum_i y(i)^H H_s x(i)|^2 for one
/// configuration. The waveform is synthesized once from the master seed; each
/// trial draws target amplitude/phase and noise from its own stream.
class DetectorSimulator {
 public:
  explicit DetectorSimulator(const SimConfig& config);

  double run_statistic(Hypothesis hypothesis, std::uint64_t trial_seed) const;

  const CMatrix& waveform() const noexcept { return waveform_; }
  /// ||H_s X||_F^2 = T Tr(H_s R H_s^H).
  double signal_energy() const noexcept { return energy_; }
  double mean_null() const noexcept;
  double mean_target() const noexcept;

 private:
  RadarScenario scenario_;
  CMatrix waveform_;
  CMatrix illuminated_;  // H_s X
  double energy_ = 0.0;
};

/// One-shot statistic draw for a configuration.
double run_statistic(const SimConfig& config, Hypothesis hypothesis, std::uint64_t seed);

struct McReport {
  std::string kind;  // "pfa", "pd" or "mixture_pd"
  std::size_t trials = 0;
  std::size_t hits = 0;
  double empirical_prob = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_half_width = 0.0;
  double target_prob = 0.0;
  double z_mean = 0.0;
  double z_mean_target = 0.0;
  double z_std_error = 0.0;
  std::uint64_t seed = 0;

  /// |empirical - target| <= k binomial standard deviations of the target.
  bool within_sigma(double k) const;
  bool z_mean_within(double k) const;
};

/// 95% interval: normal approximation, Wilson score when hits < 30.
void binomial_interval(std::size_t hits, std::size_t trials, double& low, double& high);

/// Empirical P_FA: H0 trials against the CFAR threshold.
McReport estimate_pfa(const SimConfig& config);
/// Empirical P_d: H1 trials against the same threshold.
McReport estimate_pd(const SimConfig& config);

/// Empirical E[P_d] of a randomized strategy: each trial draws an atom by
/// weight, then a target-present statistic. Zero-illumination atoms decide
/// "target" with probability P_FA.
McReport estimate_mixture_pd(const RadarScenario& scenario, std::span<const CovarianceAtom> atoms,
                             std::size_t trials, std::uint64_t seed);

/// Raw statistic draws, trial k using stream derive_seed(master_seed, k).
std::vector<double> sample_statistic(const SimConfig& config, Hypothesis hypothesis, std::size_t n);

/// Kolmogorov-Smirnov distance between samples / mean and Exp(1).
double ks_distance_exponential(std::vector<double> samples, double mean);

/// Asymptotic Kolmogorov critical value at level 0.01 (1.6276 / sqrt(n)).
double ks_critical_value_1pct(std::size_t n);

}  // namespace drt
