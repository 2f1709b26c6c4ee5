#include "drt/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "drt/error.hpp"
#include "drt/random.hpp"

namespace drt {

namespace {

constexpr std::size_t kBatch = 4096;

cdouble complex_normal(SplitMix64& rng, std::normal_distribution<double>& nd, double variance) {
  const double sd = std::sqrt(0.5 * variance);
  const double re = nd(rng);
  const double im = nd(rng);
  return {sd * re, sd * im};
}

struct BatchSum {
  std::size_t hits = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Runs trial_fn(k) for k in [0, trials) in fixed-size batches across worker
// threads; partial sums are combined in batch order so the result does not
// depend on the thread count.
template <class TrialFn>
BatchSum run_trials(std::size_t trials, TrialFn trial_fn) {
  const std::size_t n_batches = (trials + kBatch - 1) / kBatch;
  std::vector<BatchSum> partial(n_batches);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n_batches));

  auto work = [&](std::size_t first) {
    for (std::size_t b = first; b < n_batches; b += workers) {
      BatchSum s;
      const std::size_t end = std::min(trials, (b + 1) * kBatch);
      for (std::size_t k = b * kBatch; k < end; ++k) {
        const auto [hit, z] = trial_fn(k);
        s.hits += hit ? 1 : 0;
        s.sum += z;
        s.sum_sq += z * z;
      }
      partial[b] = s;
    }
  };
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 1; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work, w));
  work(0);
  for (auto& j : jobs) j.get();

  BatchSum total;
  for (const BatchSum& s : partial) {
    total.hits += s.hits;
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
  }
  return total;
}

McReport make_report(std::string kind, const BatchSum& sum, std::size_t trials, double target, double z_target,
                     std::uint64_t seed) {
  McReport rep;
  rep.kind = std::move(kind);
  rep.trials = trials;
  rep.hits = sum.hits;
  rep.empirical_prob = static_cast<double>(sum.hits) / static_cast<double>(trials);
  binomial_interval(sum.hits, trials, rep.ci_low, rep.ci_high);
  rep.ci_half_width = 0.5 * (rep.ci_high - rep.ci_low);
  rep.target_prob = target;
  const double n = static_cast<double>(trials);
  rep.z_mean = sum.sum / n;
  rep.z_mean_target = z_target;
  const double var = trials > 1 ? std::max(0.0, (sum.sum_sq - n * rep.z_mean * rep.z_mean) / (n - 1.0)) : 0.0;
  rep.z_std_error = std::sqrt(var / n);
  rep.seed = seed;
  return rep;
}

}  // namespace

void SimConfig::validate() const {
  if (trials < 1) throw Error("trials must be at least 1");
  if (covariance.rows() != scenario.antennas() || covariance.cols() != scenario.antennas())
    throw Error("covariance dimension does not match the number of transmit antennas");
  require_psd(covariance, "covariance");
  if (covariance.trace().real() > power_cap * (1.0 + 1e-12)) throw Error("covariance trace exceeds the power cap");
  if (scenario.snapshots() < psd_rank(covariance)) throw Error("snapshots must be at least rank(R)");
}

CMatrix synthesize_waveform(const CMatrix& r, int snapshots, std::uint64_t seed) {
  require_psd(r, "covariance");
  const Eigen::Index m = r.rows();
  const int rank = psd_rank(r);
  if (snapshots < rank) throw Error("snapshots must be at least rank(R)");
  if (rank == 0) return CMatrix::Zero(m, snapshots);

  const HermitianEigen eig = jacobi_eigen(r);
  SplitMix64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix q(snapshots, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < snapshots; ++i) q(i, j) = complex_normal(rng, nd, 1.0);
  // Orthonormal columns; Householder QR of a complex Gaussian matrix gives a
  // Haar-distributed frame up to column phases.
  const CMatrix frame = Eigen::HouseholderQR<CMatrix>(q).householderQ() * CMatrix::Identity(snapshots, rank);

  const RVector root = eig.values.head(rank).cwiseMax(0.0).cwiseSqrt();
  return std::sqrt(static_cast<double>(snapshots)) * eig.vectors.leftCols(rank) * root.asDiagonal() * frame.adjoint();
}

DetectorSimulator::DetectorSimulator(const SimConfig& config) : scenario_(config.scenario) {
  config.validate();
  waveform_ = synthesize_waveform(config.covariance, scenario_.snapshots(), derive_seed(config.master_seed, ~0ULL));
  illuminated_ = scenario_.sensing_matrix() * waveform_;
  energy_ = illuminated_.squaredNorm();
}

double DetectorSimulator::mean_null() const noexcept { return scenario_.noise_psd() * energy_; }

double DetectorSimulator::mean_target() const noexcept {
  return scenario_.mean_square_amp() * energy_ * energy_ + scenario_.noise_psd() * energy_;
}

double DetectorSimulator::run_statistic(Hypothesis hypothesis, std::uint64_t trial_seed) const {
  SplitMix64 rng(trial_seed);
  std::normal_distribution<double> nd;
  cdouble gain = 0.0;
  if (hypothesis == Hypothesis::target) {
    // Separate stream: both hypotheses see the same noise for a given seed.
    SplitMix64 target_rng(derive_seed(trial_seed, 1));
    // Rayleigh amplitude with E[A^2] = Ā², uniform phase on (-pi, pi).
    const double amp = std::sqrt(-scenario_.mean_square_amp() * std::log1p(-target_rng.uniform()));
    const double theta = std::numbers::pi * (2.0 * target_rng.uniform() - 1.0);
    gain = std::polar(amp, theta);
  }
  cdouble acc = 0.0;
  for (Eigen::Index i = 0; i < illuminated_.cols(); ++i) {
    for (Eigen::Index r = 0; r < illuminated_.rows(); ++r) {
      const cdouble s = illuminated_(r, i);
      const cdouble y = gain * s + complex_normal(rng, nd, scenario_.noise_psd());
      acc += std::conj(y) * s;
    }
  }
  return std::norm(acc);
}

double run_statistic(const SimConfig& config, Hypothesis hypothesis, std::uint64_t seed) {
  return DetectorSimulator(config).run_statistic(hypothesis, seed);
}

bool McReport::within_sigma(double k) const {
  const double sigma = std::sqrt(target_prob * (1.0 - target_prob) / static_cast<double>(trials));
  return std::abs(empirical_prob - target_prob) <= k * sigma;
}

bool McReport::z_mean_within(double k) const { return std::abs(z_mean - z_mean_target) <= k * z_std_error; }

void binomial_interval(std::size_t hits, std::size_t trials, double& low, double& high) {
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  if (hits < 30) {
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    low = hits == 0 ? 0.0 : std::max(0.0, center - half);
    high = std::min(1.0, center + half);
  } else {
    const double half = z * std::sqrt(p * (1.0 - p) / n);
    low = std::max(0.0, p - half);
    high = std::min(1.0, p + half);
  }
}

namespace {

McReport estimate(const SimConfig& config, Hypothesis hypothesis) {
  const DetectorSimulator sim(config);
  const double threshold = threshold_for_pfa(config.scenario, config.covariance);
  const BatchSum sum = run_trials(config.trials, [&](std::size_t k) {
    const double z = sim.run_statistic(hypothesis, derive_seed(config.master_seed, k));
    return std::pair{z > threshold, z};
  });
  if (hypothesis == Hypothesis::null)
    return make_report("pfa", sum, config.trials, config.scenario.pfa(), sim.mean_null(), config.master_seed);
  const double rho = snr_of(config.scenario, config.covariance);
  return make_report("pd", sum, config.trials, pd_closed_form(rho, config.scenario.pfa()), sim.mean_target(),
                     config.master_seed);
}

}  // namespace

McReport estimate_pfa(const SimConfig& config) { return estimate(config, Hypothesis::null); }

McReport estimate_pd(const SimConfig& config) { return estimate(config, Hypothesis::target); }

McReport estimate_mixture_pd(const RadarScenario& scenario, std::span<const CovarianceAtom> atoms, std::size_t trials,
                             std::uint64_t seed) {
  if (trials < 1) throw Error("trials must be at least 1");
  if (atoms.empty()) throw Error("mixture has no atoms");

  struct Branch {
    double cumulative;
    std::optional<DetectorSimulator> sim;
    double threshold = 0.0;
  };
  std::vector<Branch> branches;
  double cumulative = 0.0;
  double target = 0.0;
  double z_target = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    cumulative += atoms[a].weight;
    Branch br{cumulative, std::nullopt, 0.0};
    const bool dark = (scenario.gram() * atoms[a].covariance).trace().real() <=
                      1e-12 * scenario.gram().norm() * std::abs(atoms[a].covariance.trace().real());
    if (!dark) {
      SimConfig cfg{scenario, atoms[a].covariance, trials, derive_seed(seed, 0x5eed0000ULL + a)};
      br.sim.emplace(cfg);
      br.threshold = threshold_for_pfa(scenario, atoms[a].covariance);
      z_target += atoms[a].weight * br.sim->mean_target();
    }
    target += atoms[a].weight * pd_closed_form(snr_of(scenario, atoms[a].covariance), scenario.pfa());
    branches.push_back(std::move(br));
  }

  const BatchSum sum = run_trials(trials, [&](std::size_t k) {
    const std::uint64_t trial_seed = derive_seed(seed, k);
    SplitMix64 pick(mix64(trial_seed ^ 0xa5a5a5a5a5a5a5a5ULL));
    const double u = pick.uniform() * cumulative;
    std::size_t idx = 0;
    while (idx + 1 < branches.size() && u >= branches[idx].cumulative) ++idx;
    const Branch& br = branches[idx];
    if (!br.sim) return std::pair{pick.uniform() < scenario.pfa(), 0.0};
    const double z = br.sim->run_statistic(Hypothesis::target, trial_seed);
    return std::pair{z > br.threshold, z};
  });
  return make_report("mixture_pd", sum, trials, target, z_target / cumulative, seed);
}

std::vector<double> sample_statistic(const SimConfig& config, Hypothesis hypothesis, std::size_t n) {
  const DetectorSimulator sim(config);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = sim.run_statistic(hypothesis, derive_seed(config.master_seed, k));
  return out;
}

double ks_distance_exponential(std::vector<double> samples, double mean) {
  if (samples.empty() || !(mean > 0.0)) throw Error("KS test needs samples and a positive mean");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = -std::expm1(-samples[i] / mean);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace drt
