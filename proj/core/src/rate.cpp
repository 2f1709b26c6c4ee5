#include "drt/rate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "drt/error.hpp"

namespace drt {

void CommChannel::validate() const {
  if (h_c.size() == 0 || !h_c.allFinite()) throw Error("communication channel must be nonempty and finite");
  if (!(noise_psd > 0.0) || !std::isfinite(noise_psd)) throw Error("communication noise psd must be positive");
}

double gaussian_rate(const CommChannel& channel, const CMatrix& r) {
  channel.validate();
  if (r.rows() != channel.h_c.cols() || r.cols() != channel.h_c.cols())
    throw Error("covariance dimension does not match the channel");
  require_psd(r, "covariance");
  const CMatrix s = channel.h_c * r * channel.h_c.adjoint() / channel.noise_psd;
  const HermitianEigen eig = jacobi_eigen(0.5 * (s + s.adjoint()));
  double bits = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) bits += std::log2(1.0 + std::max(0.0, eig.values(k)));
  return bits;
}

CMatrix water_filling(const CommChannel& channel, double power) {
  channel.validate();
  if (!(power >= 0.0)) throw Error("power must be nonnegative");
  const Eigen::Index m = channel.h_c.cols();
  const CMatrix g = channel.h_c.adjoint() * channel.h_c / channel.noise_psd;
  const HermitianEigen eig = jacobi_eigen(0.5 * (g + g.adjoint()));
  const double floor = 1e-14 * std::max(1.0, eig.values(0));

  // Modes are sorted by gain; open them one at a time until the water level
  // stays above the next mode's floor 1/g.
  std::size_t active = 0;
  double level = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (eig.values(k) <= floor) break;
    double inv_sum = 0.0;
    for (Eigen::Index j = 0; j <= k; ++j) inv_sum += 1.0 / eig.values(j);
    const double candidate = (power + inv_sum) / static_cast<double>(k + 1);
    if (candidate <= 1.0 / eig.values(k)) break;
    active = static_cast<std::size_t>(k + 1);
    level = candidate;
  }

  RVector p = RVector::Zero(m);
  for (std::size_t k = 0; k < active; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    p(i) = std::max(0.0, level - 1.0 / eig.values(i));
  }
  if (active > 0 && p.sum() > 0.0) p *= power / p.sum();
  return eig.vectors * p.asDiagonal() * eig.vectors.adjoint();
}

double mixture_rate(const CommChannel& channel, std::span<const WeightedCovariance> mixture, bool include_atom_entropy,
                    int snapshots) {
  if (snapshots < 1) throw Error("snapshots must be positive");
  double bits = 0.0;
  double entropy = 0.0;
  for (const WeightedCovariance& atom : mixture) {
    if (atom.weight <= 0.0) continue;
    bits += atom.weight * gaussian_rate(channel, atom.covariance);
    entropy -= atom.weight * std::log2(atom.weight);
  }
  if (include_atom_entropy) bits += entropy / static_cast<double>(snapshots);
  return bits;
}

}  // namespace drt
