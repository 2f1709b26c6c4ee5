#pragma once

#include <span>

#include "drt/linalg.hpp"

// Gaussian-codebook rates. These illustrate the communication cost of the
// sensing-optimal strategy; they are not the constrained mutual-information
// suprema, which this library does not compute.

namespace drt {

struct CommChannel {
  CMatrix h_c;  // N_c x M
  double noise_psd = 1.0;

  /// Throws drt::Error on non-finite entries or noise_psd <= 0.
  void validate() const;
};

/// log2 det(I + H R H^H / N0) in bits per channel use.
double gaussian_rate(const CommChannel& channel, const CMatrix& r);

/// Capacity-achieving covariance of trace P by water-filling over the
/// eigenmodes of H^H H / N0.
CMatrix water_filling(const CommChannel& channel, double power);

/// sum_i w_i gaussian_rate(R_i), plus H({w_i}) / T bits when
/// include_atom_entropy (an optimistic stand-in for the information carried
/// by the atom index).
double mixture_rate(const CommChannel& channel, std::span<const WeightedCovariance> mixture,
                    bool include_atom_entropy = false, int snapshots = 1);

}  // namespace drt
