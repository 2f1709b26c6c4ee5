#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace drt {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Eigen-decomposition A = V diag(values) V^H of a Hermitian matrix.
/// Eigenvalues are sorted in descending order; column k of `vectors` is the
/// unit-norm eigenvector for values[k].
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
  int sweeps = 0;
};

/// Largest absolute entry of A - A^H.
double hermitian_defect(const CMatrix& a);

/// True if A is square and Hermitian within rel_tol relative to its largest
/// entry (absolute 1e-300 floor for the zero matrix).
bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);

/// Cyclic Jacobi eigensolver for small dense Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot a(p,q) with a diagonal
/// unitary, then applies a real Givens rotation that zeroes it. Sweeps stop
/// once the off-diagonal Frobenius norm drops below off_tol * ||A||_F.
/// Throws drt::Error if the input is not square or not Hermitian within
/// 1e-12 relative.
HermitianEigen jacobi_eigen(const CMatrix& a, double off_tol = 1e-12, int max_sweeps = 100);

/// Throws drt::Error unless R is Hermitian and its smallest eigenvalue is
/// >= -rel_tol * max(trace, ||R||).
void require_psd(const CMatrix& r, const char* what, double rel_tol = 1e-12);

/// Hermitian square root factor: returns H with H^H H = A for PSD A
/// (H = diag(sqrt(max(lambda,0))) V^H).
CMatrix psd_factor(const CMatrix& a);

/// Numerical rank of a PSD matrix: eigenvalues above rel_tol * max(trace, ||R||).
int psd_rank(const CMatrix& r, double rel_tol = 1e-12);

/// A probability-weighted covariance; mixtures of these describe randomized
/// transmit strategies.
struct WeightedCovariance {
  double weight = 0.0;
  CMatrix covariance;
};

}  // namespace drt
