#include "drt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drt/error.hpp"

namespace drt {

double hermitian_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  if (!a.allFinite()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return hermitian_defect(a) <= rel_tol * scale;
}

HermitianEigen jacobi_eigen(const CMatrix& input, double off_tol, int max_sweeps) {
  if (input.rows() != input.cols()) throw Error("jacobi_eigen: matrix is not square");
  if (!is_hermitian(input)) throw Error("jacobi_eigen: matrix is not Hermitian");

  const Eigen::Index n = input.rows();
  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::Identity(n, n);

  const double scale = a.norm();
  int sweep = 0;
  if (scale > 0.0) {
    for (; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
      if (std::sqrt(off) <= off_tol * scale) break;

      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const cdouble apq = a(p, q);
          const double r = std::abs(apq);
          if (r == 0.0) continue;

          // Rotate the phase of a(p,q) away so the pivot is real and positive.
          const cdouble phase = apq / r;
          a.col(q) *= std::conj(phase);
          a.row(q) *= phase;
          v.col(q) *= std::conj(phase);

          const double app = a(p, p).real();
          const double aqq = a(q, q).real();
          const double zeta = (aqq - app) / (2.0 * r);
          const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;

          const CVector colp = a.col(p);
          const CVector colq = a.col(q);
          a.col(p) = c * colp - s * colq;
          a.col(q) = s * colp + c * colq;
          const Eigen::RowVectorXcd rowp = a.row(p);
          const Eigen::RowVectorXcd rowq = a.row(q);
          a.row(p) = c * rowp - s * rowq;
          a.row(q) = s * rowp + c * rowq;
          a(p, q) = 0.0;
          a(q, p) = 0.0;

          const CVector vp = v.col(p);
          const CVector vq = v.col(q);
          v.col(p) = c * vp - s * vq;
          v.col(q) = s * vp + c * vq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]).normalized();
  }
  return out;
}

namespace {

double psd_scale(const CMatrix& r) {
  return std::max(std::abs(r.trace().real()), r.norm());
}

}  // namespace

void require_psd(const CMatrix& r, const char* what, double rel_tol) {
  if (!is_hermitian(r)) throw Error(std::string(what) + ": matrix is not Hermitian");
  if (r.size() == 0) return;
  const HermitianEigen eig = jacobi_eigen(r);
  const double min_eig = eig.values(eig.values.size() - 1);
  if (min_eig < -rel_tol * psd_scale(r))
    throw Error(std::string(what) + ": matrix is not positive semidefinite");
}

CMatrix psd_factor(const CMatrix& a) {
  const HermitianEigen eig = jacobi_eigen(a);
  const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return root.asDiagonal() * eig.vectors.adjoint();
}

int psd_rank(const CMatrix& r, double rel_tol) {
  if (r.size() == 0) return 0;
  const double scale = psd_scale(r);
  if (scale == 0.0) return 0;
  const HermitianEigen eig = jacobi_eigen(r);
  return static_cast<int>((eig.values.array() > rel_tol * scale).count());
}

}  // namespace drt
