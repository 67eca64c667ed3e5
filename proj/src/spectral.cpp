#include "conc/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace conc::spectral {

Matrix sample_covariance(const Dataset& data) {
  const Index m = data.m();
  const Index n = data.n();
  if (m < 2) throw std::invalid_argument("sample_covariance: need m >= 2 samples");

  const Eigen::RowVectorXd mean = data.samples().colwise().mean();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  // Accumulate (X - mean)'(X - mean) in row blocks to bound the working set.
  const Index block = 2048;
  Matrix centered;
  for (Index start = 0; start < m; start += block) {
    const Index rows = std::min(block, m - start);
    centered = data.samples().middleRows(start, rows).rowwise() - mean;
    q.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0);
  }
  q /= static_cast<double>(m - 1);
  Matrix out(n, n);
  out = q.selfadjointView<Eigen::Lower>();  // mirror: exactly symmetric
  return out;
}

PrincipalComponents eigendecompose(const Matrix& q) {
  if (q.rows() != q.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
  const Index n = q.rows();
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("eigendecompose: matrix must be symmetric");
  }

  Eigen::MatrixXd sym = 0.5 * (Eigen::MatrixXd(q) + Eigen::MatrixXd(q).transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");
  }

  PrincipalComponents pc;
  pc.vectors.resize(n, n);
  pc.eigenvalues.resize(n);
  // Eigen returns ascending order; emit descending.
  for (Index i = 0; i < n; ++i) {
    const Index src = n - 1 - i;
    double lambda = solver.eigenvalues()[src];
    if (lambda < 0.0) {
      if (lambda < -1e-9) {
        throw std::runtime_error(
            "eigendecompose: eigenvalue below -1e-9 on a supposedly PSD matrix");
      }
      lambda = 0.0;
    }
    pc.eigenvalues[i] = lambda;
    pc.vectors.col(i) = solver.eigenvectors().col(src);
    // Sign convention: first nonzero coordinate positive.
    for (Index j = 0; j < n; ++j) {
      const double v = pc.vectors(j, i);
      if (v > 1e-12) break;
      if (v < -1e-12) {
        pc.vectors.col(i) = -pc.vectors.col(i);
        break;
      }
    }
  }
  return pc;
}

Vector pow_transform(const Eigen::Ref<const Vector>& v, int s) {
  if (s < 1) throw std::domain_error("pow_transform: s must be a positive integer");
  const double vmax = v.cwiseAbs().maxCoeff();
  if (!(vmax > 0.0)) throw std::invalid_argument("pow_transform: zero vector");
  const Index n = v.size();
  Vector y(n);
  // Rescale by the max entry before powering: the largest term is then
  // exactly 1, so no admissible s can underflow the whole vector.
  for (Index j = 0; j < n; ++j) {
    const double mag = std::pow(std::abs(v[j]) / vmax, static_cast<double>(s));
    y[j] = v[j] > 0.0 ? mag : (v[j] < 0.0 ? -mag : 0.0);
  }
  y /= y.norm();
  return y;
}

Vector axis_limit(const Eigen::Ref<const Vector>& v) {
  const Index n = v.size();
  Index jmax = 0;
  for (Index j = 1; j < n; ++j) {
    if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
  }
  if (v[jmax] == 0.0) throw std::invalid_argument("axis_limit: zero vector");
  Vector e = Vector::Zero(n);
  e[jmax] = v[jmax] > 0.0 ? 1.0 : -1.0;
  return e;
}

}  // namespace conc::spectral
