#include "momentbody/spectral.hpp"

#include <cmath>

namespace momentbody {

SpectralDecomposition eigh(const SymMatrix& m) {
  if (m.size() == 0) throw InvalidInput("eigh: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success) throw InvalidInput("eigh: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

NormalizedExponential exp1(const SymMatrix& m) {
  const SpectralDecomposition sd = eigh(m);
  const double shift = sd.eigenvalues.maxCoeff();
  const Vector w = (sd.eigenvalues.array() - shift).exp();
  const double z = w.sum();  // in [1, n], no overflow regardless of spectrum
  const Vector p = w / z;
  Matrix x = sd.eigenvectors * p.asDiagonal() * sd.eigenvectors.transpose();
  NormalizedExponential out;
  out.density.matrix = SymMatrix(x);
  out.density.spectrum = p;
  out.log_partition = shift + std::log(z);
  return out;
}

std::pair<double, double> lambda_extremes(const SymMatrix& m) {
  const SpectralDecomposition sd = eigh(m);
  return {sd.eigenvalues(0), sd.eigenvalues(sd.eigenvalues.size() - 1)};
}

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) throw InvalidInput("log_sum_exp: empty vector");
  const double shift = v.maxCoeff();
  if (!std::isfinite(shift)) throw InvalidInput("log_sum_exp: non-finite input");
  return shift + std::log((v.array() - shift).exp().sum());
}

Vector softmax(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) throw InvalidInput("softmax: empty vector");
  const double shift = v.maxCoeff();
  if (!std::isfinite(shift)) throw InvalidInput("softmax: non-finite input");
  Vector w = (v.array() - shift).exp();
  return w / w.sum();
}

}  // namespace momentbody
