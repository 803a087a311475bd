#pragma once

#include <Eigen/Dense>
#include <utility>

#include "momentbody/errors.hpp"

namespace momentbody {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense symmetric matrix, symmetrized on construction so downstream spectral
// routines can rely on exact entrywise symmetry.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Eigen::Ref<const Matrix>& a) : m_(0, 0) {
    if (a.rows() != a.cols()) throw InvalidInput("SymMatrix: matrix must be square");
    if (!a.allFinite()) throw InvalidInput("SymMatrix: entries must be finite");
    m_ = 0.5 * (a + a.transpose());
  }

  static SymMatrix Zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix Identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  const Matrix& mat() const { return m_; }
  Index size() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns match eigenvalue order
};

// Unit-trace PSD matrix together with its spectrum (kept because every
// consumer of a density needs the eigenvalues again anyway).
struct DensityMatrix {
  SymMatrix matrix;
  Vector spectrum;  // ascending, sums to 1, entries >= -1e-12
};

struct NormalizedExponential {
  DensityMatrix density;
  double log_partition = 0.0;  // log tr exp M
};

SpectralDecomposition eigh(const SymMatrix& m);

// exp(M) / tr exp(M) with the shift trick, safe for spectra of any magnitude.
NormalizedExponential exp1(const SymMatrix& m);

// (lambda_min, lambda_max)
std::pair<double, double> lambda_extremes(const SymMatrix& m);

double log_sum_exp(const Eigen::Ref<const Vector>& v);
Vector softmax(const Eigen::Ref<const Vector>& v);

}  // namespace momentbody
