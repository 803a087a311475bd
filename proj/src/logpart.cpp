#include "momentbody/logpart.hpp"

#include <algorithm>
#include <cmath>

namespace momentbody {

double log_mean(double a, double b) {
  if (a < 0 || b < 0 || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidInput("log_mean: arguments must be finite and nonnegative");
  if (a == b) return a;
  if (a == 0.0 || b == 0.0) return 0.0;
  const double la = std::log(a);
  const double lb = std::log(b);
  const double d = la - lb;
  if (std::abs(d) >= 1e-3) return (a - b) / d;
  // a ~ b: (a-b) cancels, switch to sqrt(ab) * sinhc(d/2)
  const double u = 0.5 * d;
  const double u2 = u * u;
  return std::exp(0.5 * (la + lb)) * (1.0 + u2 / 6.0 + u2 * u2 / 120.0);
}

DualEval eval(const MomentMap& map, const Eigen::Ref<const Vector>& b,
              const Eigen::Ref<const Vector>& y) {
  if (b.size() != map.m()) throw InvalidInput("eval: b has wrong length");
  if (!b.allFinite()) throw InvalidInput("eval: b must be finite");
  const SymMatrix ay = adjoint(map, y);
  const SpectralDecomposition sd = eigh(ay);

  DualEval out;
  out.spectrum = sd.eigenvalues;
  const double shift = sd.eigenvalues.maxCoeff();
  const Vector w = (sd.eigenvalues.array() - shift).exp();
  const double z = w.sum();
  const Vector p = w / z;
  out.log_partition = shift + std::log(z);
  out.value = out.log_partition - b.dot(y);

  const Matrix vs = sd.eigenvectors * p.cwiseSqrt().asDiagonal();
  Matrix x(map.n(), map.n());
  x.setZero();
  x.selfadjointView<Eigen::Lower>().rankUpdate(vs);
  x.triangularView<Eigen::StrictlyUpper>() = x.transpose();
  out.density.matrix = SymMatrix(x);
  out.density.spectrum = p;
  out.gradient = apply(map, out.density.matrix) - b;
  return out;
}

DualEval eval_block(const std::vector<MomentMap>& blocks, const Eigen::Ref<const Vector>& b,
                    const Eigen::Ref<const Vector>& y) {
  if (blocks.empty()) throw MissingBlockStructure("eval_block: no blocks");
  const Index m = blocks.front().m();
  if (b.size() != m) throw InvalidInput("eval_block: b has wrong length");
  if (!b.allFinite()) throw InvalidInput("eval_block: b must be finite");

  Index n_total = 0;
  for (const auto& blk : blocks) {
    if (blk.m() != m) throw BlockViolation("eval_block: blocks disagree on m");
    n_total += blk.n();
  }

  std::vector<SpectralDecomposition> sds;
  sds.reserve(blocks.size());
  Vector joint(n_total);
  Index at = 0;
  for (const auto& blk : blocks) {
    sds.push_back(eigh(adjoint(blk, y)));
    joint.segment(at, blk.n()) = sds.back().eigenvalues;
    at += blk.n();
  }

  DualEval out;
  const double shift = joint.maxCoeff();
  const Vector w = (joint.array() - shift).exp();
  const double z = w.sum();
  out.log_partition = shift + std::log(z);
  out.value = out.log_partition - b.dot(y);

  Matrix x = Matrix::Zero(n_total, n_total);
  out.gradient = Vector::Zero(m);
  at = 0;
  Index ib = 0;
  for (const auto& blk : blocks) {
    const Index nb = blk.n();
    const Vector pb = w.segment(at, nb) / z;
    const Matrix xb =
        sds[ib].eigenvectors * pb.asDiagonal() * sds[ib].eigenvectors.transpose();
    x.block(at, at, nb, nb) = xb;
    for (Index i = 0; i < m; ++i)
      out.gradient[i] += blk.mats[i].mat().cwiseProduct(xb).sum();
    at += nb;
    ++ib;
  }
  out.gradient -= b;
  out.density.matrix = SymMatrix(x);
  std::sort(joint.data(), joint.data() + joint.size());
  out.spectrum = joint;
  Vector p = (out.spectrum.array() - shift).exp() / z;
  out.density.spectrum = p;
  return out;
}

SymMatrix hessian(const MomentMap& map, const Eigen::Ref<const Vector>& y) {
  const Index n = map.n();
  const Index m = map.m();
  const SpectralDecomposition sd = eigh(adjoint(map, y));
  const Vector p = softmax(sd.eigenvalues);

  Matrix phi(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l <= k; ++l) {
      phi(k, l) = log_mean(p[k], p[l]);
      phi(l, k) = phi(k, l);
    }

  std::vector<Matrix> rotated(m);
  Vector d(m);
  for (Index i = 0; i < m; ++i) {
    rotated[i] = sd.eigenvectors.transpose() * map.mats[i].mat() * sd.eigenvectors;
    d[i] = p.dot(rotated[i].diagonal());
  }

  Matrix h(m, m);
  for (Index i = 0; i < m; ++i) {
    const Matrix weighted = phi.cwiseProduct(rotated[i]);
    for (Index j = 0; j <= i; ++j) {
      h(i, j) = weighted.cwiseProduct(rotated[j]).sum() - d[i] * d[j];
      h(j, i) = h(i, j);
    }
  }
  return SymMatrix(h);
}

}  // namespace momentbody
