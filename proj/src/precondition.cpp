#include "momentbody/precondition.hpp"

#include <algorithm>
#include <cmath>

namespace momentbody {

namespace {

// Symmetric inverse square root (and square root) of an SPD matrix given its
// decomposition. Eigenvector signs are fixed so the record is reproducible,
// although W itself does not depend on them.
void sign_fix(Matrix& u) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0) u.col(j) = -u.col(j);
  }
}

}  // namespace

PreconditionedInstance precondition(const Instance& inst, double rank_tol) {
  validate(inst);
  const Index n = inst.map.n();
  const Index m = inst.map.m();

  Vector t(m);
  std::vector<Matrix> centered(m);
  for (Index i = 0; i < m; ++i) {
    t[i] = inst.map.mats[i].trace() / static_cast<double>(n);
    centered[i] = inst.map.mats[i].mat();
    centered[i].diagonal().array() -= t[i];
  }

  MomentMap centered_map;
  centered_map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) centered_map.mats.emplace_back(centered[i]);
  SpectralDecomposition gd = eigh(gram(centered_map));
  const double gmax = gd.eigenvalues(m - 1);
  const double gmin = gd.eigenvalues(0);
  if (!(gmax > 0) || gmin / gmax < rank_tol)
    throw RankDeficient("precondition: centered Gram eigenvalue ratio " +
                        std::to_string(gmax > 0 ? gmin / gmax : 0.0));
  sign_fix(gd.eigenvectors);

  TransformRecord rec;
  rec.trace_offsets = t;
  rec.gram_centered_eigs = gd.eigenvalues;
  rec.whitener = gd.eigenvectors * gd.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                 gd.eigenvectors.transpose();
  rec.whitener_inv =
      gd.eigenvectors * gd.eigenvalues.cwiseSqrt().asDiagonal() * gd.eigenvectors.transpose();
  rec.original_n = n;
  rec.original_m = m;

  // hat_i = sum_j W_ij centered_j, assembled as GEMM over row chunks of the
  // stacked vec panel so large m, n stay out of O(m^2 n^2) scalar loops
  const Index rows = n * n;
  std::vector<Matrix> hat(m, Matrix(n, n));
  const Index chunk = std::max<Index>(1, (Index(1) << 23) / std::max<Index>(m, 1));
  Matrix pchunk(std::min(chunk, rows), m);
  Matrix ochunk(std::min(chunk, rows), m);
  for (Index r0 = 0; r0 < rows; r0 += chunk) {
    const Index len = std::min(chunk, rows - r0);
    for (Index j = 0; j < m; ++j)
      pchunk.col(j).head(len) = Eigen::Map<const Vector>(centered[j].data() + r0, len);
    ochunk.topRows(len).noalias() = pchunk.topRows(len) * rec.whitener;
    for (Index i = 0; i < m; ++i)
      Eigen::Map<Vector>(hat[i].data() + r0, len) = ochunk.col(i).head(len);
  }

  PreconditionedInstance out;
  out.map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) out.map.mats.emplace_back(hat[i]);
  out.map.blocks = inst.map.blocks;  // centering and mixing keep block structure
  out.map.traceless = true;
  out.map.orthonormal = true;
  out.b_hat = transform_b(rec, inst.b);
  out.record = rec;
  out.label = inst.label;
  return out;
}

Vector transform_b(const TransformRecord& rec, const Eigen::Ref<const Vector>& b) {
  if (b.size() != rec.original_m) throw InvalidInput("transform_b: size mismatch");
  return rec.whitener * (b - rec.trace_offsets);
}

FeasibleBackmap backmap_feasible(const TransformRecord& rec, const Instance& original,
                                 const DensityMatrix& density) {
  if (original.map.m() != rec.original_m || original.map.n() != rec.original_n)
    throw InvalidInput("backmap_feasible: record does not match instance");
  if (density.matrix.size() != rec.original_n)
    throw InvalidInput("backmap_feasible: density size mismatch");
  FeasibleBackmap out;
  out.density = density;
  out.residual_original = (apply(original.map, density.matrix) - original.b).norm();
  return out;
}

InfeasibleBackmap backmap_infeasible(const TransformRecord& rec, const Instance& original,
                                     const Eigen::Ref<const Vector>& u_hat) {
  if (original.map.m() != rec.original_m || original.map.n() != rec.original_n)
    throw InvalidInput("backmap_infeasible: record does not match instance");
  if (u_hat.size() != rec.original_m) throw InvalidInput("backmap_infeasible: size mismatch");
  Vector u = rec.whitener * u_hat;
  const double norm = u.norm();
  if (!(norm > 0)) throw NotASeparator("backmap_infeasible: zero direction");
  u /= norm;
  const auto [lmin, lmax] = lambda_extremes(adjoint(original.map, u));
  (void)lmin;
  const double gap = original.b.dot(u) - lmax;
  if (!(gap > 0))
    throw NotASeparator("backmap_infeasible: recomputed gap " + std::to_string(gap));
  return {u, gap};
}

}  // namespace momentbody
