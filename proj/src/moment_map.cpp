#include "momentbody/moment_map.hpp"

#include <algorithm>
#include <cmath>

namespace momentbody {

void validate(const MomentMap& map) {
  if (map.mats.empty()) throw InvalidInput("moment map: needs at least one matrix");
  const Index n = map.mats.front().size();
  if (n == 0) throw InvalidInput("moment map: empty matrices");
  for (const auto& a : map.mats) {
    if (a.size() != n) throw InvalidInput("moment map: matrices differ in size");
  }
  if (!map.blocks.empty()) {
    Index total = 0;
    for (Index bsz : map.blocks) {
      if (bsz <= 0) throw InvalidInput("moment map: nonpositive block size");
      total += bsz;
    }
    if (total != n) throw InvalidInput("moment map: block sizes must sum to n");
  }
  if (map.traceless) {
    for (const auto& a : map.mats) {
      if (std::abs(a.trace()) > 1e-10) throw InvalidInput("moment map: traceless flag violated");
    }
  }
  if (map.orthonormal) {
    const SymMatrix g = gram(map);
    const double err = (g.mat() - Matrix::Identity(map.m(), map.m())).cwiseAbs().maxCoeff();
    if (err > 1e-8) throw InvalidInput("moment map: orthonormal flag violated");
  }
}

Vector apply(const MomentMap& map, const SymMatrix& x) {
  const Index n = map.n();
  if (x.size() != n) throw InvalidInput("apply: size mismatch");
  Vector out(map.m());
  for (Index i = 0; i < map.m(); ++i) out[i] = map.mats[i].mat().cwiseProduct(x.mat()).sum();
  return out;
}

SymMatrix adjoint(const MomentMap& map, const Eigen::Ref<const Vector>& y) {
  if (y.size() != map.m()) throw InvalidInput("adjoint: size mismatch");
  if (!y.allFinite()) throw InvalidInput("adjoint: non-finite coefficients");
  Matrix acc = Matrix::Zero(map.n(), map.n());
  for (Index i = 0; i < map.m(); ++i) acc.noalias() += y[i] * map.mats[i].mat();
  return SymMatrix(acc);
}

// G_ij = tr(A_i A_j) = <vec A_i, vec A_j>, so G is the Gram of the stacked
// n^2-row matrix whose columns are vec A_i. Column blocks keep the working
// set near cache-friendly GEMM sizes at large m, n.
SymMatrix gram(const MomentMap& map) {
  const Index n = map.n();
  const Index m = map.m();
  const Index rows = n * n;
  // ~64 MB cap per stacked panel
  const Index max_cols = std::max<Index>(1, (Index(1) << 23) / std::max<Index>(rows, 1));
  Matrix g(m, m);
  Matrix left, right;
  for (Index i0 = 0; i0 < m; i0 += max_cols) {
    const Index ic = std::min(max_cols, m - i0);
    left.resize(rows, ic);
    for (Index i = 0; i < ic; ++i)
      left.col(i) = Eigen::Map<const Vector>(map.mats[i0 + i].mat().data(), rows);
    for (Index j0 = i0; j0 < m; j0 += max_cols) {
      const Index jc = std::min(max_cols, m - j0);
      if (j0 == i0) {
        g.block(i0, j0, ic, jc).noalias() = left.transpose() * left;
      } else {
        right.resize(rows, jc);
        for (Index j = 0; j < jc; ++j)
          right.col(j) = Eigen::Map<const Vector>(map.mats[j0 + j].mat().data(), rows);
        g.block(i0, j0, ic, jc).noalias() = left.transpose() * right;
        g.block(j0, i0, jc, ic) = g.block(i0, j0, ic, jc).transpose();
      }
    }
  }
  return SymMatrix(g);
}

std::vector<MomentMap> block_split(const MomentMap& map, double off_block_tol) {
  if (map.blocks.empty()) throw MissingBlockStructure("block_split: no blocks declared");
  validate(map);
  std::vector<Index> offsets(map.blocks.size());
  Index off = 0;
  for (size_t p = 0; p < map.blocks.size(); ++p) {
    offsets[p] = off;
    off += map.blocks[p];
  }

  // off-block mass must be zero for the declared structure to be real
  for (const auto& a : map.mats) {
    Matrix masked = a.mat();
    for (size_t p = 0; p < map.blocks.size(); ++p)
      masked.block(offsets[p], offsets[p], map.blocks[p], map.blocks[p]).setZero();
    const double off_mass = masked.cwiseAbs().maxCoeff();
    if (off_mass > off_block_tol)
      throw BlockViolation("block_split: off-block entries up to " + std::to_string(off_mass));
  }

  std::vector<MomentMap> out(map.blocks.size());
  for (size_t p = 0; p < map.blocks.size(); ++p) {
    out[p].traceless = false;  // per-block traces need not vanish
    out[p].orthonormal = false;
    out[p].mats.reserve(map.mats.size());
    for (const auto& a : map.mats)
      out[p].mats.emplace_back(a.mat().block(offsets[p], offsets[p], map.blocks[p], map.blocks[p]));
  }
  return out;
}

void validate(const Instance& inst) {
  validate(inst.map);
  if (inst.b.size() != inst.map.m()) throw InvalidInput("instance: b has wrong length");
  if (!inst.b.allFinite()) throw InvalidInput("instance: b must be finite");
}

}  // namespace momentbody
