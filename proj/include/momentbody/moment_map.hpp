#pragma once

#include <string>
#include <vector>

#include "momentbody/spectral.hpp"

namespace momentbody {

// The linear map X -> (tr(A_1 X), ..., tr(A_m X)) given by m symmetric
// matrices of a common size n. Optional block sizes declare that every A_i is
// block diagonal with those blocks. Flags are set by the preconditioner.
struct MomentMap {
  std::vector<SymMatrix> mats;
  std::vector<Index> blocks;  // empty: no declared structure
  bool traceless = false;
  bool orthonormal = false;

  Index n() const { return mats.empty() ? 0 : mats.front().size(); }
  Index m() const { return static_cast<Index>(mats.size()); }
};

// Checks sizes, symmetry, finiteness, declared block structure, and flags.
void validate(const MomentMap& map);

// [tr(A_i X)]_i
Vector apply(const MomentMap& map, const SymMatrix& x);

// A(y) = sum_i y_i A_i
SymMatrix adjoint(const MomentMap& map, const Eigen::Ref<const Vector>& y);

// G_ij = tr(A_i A_j), assembled with a blocked stacked-matrix product so the
// m^2 n^2 work runs as dense GEMM.
SymMatrix gram(const MomentMap& map);

// Splits a map with declared blocks into one sub-map per block.
// Throws MissingBlockStructure / BlockViolation.
std::vector<MomentMap> block_split(const MomentMap& map, double off_block_tol = 1e-12);

struct Instance {
  MomentMap map;
  Vector b;
  std::string label;
};

void validate(const Instance& inst);

}  // namespace momentbody
