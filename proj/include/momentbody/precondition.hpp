#pragma once

#include <string>

#include "momentbody/moment_map.hpp"

namespace momentbody {

// Everything needed to move vectors and certificates between the original
// coordinates and the centered-whitened ones.
struct TransformRecord {
  Vector trace_offsets;      // t_i = tr(A_i)/n
  Matrix whitener;           // W = G'^(-1/2), symmetric
  Matrix whitener_inv;       // W^(-1) = G'^(1/2), symmetric
  Vector gram_centered_eigs; // spectrum of the centered Gram, diagnostics
  Index original_n = 0;
  Index original_m = 0;
};

struct PreconditionedInstance {
  MomentMap map;  // traceless + orthonormal flags set
  Vector b_hat;
  TransformRecord record;
  std::string label;
};

// Center each A_i to traceless, then whiten the family by the inverse square
// root of the centered Gram. Throws RankDeficient when the centered Gram's
// eigenvalue ratio drops below rank_tol.
PreconditionedInstance precondition(const Instance& inst, double rank_tol = 1e-12);

// b_hat = W (b - t)
Vector transform_b(const TransformRecord& rec, const Eigen::Ref<const Vector>& b);

struct FeasibleBackmap {
  DensityMatrix density;       // unchanged; the certificate lives in X-space
  double residual_original;    // ||A(X) - b|| recomputed against the raw map
};

FeasibleBackmap backmap_feasible(const TransformRecord& rec, const Instance& original,
                                 const DensityMatrix& density);

struct InfeasibleBackmap {
  Vector u;             // unit separator in original coordinates
  double gap_original;  // b' u - lambda_max(A(u)), recomputed, > 0
};

// Maps a separator for the whitened body back to original coordinates and
// re-verifies it there. Throws NotASeparator if the recomputed gap is <= 0.
InfeasibleBackmap backmap_infeasible(const TransformRecord& rec, const Instance& original,
                                     const Eigen::Ref<const Vector>& u_hat);

}  // namespace momentbody
