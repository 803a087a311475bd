#pragma once

#include <vector>

#include "momentbody/moment_map.hpp"

namespace momentbody {

// One evaluation of the dual objective f(y) = log tr exp A(y) - b'y.
// gradient = A(X(y)) - b where X(y) = exp A(y) / tr exp A(y).
struct DualEval {
  double value = 0.0;
  Vector gradient;
  DensityMatrix density;
  double log_partition = 0.0;
  Vector spectrum;  // eigenvalues of A(y), ascending
};

DualEval eval(const MomentMap& map, const Eigen::Ref<const Vector>& b,
              const Eigen::Ref<const Vector>& y);

// Same f up to reordering of the joint spectrum, one eigendecomposition per
// block instead of one at full size.
DualEval eval_block(const std::vector<MomentMap>& blocks, const Eigen::Ref<const Vector>& b,
                    const Eigen::Ref<const Vector>& y);

// Exact Hessian of f at y, via the divided-difference kernel on the spectrum
// of A(y). Independent of b.
SymMatrix hessian(const MomentMap& map, const Eigen::Ref<const Vector>& y);

// Logarithmic mean: (a - b)/(log a - log b) with the limits filled in.
// Equals the integral of a^s b^(1-s) over s in [0,1]. Requires a, b >= 0.
double log_mean(double a, double b);

}  // namespace momentbody
