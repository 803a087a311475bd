#pragma once

#include <optional>
#include <string>
#include <vector>

#include "momentbody/precondition.hpp"
#include "momentbody/solver.hpp"

namespace momentbody {

struct DualityCheck {
  double f_star = 0.0;
  double entropy_of_x_star = 0.0;  // -sum p_k log p_k over X*'s spectrum
  double mismatch = 0.0;           // |f_star - entropy|
};

// Everything decide() learned, with certificates in original coordinates.
struct MembershipReport {
  Verdict verdict = Verdict::Indeterminate;

  std::optional<DensityMatrix> density;  // Feasible
  double residual = 0.0;                 // ||A(X) - b|| in original coordinates

  std::optional<Vector> separator;  // Infeasible, unit vector
  double gap = 0.0;                 // b'u - lambda_max(A(u)) in original coordinates

  Vector y_last;           // NotInterior / Indeterminate evidence
  double grad_norm = 0.0;
  double norm_bound = 0.0;
  std::string reason;      // Indeterminate detail

  std::optional<DualityCheck> duality;
  std::string quick_reject_reason;  // empty when the solver ran
  bool certificate_verified = false;
  int iterations = 0;
  double precondition_seconds = 0.0;
  double solve_seconds = 0.0;
  IterationTrace trace;  // filled when config.record_trace is set
};

// Full pipeline: validate, precondition, quick rejects, solve, back-map and
// re-verify certificates in original coordinates.
MembershipReport decide(const Instance& inst, const SolverConfig& config = {});

// Cheap infeasibility screens, valid on centered-whitened data only:
// radius ||b|| > sqrt((n-1)/n) and componentwise b_i outside the extreme
// eigenvalues of A_i. Returns the reason, or nothing when inconclusive.
std::optional<std::string> quick_reject(const MomentMap& pre_map,
                                        const Eigen::Ref<const Vector>& b_hat);

struct FeasibleCheck {
  bool pass = false;
  double residual = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

// Independent recomputation, no state shared with any solve.
FeasibleCheck verify_feasible(const Instance& inst, const DensityMatrix& x, double eps);

struct SeparatorCheck {
  bool pass = false;
  double gap = 0.0;
};

SeparatorCheck verify_infeasible(const Instance& inst, const Eigen::Ref<const Vector>& u);

// Support function h(u) = lambda_max(A(u)) and width w(u) = spectral gap.
double support(const MomentMap& map, const Eigen::Ref<const Vector>& u);
std::pair<double, double> support_width(const MomentMap& map, const Eigen::Ref<const Vector>& u);

// One extreme point per direction: x = A(vv') for a top eigenvector v.
std::vector<Vector> boundary_sample(const MomentMap& map, const std::vector<Vector>& directions);

struct RoundTrip {
  Vector image;        // x = A(exp1 A(y))
  Vector y_recovered;  // minimizer of the dual with b = x
  double y_error = 0.0;
};

// The gradient map y -> A(exp1 A(y)) hits the interior; solving with b set to
// the image must come back to y.
RoundTrip gradient_map_roundtrip(const MomentMap& map, const Eigen::Ref<const Vector>& y,
                                 const SolverConfig& config = {});

}  // namespace momentbody
