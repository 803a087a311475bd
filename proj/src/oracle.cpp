#include "momentbody/oracle.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace momentbody {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_unit(const Eigen::Ref<const Vector>& u) {
  if (u.size() == 0 || std::abs(u.norm() - 1.0) > 1e-6)
    throw NotUnit("expected a unit vector, got norm " + std::to_string(u.norm()));
}

struct Screen {
  std::string reason;
  Vector separator_hat;
};

// Gershgorin outer bounds, one O(n^2) pass. lambda_min >= first,
// lambda_max <= second.
std::pair<double, double> gershgorin(const SymMatrix& a) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Index k = 0; k < a.size(); ++k) {
    const double r = a.mat().row(k).cwiseAbs().sum() - std::abs(a(k, k));
    lo = std::min(lo, a(k, k) - r);
    hi = std::max(hi, a(k, k) + r);
  }
  return {lo, hi};
}

std::optional<Screen> screen(const MomentMap& pre_map, const Eigen::Ref<const Vector>& b_hat) {
  if (b_hat.size() != pre_map.m()) throw InvalidInput("quick_reject: size mismatch");
  const double n = static_cast<double>(pre_map.n());
  const double rad = std::sqrt((n - 1.0) / n);
  const double bn = b_hat.norm();
  if (bn > rad) {
    std::ostringstream os;
    os << "radius: ||b|| = " << bn << " exceeds sqrt((n-1)/n) = " << rad;
    return Screen{os.str(), b_hat / bn};
  }
  for (Index i = 0; i < pre_map.m(); ++i) {
    // cheap filter first; b_i inside the Gershgorin range cannot certify, and
    // outside it rejection is already certain, so the exact eigenvalue pass
    // runs only to report the tight interval
    const auto [glo, ghi] = gershgorin(pre_map.mats[i]);
    if (b_hat[i] >= glo && b_hat[i] <= ghi) continue;
    const auto [lmin, lmax] = lambda_extremes(pre_map.mats[i]);
    if (b_hat[i] > lmax || b_hat[i] < lmin) {
      std::ostringstream os;
      os << "component " << i << ": b_i = " << b_hat[i] << " outside [" << lmin << ", " << lmax
         << "]";
      Vector e = Vector::Zero(pre_map.m());
      e[i] = b_hat[i] > lmax ? 1.0 : -1.0;
      return Screen{os.str(), e};
    }
  }
  return std::nullopt;
}

// Shape-level checks for the verifiers. The certificate math is independent
// of the traceless/orthonormal flags, so re-verification must not pay the
// Gram recomputation that full validation performs on flagged maps.
void check_shapes(const Instance& inst) {
  if (inst.map.mats.empty()) throw InvalidInput("instance: map needs at least one matrix");
  const Index n = inst.map.n();
  if (n == 0) throw InvalidInput("instance: empty matrices");
  for (const auto& a : inst.map.mats)
    if (a.size() != n) throw InvalidInput("instance: matrices differ in size");
  if (inst.b.size() != inst.map.m()) throw InvalidInput("instance: b has wrong length");
  if (!inst.b.allFinite()) throw InvalidInput("instance: b must be finite");
}

DualityCheck duality_check(double f_star, const Vector& spectrum) {
  double entropy = 0.0;
  for (Index k = 0; k < spectrum.size(); ++k)
    if (spectrum[k] > 0) entropy -= spectrum[k] * std::log(spectrum[k]);
  return {f_star, entropy, std::abs(f_star - entropy)};
}

}  // namespace

std::optional<std::string> quick_reject(const MomentMap& pre_map,
                                        const Eigen::Ref<const Vector>& b_hat) {
  if (auto s = screen(pre_map, b_hat)) return s->reason;
  return std::nullopt;
}

FeasibleCheck verify_feasible(const Instance& inst, const DensityMatrix& x, double eps) {
  check_shapes(inst);
  if (x.matrix.size() != inst.map.n()) throw InvalidInput("verify_feasible: size mismatch");
  FeasibleCheck out;
  const SpectralDecomposition sd = eigh(x.matrix);  // fresh, nothing reused from any solve
  out.min_eigenvalue = sd.eigenvalues(0);
  out.trace_error = std::abs(x.matrix.trace() - 1.0);
  out.residual = (apply(inst.map, x.matrix) - inst.b).norm();
  out.pass = out.min_eigenvalue >= -eps && out.trace_error <= eps && out.residual <= eps;
  return out;
}

SeparatorCheck verify_infeasible(const Instance& inst, const Eigen::Ref<const Vector>& u) {
  check_shapes(inst);
  if (u.size() != inst.map.m()) throw InvalidInput("verify_infeasible: size mismatch");
  require_unit(u);
  const auto [lmin, lmax] = lambda_extremes(adjoint(inst.map, u));
  (void)lmin;
  const double gap = inst.b.dot(u) - lmax;
  return {gap > 0, gap};
}

double support(const MomentMap& map, const Eigen::Ref<const Vector>& u) {
  return support_width(map, u).first;
}

std::pair<double, double> support_width(const MomentMap& map,
                                        const Eigen::Ref<const Vector>& u) {
  require_unit(u);
  const auto [lmin, lmax] = lambda_extremes(adjoint(map, u));
  return {lmax, lmax - lmin};
}

std::vector<Vector> boundary_sample(const MomentMap& map, const std::vector<Vector>& directions) {
  std::vector<Vector> points;
  points.reserve(directions.size());
  for (const auto& u : directions) {
    require_unit(u);
    const SpectralDecomposition sd = eigh(adjoint(map, u));
    const Vector v = sd.eigenvectors.col(map.n() - 1);  // ties: any top eigenvector is extreme
    points.push_back(apply(map, SymMatrix(v * v.transpose())));
  }
  return points;
}

RoundTrip gradient_map_roundtrip(const MomentMap& map, const Eigen::Ref<const Vector>& y,
                                 const SolverConfig& config) {
  RoundTrip out;
  out.image = apply(map, exp1(adjoint(map, y)).density.matrix);
  const SolveResult res = minimize(map, out.image, config);
  const auto* fr = std::get_if<FeasibleResult>(&res.outcome);
  if (!fr)
    throw std::runtime_error(std::string("gradient_map_roundtrip: solver returned ") +
                             to_string(verdict_of(res.outcome)));
  out.y_recovered = fr->y_star;
  out.y_error = (out.y_recovered - y).norm();
  return out;
}

MembershipReport decide(const Instance& inst, const SolverConfig& config) {
  config.validate();
  MembershipReport rep;

  // precondition() opens with the same full validation; running it twice
  // would double the Gram cost on flagged maps
  const auto t0 = std::chrono::steady_clock::now();
  PreconditionedInstance pre = precondition(inst);
  rep.precondition_seconds = seconds_since(t0);

  if (auto s = screen(pre.map, pre.b_hat)) {
    rep.quick_reject_reason = s->reason;
    try {
      InfeasibleBackmap bm = backmap_infeasible(pre.record, inst, s->separator_hat);
      rep.verdict = Verdict::Infeasible;
      rep.separator = bm.u;
      rep.gap = bm.gap_original;
      rep.certificate_verified = verify_infeasible(inst, bm.u).pass;
      return rep;
    } catch (const NotASeparator&) {
      // threshold-grazing reject; fall through and let the solver decide
      rep.quick_reject_reason += " (certificate too weak, solved instead)";
    }
  }

  // the solve runs in whitened coordinates, where residuals shrink by up to
  // ||W^-1|| on the way back; tighten the hat tolerance accordingly
  SolverConfig solve_cfg = config;
  const double back_norm = std::sqrt(pre.record.gram_centered_eigs.maxCoeff());
  solve_cfg.tol = std::max(config.tol / std::max(1.0, back_norm), 1e-13);

  const auto t1 = std::chrono::steady_clock::now();
  SolveResult res = minimize(pre.map, pre.b_hat, solve_cfg);
  rep.solve_seconds = seconds_since(t1);
  rep.verdict = verdict_of(res.outcome);
  rep.trace = std::move(res.trace);

  switch (rep.verdict) {
    case Verdict::Feasible: {
      const auto& fr = std::get<FeasibleResult>(res.outcome);
      rep.iterations = fr.iters;
      const FeasibleBackmap bm = backmap_feasible(pre.record, inst, fr.density);
      rep.density = bm.density;
      rep.residual = bm.residual_original;
      rep.duality = duality_check(fr.value, fr.density.spectrum);
      rep.certificate_verified = verify_feasible(inst, fr.density, 2 * config.tol).pass;
      break;
    }
    case Verdict::Infeasible: {
      const auto& ir = std::get<InfeasibleResult>(res.outcome);
      rep.iterations = ir.iters;
      const InfeasibleBackmap bm = backmap_infeasible(pre.record, inst, ir.u);
      rep.separator = bm.u;
      rep.gap = bm.gap_original;
      rep.certificate_verified = verify_infeasible(inst, bm.u).pass;
      break;
    }
    case Verdict::NotInterior: {
      const auto& nr = std::get<NotInteriorResult>(res.outcome);
      rep.iterations = nr.iters;
      rep.y_last = nr.y_last;  // whitened coordinates, evidence only
      rep.grad_norm = nr.grad_norm;
      rep.norm_bound = nr.norm_bound;
      break;
    }
    default: {
      const auto& dr = std::get<IndeterminateResult>(res.outcome);
      rep.iterations = dr.iters;
      rep.y_last = dr.y_last;
      rep.grad_norm = dr.grad_norm;
      rep.reason = dr.reason;
      rep.norm_bound = std::numeric_limits<double>::infinity();
      break;
    }
  }
  return rep;
}

}  // namespace momentbody
