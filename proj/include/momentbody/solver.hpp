#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "momentbody/logpart.hpp"

namespace momentbody {

struct SolverConfig {
  double tol = 1e-8;        // gradient-norm target
  int max_iters = 0;        // 0 resolves to min(10 n^3, 100000)
  int memory = 10;          // L-BFGS history length
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_linesearch = 40;  // function evaluations per line search
  double norm_guard_factor = 1.0;  // multiplies sqrt(n) log(1/(1-||b||))

  // The norm guard alone misfires on perfectly feasible data (the bound it
  // checks is not valid for interior targets), so it only fires together
  // with a stall: at least stall_window accepted steps during which the
  // gradient norm improved by less than stall_decay and ||y|| grew.
  int stall_window = 20;
  double stall_decay = 1.3;

  bool allow_unpreconditioned = false;
  bool record_trace = false;

  void validate() const;  // throws InvalidConfig
  int resolved_max_iters(Index n) const;
};

struct FeasibleResult {
  Vector y_star;
  DensityMatrix density;
  double residual_norm = 0.0;
  double value = 0.0;
  int iters = 0;
};

struct InfeasibleResult {
  Vector u;  // unit separator
  double gap = 0.0;
  int iters = 0;
};

struct NotInteriorResult {
  Vector y_last;
  double grad_norm = 0.0;
  double norm_bound = 0.0;
  int iters = 0;
};

struct IndeterminateResult {
  Vector y_last;
  double grad_norm = 0.0;
  int iters = 0;
  std::string reason;
};

using SolveOutcome =
    std::variant<FeasibleResult, InfeasibleResult, NotInteriorResult, IndeterminateResult>;

enum class Verdict { Feasible, Infeasible, NotInterior, Indeterminate };

Verdict verdict_of(const SolveOutcome& outcome);
const char* to_string(Verdict v);

struct IterationRecord {
  int k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double y_norm = 0.0;
  double step = 0.0;
  int ls_evals = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;  // filled when record_trace is set
  int spectral_bound_violations = 0;     // |lambda| beyond 2(n-1)log(n)/n on the path
};

struct SolveResult {
  SolveOutcome outcome;
  IterationTrace trace;
};

// L-BFGS curvature-pair store with the two-loop recursion inputs cached.
class LbfgsHistory {
 public:
  explicit LbfgsHistory(int capacity);

  // false when the pair is dropped by the curvature safeguard
  // s'y <= 1e-10 ||s|| ||y||.
  bool push(const Vector& s, const Vector& yv);
  void clear();
  int size() const { return static_cast<int>(pairs_.size()); }

  struct Pair {
    Vector s;
    Vector y;
    double rho;  // 1/(s'y)
  };
  const std::deque<Pair>& pairs() const { return pairs_; }

 private:
  int capacity_;
  std::deque<Pair> pairs_;
};

// Two-loop recursion. Empty history gives -grad.
Vector two_loop_direction(const LbfgsHistory& history, const Eigen::Ref<const Vector>& grad);

// Callback contract for the line search: full objective value and gradient at
// an arbitrary point.
using ValueGrad = std::function<std::pair<double, Vector>(const Vector&)>;

struct LineSearchResult {
  double step = 0.0;
  int evals = 0;
  bool strong_wolfe = false;  // both conditions met at `step`
  bool decreased = false;     // f(y + step d) < f(y); false means total failure
};

// Strong Wolfe search along y + t d (bracket and zoom). On budget exhaustion
// falls back to the best strictly decreasing step seen. A trial with
// f < early_accept_threshold is accepted immediately.
LineSearchResult wolfe_linesearch(
    const ValueGrad& fg, const Vector& y, const Vector& direction, double f0, const Vector& g0,
    const SolverConfig& config,
    double early_accept_threshold = -std::numeric_limits<double>::infinity());

// Minimizes f(y) = log tr exp A(y) - b'y from y = 0. Termination, first
// trigger wins, checked after every accepted step:
//   f < 0                 -> Infeasible (u = y/||y||, gap re-verified)
//   ||grad|| <= tol       -> Feasible
//   norm guard + stall    -> NotInterior
//   budget exhausted      -> Indeterminate
// Requires the map's traceless+orthonormal flags unless
// config.allow_unpreconditioned is set.
SolveResult minimize(const MomentMap& map, const Eigen::Ref<const Vector>& b,
                     const SolverConfig& config = {});

}  // namespace momentbody
