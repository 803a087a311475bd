#include "momentbody/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace momentbody {

void SolverConfig::validate() const {
  if (!(tol > 0)) throw InvalidConfig("config: tol must be positive");
  if (max_iters < 0) throw InvalidConfig("config: max_iters must be nonnegative");
  if (memory < 1) throw InvalidConfig("config: memory must be at least 1");
  if (!(0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1))
    throw InvalidConfig("config: need 0 < c1 < c2 < 1");
  if (max_linesearch < 1) throw InvalidConfig("config: max_linesearch must be at least 1");
  if (!(norm_guard_factor > 0)) throw InvalidConfig("config: norm_guard_factor must be positive");
  if (stall_window < 1) throw InvalidConfig("config: stall_window must be at least 1");
  if (!(stall_decay > 1.0)) throw InvalidConfig("config: stall_decay must exceed 1");
}

int SolverConfig::resolved_max_iters(Index n) const {
  if (max_iters > 0) return max_iters;
  const double def = 10.0 * static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n);
  return static_cast<int>(std::min(def, 100000.0));
}

Verdict verdict_of(const SolveOutcome& outcome) {
  switch (outcome.index()) {
    case 0: return Verdict::Feasible;
    case 1: return Verdict::Infeasible;
    case 2: return Verdict::NotInterior;
    default: return Verdict::Indeterminate;
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "Feasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::NotInterior: return "NotInterior";
    default: return "Indeterminate";
  }
}

LbfgsHistory::LbfgsHistory(int capacity) : capacity_(std::max(1, capacity)) {}

bool LbfgsHistory::push(const Vector& s, const Vector& yv) {
  const double sy = s.dot(yv);
  if (sy <= 1e-10 * s.norm() * yv.norm()) return false;  // curvature safeguard
  if (static_cast<int>(pairs_.size()) == capacity_) pairs_.pop_front();
  pairs_.push_back({s, yv, 1.0 / sy});
  return true;
}

void LbfgsHistory::clear() { pairs_.clear(); }

Vector two_loop_direction(const LbfgsHistory& history, const Eigen::Ref<const Vector>& grad) {
  const auto& pairs = history.pairs();
  if (pairs.empty()) return -grad;

  Vector q = grad;
  std::vector<double> alpha(pairs.size());
  for (size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const auto& last = pairs.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  Vector r = gamma * q;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(r);
    r += (alpha[i] - beta) * pairs[i].s;
  }
  return -r;
}

namespace {

struct Probe {
  double t;
  double f;
  double slope;  // directional derivative g'd
};

}  // namespace

LineSearchResult wolfe_linesearch(const ValueGrad& fg, const Vector& y, const Vector& direction,
                                  double f0, const Vector& g0, const SolverConfig& config,
                                  double early_accept_threshold) {
  const double dphi0 = g0.dot(direction);
  if (!(dphi0 < 0)) throw InvalidInput("line search: not a descent direction");

  LineSearchResult res;
  double best_t = 0.0;
  double best_f = f0;

  auto probe = [&](double t) {
    auto [f, g] = fg(y + t * direction);
    ++res.evals;
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
    return Probe{t, f, g.dot(direction)};
  };
  auto armijo = [&](const Probe& p) { return p.f <= f0 + config.wolfe_c1 * p.t * dphi0; };
  auto curvature = [&](const Probe& p) { return std::abs(p.slope) <= -config.wolfe_c2 * dphi0; };
  auto finish = [&](double t, bool wolfe_ok) {
    res.step = t;
    res.strong_wolfe = wolfe_ok;
    res.decreased = true;
    return res;
  };
  auto give_up = [&]() {
    if (best_t > 0.0 && best_f < f0) return finish(best_t, false);
    res.step = 0.0;
    res.decreased = false;
    return res;
  };

  // zoom keeps a bracket [lo, hi] (not ordered in t) with lo the best
  // Armijo-passing end so far
  auto zoom = [&](Probe lo, Probe hi) {
    while (res.evals < config.max_linesearch) {
      const double dt = hi.t - lo.t;
      double t = lo.t + 0.5 * dt;  // bisection fallback
      const double denom = 2.0 * (hi.f - lo.f - lo.slope * dt);
      if (std::isfinite(denom) && denom != 0.0) {
        const double tq = lo.t - lo.slope * dt * dt / denom;
        const double lo_guard = lo.t + 0.1 * dt;
        const double hi_guard = hi.t - 0.1 * dt;
        const double lose = std::min(lo_guard, hi_guard);
        const double hise = std::max(lo_guard, hi_guard);
        if (tq >= lose && tq <= hise) t = tq;
      }
      const Probe p = probe(t);
      if (p.f < early_accept_threshold) return finish(p.t, false);
      if (!armijo(p) || p.f >= lo.f) {
        hi = p;
      } else {
        if (curvature(p)) return finish(p.t, true);
        if (p.slope * (hi.t - lo.t) >= 0) hi = lo;
        lo = p;
      }
      if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, std::abs(lo.t))) break;
    }
    return give_up();
  };

  Probe prev{0.0, f0, dphi0};
  double t = 1.0;
  while (res.evals < config.max_linesearch) {
    const Probe p = probe(t);
    if (p.f < early_accept_threshold) return finish(p.t, false);
    if (!armijo(p) || (res.evals > 1 && p.f >= prev.f)) return zoom(prev, p);
    if (curvature(p)) return finish(p.t, true);
    if (p.slope >= 0) return zoom(p, prev);
    prev = p;
    t *= 2.0;
    if (t > 1e15) break;
  }
  return give_up();
}

SolveResult minimize(const MomentMap& map, const Eigen::Ref<const Vector>& b,
                     const SolverConfig& config) {
  config.validate();
  if (!(map.traceless && map.orthonormal) && !config.allow_unpreconditioned)
    throw NotPreconditioned("minimize: map must carry traceless+orthonormal flags");
  if (b.size() != map.m()) throw InvalidInput("minimize: b has wrong length");
  if (!b.allFinite()) throw InvalidInput("minimize: b must be finite");

  const Index n = map.n();
  const int max_it = config.resolved_max_iters(n);
  const double bnorm = b.norm();
  const bool guard_active = bnorm < 1.0;
  const double norm_bound =
      guard_active ? config.norm_guard_factor * std::sqrt(static_cast<double>(n)) *
                         std::log(1.0 / (1.0 - bnorm))
                   : std::numeric_limits<double>::infinity();
  const double spectral_bound =
      n >= 2 ? 2.0 * static_cast<double>(n - 1) * std::log(static_cast<double>(n)) /
                   static_cast<double>(n)
             : std::numeric_limits<double>::infinity();

  SolveResult out;
  IterationTrace& trace = out.trace;

  // block-diagonal maps are evaluated per block (same math, cheaper eigendecompositions)
  const std::vector<MomentMap> parts =
      map.blocks.empty() ? std::vector<MomentMap>{} : block_split(map);
  auto evaluate = [&](const Vector& yt) -> DualEval {
    return parts.empty() ? eval(map, b, yt) : eval_block(parts, b, yt);
  };

  std::deque<std::pair<Vector, DualEval>> cache;
  const ValueGrad fg = [&](const Vector& yt) -> std::pair<double, Vector> {
    DualEval e = evaluate(yt);
    std::pair<double, Vector> fv{e.value, e.gradient};
    cache.emplace_back(yt, std::move(e));
    if (cache.size() > 4) cache.pop_front();
    return fv;
  };
  auto cached_eval = [&](const Vector& yt) -> DualEval {
    for (auto it = cache.rbegin(); it != cache.rend(); ++it)
      if (it->first.size() == yt.size() && (it->first.array() == yt.array()).all())
        return it->second;
    return evaluate(yt);
  };

  Vector y = Vector::Zero(map.m());
  DualEval ev = evaluate(y);

  std::vector<double> grad_norms;
  std::vector<double> y_norms;
  grad_norms.reserve(64);
  y_norms.reserve(64);

  LbfgsHistory history(config.memory);
  int iters = 0;
  bool steepest_retry_used = false;

  auto monitor = [&](const DualEval& e) {
    if (e.spectrum.cwiseAbs().maxCoeff() > spectral_bound) ++trace.spectral_bound_violations;
  };
  monitor(ev);

  while (true) {
    const double gn = ev.gradient.norm();
    const double yn = y.norm();
    grad_norms.push_back(gn);
    y_norms.push_back(yn);

    if (ev.value < 0) {
      // f < 0 certifies infeasibility; re-verify the separator independently
      Vector u = y / yn;
      const auto [lmin, lmax] = lambda_extremes(adjoint(map, u));
      (void)lmin;
      const double gap = b.dot(u) - lmax;
      if (gap > 0) {
        out.outcome = InfeasibleResult{u, gap, iters};
        return out;
      }
      out.outcome = IndeterminateResult{y, gn, iters, "negative value but separator failed re-verification"};
      return out;
    }
    if (gn <= config.tol) {
      out.outcome = FeasibleResult{y, ev.density, gn, ev.value, iters};
      return out;
    }
    if (guard_active && yn > norm_bound && iters >= config.stall_window) {
      // the norm bound alone is not trustworthy for interior targets; require
      // the weak-feasibility signature too (drifting ||y||, slow decay)
      const size_t back = grad_norms.size() - 1 - config.stall_window;
      const bool grad_stalled = grad_norms[back] < config.stall_decay * gn;
      const bool drifting = y_norms[back] < yn;
      if (grad_stalled && drifting) {
        // drift can also mean b sits strictly outside; the gradient limit
        // b - A(X) then points along a separating direction, so certify that
        // before settling for the weak verdict
        const Vector u = -ev.gradient / gn;
        const auto [lmin, lmax] = lambda_extremes(adjoint(map, u));
        (void)lmin;
        const double gap = b.dot(u) - lmax;
        if (gap > 1e-8) {
          out.outcome = InfeasibleResult{u, gap, iters};
          return out;
        }
        out.outcome = NotInteriorResult{y, gn, norm_bound, iters};
        return out;
      }
    }
    if (iters >= max_it) {
      out.outcome = IndeterminateResult{y, gn, iters, "iteration budget exhausted"};
      return out;
    }

    Vector d = two_loop_direction(history, ev.gradient);
    if (!(d.dot(ev.gradient) < 0)) {
      history.clear();
      d = -ev.gradient;
    }

    LineSearchResult ls = wolfe_linesearch(fg, y, d, ev.value, ev.gradient, config, 0.0);
    if (!ls.decreased) {
      if (!steepest_retry_used && history.size() > 0) {
        steepest_retry_used = true;
        history.clear();
        d = -ev.gradient;
        ls = wolfe_linesearch(fg, y, d, ev.value, ev.gradient, config, 0.0);
      }
      if (!ls.decreased) {
        out.outcome = IndeterminateResult{y, gn, iters, "line search failed"};
        return out;
      }
    }

    const Vector y_next = y + ls.step * d;
    DualEval ev_next = cached_eval(y_next);
    history.push(y_next - y, ev_next.gradient - ev.gradient);
    y = y_next;
    ev = std::move(ev_next);
    ++iters;
    monitor(ev);
    if (config.record_trace)
      trace.records.push_back(
          {iters, ev.value, ev.gradient.norm(), y.norm(), ls.step, ls.evals});
  }
}

}  // namespace momentbody
