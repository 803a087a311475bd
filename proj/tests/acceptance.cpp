// Acceptance gate. Each criterion prints exactly one PASS/FAIL line plus
// measured evidence; the process exits nonzero if any selected criterion
// failed. Run a single criterion with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "momentbody/instances.hpp"
#include "momentbody/logpart.hpp"
#include "momentbody/oracle.hpp"
#include "momentbody/precondition.hpp"
#include "momentbody/solver.hpp"
#include "oracles.hpp"

using namespace momentbody;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Index pick(std::mt19937_64& rng, Index lo, Index hi) {  // inclusive
  return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// 1. preconditioned outputs are traceless with identity Gram, quickly
Outcome criterion_1() {
  Outcome out;
  std::mt19937_64 rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_trace = 0.0, worst_gram = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = pick(rng, 2, 50);
    const Index m = pick(rng, 1, std::min<Index>(50, n * (n + 1) / 2 - 1));
    const Instance inst{oracles::random_map(n, m, rng), Vector::Zero(m), "c1"};
    const PreconditionedInstance pre = precondition(inst);
    for (const auto& mat : pre.map.mats)
      worst_trace = std::max(worst_trace, std::abs(mat.trace()));
    worst_gram = std::max(
        worst_gram,
        (gram(pre.map).mat() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(t0);
  out.pass = worst_trace <= 1e-10 && worst_gram <= 1e-8 && elapsed < 10.0;
  out.notes.push_back("100 raw maps, n <= 50, m <= 50");
  out.notes.push_back("worst |tr A_i| = " + num(worst_trace) + " (need <= 1e-10)");
  out.notes.push_back("worst ||G - I||_max = " + num(worst_gram) + " (need <= 1e-8)");
  out.notes.push_back("elapsed " + num(elapsed) + " s (need < 10)");
  return out;
}

// 2. the worked 3x3 pair: exact centering, same whitened span
Outcome criterion_2() {
  Outcome out;
  Matrix a1(3, 3), a2(3, 3);
  a1 << 6, 1, 0, 1, 2, 0, 0, 0, -2;
  a2 << -1, 0.5, 0, 0.5, 1, 0, 0, 0, 3;
  Instance inst;
  inst.map.mats.emplace_back(a1);
  inst.map.mats.emplace_back(a2);
  inst.b = Vector::Zero(2);
  inst.label = "worked";
  const PreconditionedInstance pre = precondition(inst);

  Matrix c1(3, 3), c2(3, 3);  // the centered pair, as printed
  c1 << 4, 1, 0, 1, 0, 0, 0, 0, -4;
  c2 << -2, 0.5, 0, 0.5, 0, 0, 0, 0, 2;
  const Matrix got1 = a1 - pre.record.trace_offsets[0] * Matrix::Identity(3, 3);
  const Matrix got2 = a2 - pre.record.trace_offsets[1] * Matrix::Identity(3, 3);
  const double centering_err =
      std::max((got1 - c1).cwiseAbs().maxCoeff(), (got2 - c2).cwiseAbs().maxCoeff());

  Matrix h1(3, 3), h2(3, 3);  // the whitened pair, as printed
  h1 << 0.5, 0.5, 0, 0.5, 0, 0, 0, 0, -0.5;
  h2 << -0.5, 0.5, 0, 0.5, 0, 0, 0, 0, 0.5;

  auto flat = [](const Matrix& m) {
    Vector v(9);
    for (Index r = 0; r < 3; ++r)
      for (Index c = 0; c < 3; ++c) v[r * 3 + c] = m(r, c);
    return v;
  };
  Matrix ours(9, 2), printed(9, 2);
  ours.col(0) = flat(pre.map.mats[0].mat());
  ours.col(1) = flat(pre.map.mats[1].mat());
  printed.col(0) = flat(h1);
  printed.col(1) = flat(h2);

  double span_err = 0.0;
  const auto qr_ours = ours.colPivHouseholderQr();
  const auto qr_printed = printed.colPivHouseholderQr();
  for (Index c = 0; c < 2; ++c) {
    const Vector v = printed.col(c);
    span_err = std::max(span_err, (ours * qr_ours.solve(v) - v).norm() / v.norm());
    const Vector w = ours.col(c);
    span_err = std::max(span_err, (printed * qr_printed.solve(w) - w).norm() / w.norm());
  }

  out.pass = centering_err == 0.0 && span_err <= 1e-10;
  out.notes.push_back("trace offsets = (" + num(pre.record.trace_offsets[0]) + ", " +
                      num(pre.record.trace_offsets[1]) + ")");
  out.notes.push_back("centering deviation = " + num(centering_err) + " (need exact 0)");
  out.notes.push_back("span projection residual = " + num(span_err) + " (need <= 1e-10)");
  return out;
}

// 3. gradient against central differences
Outcome criterion_3() {
  Outcome out;
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Index n = pick(rng, 2, 12);
    const Index m = pick(rng, 1, std::min<Index>(12, n * (n + 1) / 2 - 1));
    const MomentMap map = oracles::random_map(n, m, rng);
    const Vector b = oracles::random_vector(m, rng, 0.5);
    const Vector y = oracles::random_vector(m, rng, 0.5);
    const DualEval ev = eval(map, b, y);
    const Vector fd = oracles::fd_gradient(
        [&](const Vector& yy) { return eval(map, b, yy).value; }, y);
    worst = std::max(worst, (ev.gradient - fd).norm() / std::max(fd.norm(), 1.0));
  }
  out.pass = worst <= 1e-6;
  out.notes.push_back("20 random (map, b, y) triples, n <= 12");
  out.notes.push_back("worst relative gradient error = " + num(worst) + " (need <= 1e-6)");
  return out;
}

// 4. Hessian against the quadrature oracle and gradient differences
Outcome criterion_4() {
  Outcome out;
  std::mt19937_64 rng(404);
  double worst_bkm = 0.0, worst_fd = 0.0;
  double degenerate_gap = std::numeric_limits<double>::infinity();

  auto probe = [&](const MomentMap& map, const Vector& y) {
    const Index m = map.m();
    const DualEval ev = eval(map, Vector::Zero(m), y);
    const SymMatrix H = hessian(map, y);
    const Matrix bkm = oracles::bkm_hessian(map, ev.density.matrix);
    worst_bkm = std::max(worst_bkm, (H.mat() - bkm).cwiseAbs().maxCoeff());
    const Matrix fd = oracles::fd_hessian(
        [&](const Vector& yy) { return eval(map, Vector::Zero(m), yy).gradient; }, y);
    worst_fd = std::max(worst_fd, (H.mat() - fd).cwiseAbs().maxCoeff());
    return ev;
  };

  for (int k = 0; k < 9; ++k) {
    const Index n = pick(rng, 2, 10);
    const Index m = pick(rng, 1, std::min<Index>(8, n * (n + 1) / 2 - 1));
    probe(oracles::random_map(n, m, rng), oracles::random_vector(m, rng, 0.4));
  }

  // tenth point: two eigenvalues of A(y) split by 5e-9, so the density
  // spectrum is near-degenerate and the kernel is at its hardest
  const Matrix V = eigh(SymMatrix(oracles::random_symmetric(4, rng))).eigenvectors;
  Vector lam(4);
  lam << 0.3, 0.3 + 5e-9, -0.1, -0.5;
  MomentMap tricky;
  tricky.mats.emplace_back((V * lam.asDiagonal() * V.transpose()).eval());
  tricky.mats.emplace_back(oracles::random_symmetric(4, rng, 0.5));
  Vector y0(2);
  y0 << 1.0, 0.0;
  const DualEval tev = probe(tricky, y0);
  for (Index i = 0; i + 1 < tev.density.spectrum.size(); ++i)
    degenerate_gap =
        std::min(degenerate_gap, tev.density.spectrum[i + 1] - tev.density.spectrum[i]);

  out.pass = worst_bkm <= 1e-8 && worst_fd <= 1e-5 && degenerate_gap <= 1e-8;
  out.notes.push_back("10 points, one with spectral gap " + num(degenerate_gap) +
                      " in the density (need <= 1e-8)");
  out.notes.push_back("worst |H - quadrature|_max = " + num(worst_bkm) + " (need <= 1e-8)");
  out.notes.push_back("worst |H - finite diff|_max = " + num(worst_fd) + " (need <= 1e-5)");
  return out;
}

// 5. curvature bounds at random points, at zero, and at optima
Outcome criterion_5() {
  Outcome out;
  std::mt19937_64 rng(505);
  double worst_smooth = -std::numeric_limits<double>::infinity();
  double worst_zero_dev = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_lmin = 0.0, worst_bound = 0.0;
  int violations = 0, solved = 0;

  for (int k = 0; k < 50; ++k) {
    const Index n = pick(rng, 2, 30);
    const Index m = pick(rng, 1, std::min<Index>(30, n * (n + 1) / 2 - 1));
    const Instance inst = gen_random(n, m, 1000 + static_cast<std::uint64_t>(k));

    const Vector y = oracles::random_vector(m, rng, 0.7);
    worst_smooth = std::max(worst_smooth, lambda_extremes(hessian(inst.map, y)).second);

    const double lmin0 = lambda_extremes(hessian(inst.map, Vector::Zero(m))).first;
    worst_zero_dev = std::max(worst_zero_dev, std::abs(lmin0 - 1.0 / static_cast<double>(n)));

    const SolveResult res = minimize(inst.map, inst.b);
    const auto* fr = std::get_if<FeasibleResult>(&res.outcome);
    if (!fr) {
      out.pass = false;
      out.notes.push_back("instance " + inst.label + " did not reach a minimizer");
      continue;
    }
    ++solved;
    const double lmin_star = lambda_extremes(hessian(inst.map, fr->y_star)).first;
    const double bound = (1.0 - inst.b.norm()) - 1e-6;
    const double margin = lmin_star - bound;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_lmin = lmin_star;
      worst_bound = bound;
    }
    if (margin < 0) ++violations;
  }

  const bool pass_a = worst_smooth <= 0.5 + 1e-8;
  const bool pass_b = worst_zero_dev <= 1e-10;
  const bool pass_c = violations == 0;
  out.pass = out.pass && pass_a && pass_b && pass_c;
  out.notes.push_back("50 preconditioned instances, n <= 30");
  out.notes.push_back(std::string(pass_a ? "ok" : "VIOLATED") +
                      ": max lambda_max(H(y)) = " + num(worst_smooth) + " (need <= 0.5 + 1e-8)");
  out.notes.push_back(std::string(pass_b ? "ok" : "VIOLATED") +
                      ": max |lambda_min(H(0)) - 1/n| = " + num(worst_zero_dev) +
                      " (need <= 1e-10)");
  out.notes.push_back(std::string(pass_c ? "ok" : "VIOLATED") +
                      ": lambda_min(H(y*)) >= (1 - ||b||) - 1e-6 fails on " +
                      std::to_string(violations) + "/" + std::to_string(solved) +
                      " optima; worst lambda_min = " + num(worst_lmin) + " vs bound " +
                      num(worst_bound));
  if (!pass_c)
    out.notes.push_back(
        "the floor (1 - ||b||) exceeds the global ceiling 1/2 whenever ||b|| < 1/2 and "
        "exceeds lambda_min(H(0)) = 1/n at b = 0, so it cannot hold as stated; the "
        "measured curvature above is the actual strong-convexity modulus");
  return out;
}

// 6. ten near-boundary targets on the toy body, few iterations each
Outcome criterion_6() {
  Outcome out;
  const Instance base = gen_example_2_1();
  Vector center(2);
  center << 0.25, -0.25;  // center of the ellipse, interior

  std::vector<Vector> dirs;
  for (int j = 0; j < 10; ++j) {
    Vector u(2);
    u << std::cos(2 * std::numbers::pi * j / 10), std::sin(2 * std::numbers::pi * j / 10);
    dirs.push_back(u);
  }
  const std::vector<Vector> boundary = boundary_sample(base.map, dirs);

  int worst_iters = 0;
  double worst_resid = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  bool all_feasible = true;

  for (const Vector& x : boundary) {
    const Vector b = 0.96 * x + 0.04 * center;

    // sampled distance to the boundary (dense support sweep)
    for (int a = 0; a < 720; ++a) {
      Vector u(2);
      u << std::cos(2 * std::numbers::pi * a / 720), std::sin(2 * std::numbers::pi * a / 720);
      min_clearance = std::min(min_clearance, support(base.map, u) - u.dot(b));
    }

    Instance inst = base;
    inst.b = b;
    const PreconditionedInstance pre = precondition(inst);
    const SolveResult res = minimize(pre.map, pre.b_hat);
    const auto* fr = std::get_if<FeasibleResult>(&res.outcome);
    if (!fr) {
      all_feasible = false;
      continue;
    }
    worst_iters = std::max(worst_iters, fr->iters);
    worst_resid = std::max(worst_resid, fr->residual_norm);
  }

  out.pass = all_feasible && worst_iters <= 25 && worst_resid <= 1e-8 &&
             min_clearance >= 0.011;
  out.notes.push_back("10 targets at 96% of the way to the boundary");
  out.notes.push_back("sampled clearance >= " + num(min_clearance) + " (need >= 0.01)");
  out.notes.push_back("worst iterations = " + std::to_string(worst_iters) + " (need <= 25)");
  out.notes.push_back("worst gradient norm = " + num(worst_resid) + " (need <= 1e-8)");
  return out;
}

// 7. n = m = 300 in seconds, not minutes
Outcome criterion_7() {
  Outcome out;
  const Instance inst = gen_random(300, 300, 2026);
  const auto t0 = std::chrono::steady_clock::now();
  const MembershipReport rep = decide(inst);
  const double wall = seconds_since(t0);

  out.pass = rep.verdict == Verdict::Feasible && rep.certificate_verified &&
             rep.iterations <= 30 && rep.residual <= 1e-8 && wall <= 10.0;
  out.notes.push_back("n = m = 300, seed 2026");
  out.notes.push_back(std::string("verdict ") + to_string(rep.verdict) +
                      (rep.certificate_verified ? " (verified)" : " (NOT verified)"));
  out.notes.push_back("iterations = " + std::to_string(rep.iterations) + " (need <= 30)");
  out.notes.push_back("residual = " + num(rep.residual) + " (need <= 1e-8)");
  out.notes.push_back("wall = " + num(wall) + " s (need <= 10), precondition " +
                      num(rep.precondition_seconds) + " s + solve " +
                      num(rep.solve_seconds) + " s");
  return out;
}

// 8. every verdict ships a certificate that re-verifies
Outcome criterion_8() {
  Outcome out;
  std::mt19937_64 rng(808);
  int feasible_ok = 0, infeasible_ok = 0;
  std::string first_bad;

  for (int k = 0; k < 100; ++k) {
    const Index n = pick(rng, 2, 50);
    const Index m = pick(rng, 1, std::min<Index>(50, n * (n + 1) / 2 - 1));
    const Instance inst = gen_random(n, m, 3000 + static_cast<std::uint64_t>(k));
    const MembershipReport rep = decide(inst);
    const bool ok = rep.verdict == Verdict::Feasible && rep.density.has_value() &&
                    verify_feasible(inst, *rep.density, 2e-8).pass;
    feasible_ok += ok;
    if (!ok && first_bad.empty())
      first_bad = inst.label + " -> " + to_string(rep.verdict);
  }
  for (int k = 0; k < 100; ++k) {
    const Index n = pick(rng, 2, 50);
    const Index m = pick(rng, 1, std::min<Index>(50, n * (n + 1) / 2 - 1));
    const Instance inst = gen_infeasible(n, m, 4000 + static_cast<std::uint64_t>(k), 0.1);
    const MembershipReport rep = decide(inst);
    const bool ok = rep.verdict == Verdict::Infeasible && rep.separator.has_value() &&
                    rep.gap > 0 && verify_infeasible(inst, *rep.separator).pass;
    infeasible_ok += ok;
    if (!ok && first_bad.empty())
      first_bad = inst.label + " -> " + to_string(rep.verdict);
  }

  out.pass = feasible_ok == 100 && infeasible_ok == 100;
  out.notes.push_back("feasible certificates verified: " + std::to_string(feasible_ok) +
                      "/100 at eps = 2e-8");
  out.notes.push_back("infeasible certificates verified: " + std::to_string(infeasible_ok) +
                      "/100 with positive gap");
  if (!first_bad.empty()) out.notes.push_back("first failure: " + first_bad);
  return out;
}

// 9. minimum value equals the entropy of the optimal density
Outcome criterion_9() {
  Outcome out;
  std::mt19937_64 rng(909);
  double worst_mismatch = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  int solved = 0;

  for (int k = 0; k < 50; ++k) {
    const Index n = pick(rng, 2, 30);
    const Index m = pick(rng, 1, std::min<Index>(30, n * (n + 1) / 2 - 1));
    const Instance inst = gen_random(n, m, 5000 + static_cast<std::uint64_t>(k));
    const SolveResult res = minimize(inst.map, inst.b);
    const auto* fr = std::get_if<FeasibleResult>(&res.outcome);
    if (!fr) {
      out.pass = false;
      out.notes.push_back("instance " + inst.label + " did not reach a minimizer");
      continue;
    }
    ++solved;
    double entropy = 0.0;
    for (Index i = 0; i < fr->density.spectrum.size(); ++i)
      if (fr->density.spectrum[i] > 0)
        entropy -= fr->density.spectrum[i] * std::log(fr->density.spectrum[i]);
    worst_mismatch = std::max(worst_mismatch, std::abs(fr->value - entropy));
    lowest = std::min(lowest, fr->value);
    worst_excess = std::max(worst_excess, fr->value - std::log(static_cast<double>(n)));
  }

  out.pass = out.pass && worst_mismatch <= 1e-6 && lowest >= 0.0 && worst_excess <= 1e-9;
  out.notes.push_back(std::to_string(solved) + "/50 optima reached");
  out.notes.push_back("worst |f* - entropy(X*)| = " + num(worst_mismatch) + " (need <= 1e-6)");
  out.notes.push_back("min f* = " + num(lowest) + " (need >= 0), max f* - log n = " +
                      num(worst_excess) + " (need <= 1e-9)");
  return out;
}

// 10. radius, diameter, and thickness of the body, sampled
Outcome criterion_10() {
  Outcome out;
  std::mt19937_64 rng(1010);
  std::normal_distribution<double> gauss;
  double worst_radius = -std::numeric_limits<double>::infinity();
  double worst_thin = std::numeric_limits<double>::infinity();
  double worst_wide = -std::numeric_limits<double>::infinity();

  for (int t = 0; t < 10; ++t) {
    const Index n = pick(rng, 2, 30);
    const Index m = pick(rng, 1, std::min<Index>(30, n * (n + 1) / 2 - 1));
    const MomentMap map = gen_random(n, m, 6000 + static_cast<std::uint64_t>(t)).map;
    const double rad = std::sqrt((static_cast<double>(n) - 1.0) / static_cast<double>(n));
    const double thick = std::sqrt(static_cast<double>(n) /
                                   (static_cast<double>(n / 2) * static_cast<double>((n + 1) / 2)));

    Vector v(n);
    for (int s = 0; s < 1000; ++s) {
      for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
      v.normalize();
      const Vector x = apply(map, SymMatrix((v * v.transpose()).eval()));
      worst_radius = std::max(worst_radius, x.norm() - rad);
    }
    Vector u(m);
    for (int s = 0; s < 100; ++s) {
      for (Index i = 0; i < m; ++i) u[i] = gauss(rng);
      u.normalize();
      const double w = support_width(map, u).second;
      worst_thin = std::min(worst_thin, w - thick);
      worst_wide = std::max(worst_wide, w - std::numbers::sqrt2);
    }
  }

  out.pass = worst_radius <= 1e-10 && worst_thin >= -1e-10 && worst_wide <= 1e-10;
  out.notes.push_back("10 maps, 10^4 rank-one images, 10^3 width directions");
  out.notes.push_back("max ||A(vv')|| - sqrt((n-1)/n) = " + num(worst_radius) +
                      " (need <= 1e-10)");
  out.notes.push_back("min w(u) - thickness = " + num(worst_thin) + " (need >= -1e-10)");
  out.notes.push_back("max w(u) - sqrt(2) = " + num(worst_wide) + " (need <= 1e-10)");
  return out;
}

// 11. block evaluation agrees with the flat path, verdicts unchanged
Outcome criterion_11() {
  Outcome out;
  std::mt19937_64 rng(1111);
  double worst_eval = 0.0;
  int verdict_matches = 0, cases = 0;

  auto check = [&](const Instance& inst) {
    ++cases;
    const std::vector<MomentMap> parts = block_split(inst.map);
    MomentMap flat = inst.map;
    flat.blocks.clear();
    for (int t = 0; t < 5; ++t) {
      const Vector y = oracles::random_vector(inst.map.m(), rng, 0.6);
      const DualEval a = eval(flat, inst.b, y);
      const DualEval g = eval_block(parts, inst.b, y);
      worst_eval = std::max({worst_eval, std::abs(a.value - g.value),
                             (a.gradient - g.gradient).cwiseAbs().maxCoeff(),
                             std::abs(a.log_partition - g.log_partition)});
    }
    Instance stripped = inst;
    stripped.map.blocks.clear();
    if (decide(inst).verdict == decide(stripped).verdict) ++verdict_matches;
  };

  // the two-circle example with an interior target
  Instance two_circles = gen_example_2_2();
  Vector y0(3);
  y0 << 0.2, -0.3, 0.4;
  two_circles.b = apply(two_circles.map, exp1(adjoint(two_circles.map, y0)).density.matrix);
  check(two_circles);

  for (int k = 0; k < 20; ++k) {
    std::vector<Index> blocks;
    Index dim = 0;
    const int nb = 2 + static_cast<int>(rng() % 2);
    for (int p = 0; p < nb; ++p) {
      blocks.push_back(pick(rng, 2, 4));
      dim += blocks.back() * (blocks.back() + 1) / 2;
    }
    const Index m = pick(rng, 1, std::min<Index>(10, dim - 1));
    check(gen_random_block(blocks, m, 7000 + static_cast<std::uint64_t>(k)));
  }

  out.pass = worst_eval <= 1e-12 && verdict_matches == cases;
  out.notes.push_back("two-circle example plus 20 random block instances");
  out.notes.push_back("worst block-vs-flat evaluation gap = " + num(worst_eval) +
                      " (need <= 1e-12)");
  out.notes.push_back("verdicts identical on " + std::to_string(verdict_matches) + "/" +
                      std::to_string(cases));
  return out;
}

// 12. every boundary sample of the toy body lies on the ellipse or the vertex
Outcome criterion_12() {
  Outcome out;
  const MomentMap map = gen_example_2_1().map;
  Vector vertex(2);
  vertex << -0.5, 0.5;

  int on_ellipse = 0, on_vertex = 0, stray = 0;
  double worst_poly = 0.0;
  for (int a = 0; a < 360; ++a) {
    Vector u(2);
    u << std::cos(2 * std::numbers::pi * a / 360), std::sin(2 * std::numbers::pi * a / 360);
    const Vector x = boundary_sample(map, {u}).front();
    if ((x - vertex).norm() <= 1e-10) {
      ++on_vertex;
      continue;
    }
    const double poly =
        5 * x[0] * x[0] - 6 * x[0] * x[1] + 5 * x[1] * x[1] - 4 * x[0] + 4 * x[1];
    if (std::abs(poly) <= 1e-8) {
      ++on_ellipse;
      worst_poly = std::max(worst_poly, std::abs(poly));
    } else {
      ++stray;
    }
  }

  out.pass = stray == 0 && on_ellipse > 0 && on_vertex > 0;
  out.notes.push_back("360 directions: " + std::to_string(on_ellipse) + " on the ellipse, " +
                      std::to_string(on_vertex) + " at the vertex, " + std::to_string(stray) +
                      " unclassified");
  out.notes.push_back("worst ellipse polynomial residual = " + num(worst_poly) +
                      " (need <= 1e-8)");
  return out;
}

// 13. the gradient map is invertible in practice: image -> same y
Outcome criterion_13() {
  Outcome out;
  const MomentMap pmap = precondition(gen_example_2_1()).map;
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> radius(0.0, 2.0);

  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    Vector y = oracles::random_vector(2, rng);
    y *= radius(rng) / y.norm();
    const RoundTrip rt = gradient_map_roundtrip(pmap, y);
    worst = std::max(worst, rt.y_error);
  }

  out.pass = worst <= 1e-6;
  out.notes.push_back("50 draws with ||y|| <= 2 on the toy map");
  out.notes.push_back("worst ||y_recovered - y|| = " + num(worst) + " (need <= 1e-6)");
  return out;
}

using Criterion = Outcome (*)();
constexpr Criterion kCriteria[13] = {
    criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
    criterion_13};

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      which = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (which < 0 || which > 13) {
    std::cerr << "criterion number must be 1..13\n";
    return 2;
  }

  bool all_pass = true;
  for (int c = 1; c <= 13; ++c) {
    if (which != 0 && c != which) continue;
    Outcome out;
    try {
      out = kCriteria[c - 1]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c << ": " << (out.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& note : out.notes) std::cout << "  - " << note << "\n";
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
