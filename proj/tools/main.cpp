#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "momentbody/instances.hpp"

namespace mb = momentbody;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

std::vector<mb::Index> parse_index_list(const std::string& csv) {
  std::vector<mb::Index> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(static_cast<mb::Index>(std::stoll(tok)));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoull(tok));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

// planar angles for m = 2, a Fibonacci sphere for m = 3
std::vector<mb::Vector> make_directions(mb::Index m, int count) {
  std::vector<mb::Vector> dirs;
  dirs.reserve(static_cast<size_t>(count));
  if (m == 2) {
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * std::numbers::pi * j / count;
      mb::Vector u(2);
      u << std::cos(th), std::sin(th);
      dirs.push_back(u);
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * j;
      mb::Vector u(3);
      u << r * std::cos(th), r * std::sin(th), z;
      dirs.push_back(u);
    }
  }
  return dirs;
}

void print_trace(const mb::IterationTrace& trace, std::ostream& os) {
  for (const auto& r : trace.records) {
    os << "  iter " << r.k << ": f = " << r.f << ", |grad| = " << r.grad_norm
       << ", |y| = " << r.y_norm << ", step = " << r.step << ", ls evals = " << r.ls_evals
       << "\n";
  }
  if (trace.spectral_bound_violations > 0)
    os << "  warning: spectrum of A(y) exceeded the sublevel-set bound on "
       << trace.spectral_bound_violations << " iterate(s)\n";
}

void print_report(const mb::MembershipReport& rep, std::ostream& os, bool verbose) {
  os << "verdict: " << mb::to_string(rep.verdict) << "\n";
  if (!rep.quick_reject_reason.empty())
    os << "quick reject: " << rep.quick_reject_reason << "\n";
  switch (rep.verdict) {
    case mb::Verdict::Feasible:
      os << "residual (original coordinates): " << rep.residual << "\n";
      if (rep.duality)
        os << "f* = " << rep.duality->f_star << ", entropy(X*) = " << rep.duality->entropy_of_x_star
           << ", mismatch = " << rep.duality->mismatch << "\n";
      break;
    case mb::Verdict::Infeasible:
      os << "separation gap: " << rep.gap << "\n";
      break;
    case mb::Verdict::NotInterior:
      os << "||y|| exceeded " << rep.norm_bound << " with |grad| = " << rep.grad_norm << "\n";
      break;
    default:
      os << "reason: " << rep.reason << " (|grad| = " << rep.grad_norm << ")\n";
  }
  os << "certificate verified: " << (rep.certificate_verified ? "yes" : "no") << "\n";
  os << "iterations: " << rep.iterations << ", precondition " << rep.precondition_seconds
     << " s, solve " << rep.solve_seconds << " s\n";
  if (verbose) print_trace(rep.trace, std::cerr);
}

int verdict_exit(mb::Verdict v) {
  switch (v) {
    case mb::Verdict::Feasible: return 0;
    case mb::Verdict::Infeasible: return 1;
    case mb::Verdict::NotInterior: return 2;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment body membership via the entropic dual"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write an instance file");
  std::string gen_kind = "random";
  mb::Index gen_n = 10, gen_m = 5;
  std::uint64_t gen_seed = 1;
  double gen_margin = 0.1;
  std::string gen_blocks, gen_target, gen_out;
  gen->add_option("--kind", gen_kind, "random | random-block | infeasible | example-2.1 | example-2.2")
      ->check(CLI::IsMember({"random", "random-block", "infeasible", "example-2.1", "example-2.2"}));
  gen->add_option("--n", gen_n, "matrix size");
  gen->add_option("--m", gen_m, "number of matrices");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--margin", gen_margin, "outward margin for --kind infeasible");
  gen->add_option("--blocks", gen_blocks, "comma-separated block sizes for --kind random-block");
  gen->add_option("--target", gen_target, "comma-separated b to store instead of the generated one");
  gen->add_option("--out", gen_out, "output instance file")->required();

  // precondition
  auto* pre = app.add_subcommand("precondition", "center and whiten an instance file");
  std::string pre_in, pre_out;
  pre->add_option("input", pre_in, "instance file")->required();
  pre->add_option("--out", pre_out, "output file (instance fields plus transform)")->required();

  // solve
  auto* sol = app.add_subcommand("solve", "decide membership for an instance file");
  std::string sol_in, sol_out, sol_format = "text";
  double sol_tol = 1e-8;
  int sol_max_iters = 0, sol_memory = 10;
  bool sol_nopre = false, sol_force = false, sol_verbose = false;
  sol->add_option("input", sol_in, "instance file")->required();
  sol->add_option("--tol", sol_tol, "gradient-norm tolerance");
  sol->add_option("--max-iters", sol_max_iters, "iteration budget (0: default)");
  sol->add_option("--memory", sol_memory, "L-BFGS history length");
  sol->add_option("--out", sol_out, "certificate file to write");
  sol->add_option("--format", sol_format, "text | json")->check(CLI::IsMember({"text", "json"}));
  sol->add_flag("--no-precondition", sol_nopre, "solve the map as stored, skip Algorithm 1");
  sol->add_flag("--force", sol_force, "with --no-precondition: accept maps without flags");
  sol->add_flag("--verbose", sol_verbose, "iteration trace to stderr");

  // verify
  auto* ver = app.add_subcommand("verify", "check a certificate against an instance");
  std::string ver_inst, ver_cert;
  double ver_eps = 2e-8;
  ver->add_option("instance", ver_inst, "instance file")->required();
  ver->add_option("certificate", ver_cert, "certificate file")->required();
  ver->add_option("--tol", ver_eps, "acceptance eps for feasibility certificates");

  // boundary
  auto* bnd = app.add_subcommand("boundary", "sample boundary points (m = 2 or 3)");
  std::string bnd_in, bnd_out;
  int bnd_count = 360;
  bool bnd_pre = false;
  bnd->add_option("input", bnd_in, "instance file")->required();
  bnd->add_option("--directions", bnd_count, "number of directions")
      ->check(CLI::PositiveNumber);
  bnd->add_option("--out", bnd_out, "CSV output file (default stdout)");
  bnd->add_flag("--preconditioned", bnd_pre, "sample the whitened body instead of the raw one");

  // bench
  auto* ben = app.add_subcommand("bench", "timing grid over random instances");
  std::string ben_sizes = "50,100,200", ben_seeds = "1,2,3", ben_out;
  double ben_tol = 1e-8;
  ben->add_option("--sizes", ben_sizes, "comma-separated n (= m) values");
  ben->add_option("--seeds", ben_seeds, "comma-separated seeds");
  ben->add_option("--tol", ben_tol, "gradient-norm tolerance");
  ben->add_option("--out", ben_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      mb::Instance inst;
      if (gen_kind == "random") {
        inst = mb::gen_random(gen_n, gen_m, gen_seed);
      } else if (gen_kind == "random-block") {
        const auto blocks = parse_index_list(gen_blocks);
        if (blocks.empty()) {
          std::cerr << "generate: --kind random-block needs --blocks\n";
          return kExitUsage;
        }
        inst = mb::gen_random_block(blocks, gen_m, gen_seed);
      } else if (gen_kind == "infeasible") {
        inst = mb::gen_infeasible(gen_n, gen_m, gen_seed, gen_margin);
      } else if (gen_kind == "example-2.1") {
        inst = mb::gen_example_2_1();
      } else {
        inst = mb::gen_example_2_2();
      }
      if (!gen_target.empty()) {
        const auto b = parse_double_list(gen_target);
        if (static_cast<mb::Index>(b.size()) != inst.map.m()) {
          std::cerr << "generate: --target needs " << inst.map.m() << " components\n";
          return kExitUsage;
        }
        inst.b = Eigen::Map<const mb::Vector>(b.data(), b.size());
      }
      mb::write_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << " (" << inst.label << ", n = " << inst.map.n()
                << ", m = " << inst.map.m() << ")\n";
      return 0;
    }

    if (*pre) {
      const mb::Instance inst = mb::read_instance(pre_in);
      const mb::PreconditionedInstance out = mb::precondition(inst);
      mb::write_preconditioned(out, pre_out);
      const auto& eigs = out.record.gram_centered_eigs;
      std::cout << "wrote " << pre_out << " (centered Gram spectrum in ["
                << eigs(0) << ", " << eigs(eigs.size() - 1) << "])\n";
      return 0;
    }

    if (*sol) {
      const mb::Instance inst = mb::read_instance(sol_in);
      mb::SolverConfig cfg;
      cfg.tol = sol_tol;
      cfg.max_iters = sol_max_iters;
      cfg.memory = sol_memory;
      cfg.record_trace = sol_verbose;

      mb::MembershipReport rep;
      if (sol_nopre) {
        // solve in the stored coordinates; certificates need no back-map
        cfg.allow_unpreconditioned = sol_force;
        mb::SolveResult res = mb::minimize(inst.map, inst.b, cfg);
        rep.verdict = mb::verdict_of(res.outcome);
        rep.trace = std::move(res.trace);
        if (const auto* fr = std::get_if<mb::FeasibleResult>(&res.outcome)) {
          rep.iterations = fr->iters;
          rep.density = fr->density;
          rep.residual = (mb::apply(inst.map, fr->density.matrix) - inst.b).norm();
          rep.certificate_verified = mb::verify_feasible(inst, fr->density, 2 * cfg.tol).pass;
          double entropy = 0.0;
          for (mb::Index k = 0; k < fr->density.spectrum.size(); ++k)
            if (fr->density.spectrum[k] > 0)
              entropy -= fr->density.spectrum[k] * std::log(fr->density.spectrum[k]);
          rep.duality = mb::DualityCheck{fr->value, entropy, std::abs(fr->value - entropy)};
        } else if (const auto* ir = std::get_if<mb::InfeasibleResult>(&res.outcome)) {
          rep.iterations = ir->iters;
          rep.separator = ir->u;
          rep.gap = ir->gap;
          rep.certificate_verified = mb::verify_infeasible(inst, ir->u).pass;
        } else if (const auto* nr = std::get_if<mb::NotInteriorResult>(&res.outcome)) {
          rep.iterations = nr->iters;
          rep.y_last = nr->y_last;
          rep.grad_norm = nr->grad_norm;
          rep.norm_bound = nr->norm_bound;
        } else {
          const auto& dr = std::get<mb::IndeterminateResult>(res.outcome);
          rep.iterations = dr.iters;
          rep.y_last = dr.y_last;
          rep.grad_norm = dr.grad_norm;
          rep.reason = dr.reason;
        }
      } else {
        rep = mb::decide(inst, cfg);
      }

      if (!sol_out.empty()) mb::write_certificate(rep, inst.label, sol_out);
      if (sol_format == "json") {
        const std::string tmp = sol_out.empty() ? "" : sol_out;
        if (tmp.empty()) {
          // no file requested: print the certificate JSON to stdout
          const auto path = std::filesystem::temp_directory_path() / "momentbody_cert.json";
          mb::write_certificate(rep, inst.label, path);
          std::ifstream in(path);
          std::cout << in.rdbuf();
          std::filesystem::remove(path);
        } else {
          std::ifstream in(tmp);
          std::cout << in.rdbuf();
        }
        if (sol_verbose) print_trace(rep.trace, std::cerr);
      } else {
        print_report(rep, std::cout, sol_verbose);
      }
      return verdict_exit(rep.verdict);
    }

    if (*ver) {
      const mb::Instance inst = mb::read_instance(ver_inst);
      std::string label;
      const mb::MembershipReport rep = mb::read_certificate(ver_cert, &label);
      if (!label.empty() && label != inst.label)
        std::cerr << "note: certificate was written for '" << label << "', instance is '"
                  << inst.label << "'\n";
      switch (rep.verdict) {
        case mb::Verdict::Feasible: {
          const auto check = mb::verify_feasible(inst, *rep.density, ver_eps);
          std::cout << (check.pass ? "PASS" : "FAIL") << ": residual = " << check.residual
                    << ", trace error = " << check.trace_error
                    << ", min eigenvalue = " << check.min_eigenvalue << "\n";
          return check.pass ? 0 : 1;
        }
        case mb::Verdict::Infeasible: {
          const auto check = mb::verify_infeasible(inst, *rep.separator);
          std::cout << (check.pass ? "PASS" : "FAIL") << ": separation gap = " << check.gap
                    << "\n";
          return check.pass ? 0 : 1;
        }
        default:
          std::cout << "certificate carries verdict " << mb::to_string(rep.verdict)
                    << "; nothing to verify\n";
          return 0;
      }
    }

    if (*bnd) {
      const mb::Instance inst = mb::read_instance(bnd_in);
      mb::MomentMap map = inst.map;
      if (bnd_pre) map = mb::precondition(inst).map;
      if (map.m() != 2 && map.m() != 3) {
        std::cerr << "boundary: need m = 2 or m = 3, got m = " << map.m() << "\n";
        return kExitUsage;
      }
      const auto dirs = make_directions(map.m(), bnd_count);
      const auto points = mb::boundary_sample(map, dirs);
      std::ostringstream csv;
      csv << std::setprecision(17);
      for (mb::Index i = 0; i < map.m(); ++i) csv << "u" << i + 1 << ",";
      csv << "h,w";
      for (mb::Index i = 0; i < map.m(); ++i) csv << ",x" << i + 1;
      csv << "\n";
      for (size_t j = 0; j < dirs.size(); ++j) {
        const auto [h, w] = mb::support_width(map, dirs[j]);
        for (mb::Index i = 0; i < map.m(); ++i) csv << dirs[j][i] << ",";
        csv << h << "," << w;
        for (mb::Index i = 0; i < map.m(); ++i) csv << "," << points[j][i];
        csv << "\n";
      }
      if (bnd_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(bnd_out);
        if (!out) throw mb::InvalidInput("cannot open " + bnd_out + " for writing");
        out << csv.str();
        std::cout << "wrote " << points.size() << " samples to " << bnd_out << "\n";
      }
      return 0;
    }

    if (*ben) {
      const auto sizes = parse_index_list(ben_sizes);
      const auto seeds = parse_seed_list(ben_seeds);
      if (sizes.empty() || seeds.empty()) {
        std::cerr << "bench: need nonempty --sizes and --seeds\n";
        return kExitUsage;
      }
      std::ostringstream csv;
      csv << "n,m,seed,verdict,iterations,precondition_seconds,solve_seconds,residual\n";
      for (const auto n : sizes) {
        for (const auto seed : seeds) {
          const mb::Instance inst = mb::gen_random(n, n, seed);
          mb::SolverConfig cfg;
          cfg.tol = ben_tol;
          const mb::MembershipReport rep = mb::decide(inst, cfg);
          csv << n << "," << n << "," << seed << "," << mb::to_string(rep.verdict) << ","
              << rep.iterations << "," << rep.precondition_seconds << "," << rep.solve_seconds
              << "," << rep.residual << "\n";
          std::cerr << "n = " << n << ", seed = " << seed << ": " << mb::to_string(rep.verdict)
                    << " in " << rep.iterations << " iterations, " << rep.solve_seconds << " s\n";
        }
      }
      if (ben_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(ben_out);
        if (!out) throw mb::InvalidInput("cannot open " + ben_out + " for writing");
        out << csv.str();
        std::cout << "wrote " << ben_out << "\n";
      }
      return 0;
    }
  } catch (const mb::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mb::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const mb::RankDeficient& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const mb::NotPreconditioned& e) {
    std::cerr << "error: " << e.what() << " (pass --force to override)\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
