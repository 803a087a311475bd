#include "momentbody/instances.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace momentbody {

namespace {

using json = nlohmann::ordered_json;

// Seeded gaussian source. mt19937_64 has a standard-fixed stream, and the
// Box-Muller step below keeps the double path explicit, so one seed means one
// instance for any compiler on this build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // (0, 1]
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Matrix gauss_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)  // row-major fill, part of the stream contract
      for (Index j = 0; j < cols; ++j) m(i, j) = gauss();
    return m;
  }

  Vector gauss_vector(Index len) {
    Vector v(len);
    for (Index i = 0; i < len; ++i) v[i] = gauss();
    return v;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void check_assumption(const PreconditionedInstance& pre) {
  const auto& eigs = pre.record.gram_centered_eigs;
  const double cond = eigs(eigs.size() - 1) / eigs(0);
  if (!(cond < 1e10))
    throw RankDeficient("generator: centered Gram condition " + std::to_string(cond));
}

// b as the image of a random interior density X = exp1(A(y)) with moderate
// ||y||, so the instance has a well-conditioned minimizer (namely y itself).
Vector interior_target(const MomentMap& map, Rng& rng) {
  Vector y = rng.gauss_vector(map.m());
  const double r = 0.5 + rng.uniform();
  y *= r / y.norm();
  const NormalizedExponential ne = exp1(adjoint(map, y));
  return apply(map, ne.density.matrix);
}

std::string block_tag(const std::vector<Index>& blocks) {
  std::string tag;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (i) tag += "x";
    tag += std::to_string(blocks[i]);
  }
  return tag;
}

}  // namespace

Instance gen_example_2_1() {
  Matrix a1(3, 3), a2(3, 3);
  a1 << 1, 1, 0, 1, 0, 0, 0, 0, -1;
  a2 << -1, 1, 0, 1, 0, 0, 0, 0, 1;
  Instance inst;
  inst.map.mats.emplace_back(0.5 * a1);
  inst.map.mats.emplace_back(0.5 * a2);
  inst.b = Vector::Zero(2);
  inst.label = "example-2.1";
  return inst;
}

Instance gen_example_2_2() {
  Matrix a1 = Matrix::Zero(4, 4), a2 = Matrix::Zero(4, 4), a3 = Matrix::Zero(4, 4);
  a1(0, 0) = 1; a1(1, 1) = -1; a1(2, 2) = 1; a1(3, 3) = -1;  // diag(J, J)
  a2(0, 1) = 1; a2(1, 0) = 1;                                // K on the first block
  a3(2, 3) = 1; a3(3, 2) = 1;                                // K on the second block
  Instance inst;
  inst.map.mats.emplace_back(a1);
  inst.map.mats.emplace_back(a2);
  inst.map.mats.emplace_back(a3);
  inst.map.blocks = {2, 2};
  inst.b = Vector::Zero(3);
  inst.label = "example-2.2";
  return inst;
}

Instance gen_random(Index n, Index m, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("gen_random: n must be at least 2");
  if (m < 1 || m > n * (n + 1) / 2 - 1)
    throw InvalidInput("gen_random: need 1 <= m <= n(n+1)/2 - 1");
  Rng rng(seed);

  Instance raw;
  raw.map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) raw.map.mats.emplace_back(rng.gauss_matrix(n, n));
  raw.b = Vector::Zero(m);
  raw.label = "random-n" + std::to_string(n) + "-m" + std::to_string(m) + "-seed" +
              std::to_string(seed);

  PreconditionedInstance pre = precondition(raw);
  check_assumption(pre);

  Instance out;
  out.map = pre.map;
  out.b = interior_target(out.map, rng);
  out.label = raw.label;
  return out;
}

Instance gen_random_block(const std::vector<Index>& blocks, Index m, std::uint64_t seed) {
  if (blocks.empty()) throw InvalidInput("gen_random_block: no blocks");
  Index n = 0;
  Index dim = 0;  // dimension of traceless block-diagonal symmetric matrices
  for (Index bsz : blocks) {
    if (bsz < 1) throw InvalidInput("gen_random_block: block sizes must be positive");
    n += bsz;
    dim += bsz * (bsz + 1) / 2;
  }
  dim -= 1;
  if (n < 2) throw InvalidInput("gen_random_block: total size must be at least 2");
  if (m < 1 || m > dim) throw InvalidInput("gen_random_block: m exceeds block-diagonal dimension");
  Rng rng(seed);

  Instance raw;
  raw.map.blocks = blocks;
  raw.map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) {
    Matrix a = Matrix::Zero(n, n);
    Index at = 0;
    for (Index bsz : blocks) {
      a.block(at, at, bsz, bsz) = rng.gauss_matrix(bsz, bsz);
      at += bsz;
    }
    raw.map.mats.emplace_back(a);
  }
  raw.b = Vector::Zero(m);
  raw.label = "random-block-" + block_tag(blocks) + "-m" + std::to_string(m) + "-seed" +
              std::to_string(seed);

  PreconditionedInstance pre = precondition(raw);
  check_assumption(pre);

  Instance out;
  out.map = pre.map;
  out.b = interior_target(out.map, rng);
  out.label = raw.label;
  return out;
}

Instance gen_infeasible(Index n, Index m, std::uint64_t seed, double margin) {
  if (n < 2) throw InvalidInput("gen_infeasible: n must be at least 2");
  if (m < 1 || m > n * (n + 1) / 2 - 1)
    throw InvalidInput("gen_infeasible: need 1 <= m <= n(n+1)/2 - 1");
  if (!(margin > -1.0) || !std::isfinite(margin))
    throw InvalidInput("gen_infeasible: margin must be finite and exceed -1");
  Rng rng(seed);

  Instance raw;
  raw.map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) raw.map.mats.emplace_back(rng.gauss_matrix(n, n));
  raw.b = Vector::Zero(m);

  PreconditionedInstance pre = precondition(raw);
  check_assumption(pre);

  Vector u = rng.gauss_vector(m);
  u /= u.norm();
  const SpectralDecomposition sd = eigh(adjoint(pre.map, u));
  const Vector v = sd.eigenvectors.col(n - 1);  // top eigenvector
  const Vector x = apply(pre.map, SymMatrix(v * v.transpose()));

  Instance out;
  out.map = pre.map;
  out.b = (1.0 + margin) * x;
  out.label = "infeasible-n" + std::to_string(n) + "-m" + std::to_string(m) + "-seed" +
              std::to_string(seed);
  if (margin > 0) {
    const double gap = out.b.dot(u) - sd.eigenvalues(n - 1);
    if (!(gap > 0))
      throw NotASeparator("gen_infeasible: generated point failed the support check");
  }
  return out;
}

namespace {

json matrices_to_json(const MomentMap& map) {
  json arr = json::array();
  for (const auto& a : map.mats) {
    json flat = json::array();
    for (Index i = 0; i < a.size(); ++i)
      for (Index j = 0; j < a.size(); ++j) flat.push_back(a(i, j));
    arr.push_back(std::move(flat));
  }
  return arr;
}

json vector_to_json(const Eigen::Ref<const Vector>& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_to_json(const Eigen::Ref<const Matrix>& m) {
  json flat = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Vector vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw InvalidInput(std::string("instance file: ") + what + " must be an array");
  Vector v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw InvalidInput(std::string("instance file: ") + what + " must be numeric");
    v[static_cast<Index>(i)] = arr[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& flat, Index rows, Index cols, const char* what) {
  const Vector v = vector_from_json(flat, what);
  if (v.size() != rows * cols)
    throw InvalidInput(std::string("instance file: ") + what + " has wrong length");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

json instance_to_json(const Instance& inst) {
  json j;
  j["schema_version"] = 1;
  j["n"] = inst.map.n();
  j["m"] = inst.map.m();
  j["matrices"] = matrices_to_json(inst.map);
  j["b"] = vector_to_json(inst.b);
  json blocks = json::array();
  for (Index bsz : inst.map.blocks) blocks.push_back(bsz);
  j["blocks"] = std::move(blocks);
  j["flags"] = {{"traceless", inst.map.traceless}, {"orthonormal", inst.map.orthonormal}};
  j["meta"] = {{"label", inst.label}, {"generator", "mt19937_64-boxmuller-v1"}};
  return j;
}

Instance instance_from_json(const json& j) {
  for (const char* key : {"schema_version", "n", "m", "matrices", "b", "flags"})
    if (!j.contains(key))
      throw InvalidInput(std::string("instance file: missing field '") + key + "'");
  if (j["schema_version"].get<int>() != 1)
    throw InvalidInput("instance file: unsupported schema_version");
  const Index n = j["n"].get<Index>();
  const Index m = j["m"].get<Index>();
  if (n < 1 || m < 1) throw InvalidInput("instance file: n and m must be positive");
  if (!j["matrices"].is_array() || static_cast<Index>(j["matrices"].size()) != m)
    throw InvalidInput("instance file: expected m matrices");

  Instance inst;
  inst.map.mats.reserve(m);
  for (Index i = 0; i < m; ++i) {
    Matrix a = matrix_from_json(j["matrices"][static_cast<size_t>(i)], n, n, "matrix");
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
      throw InvalidInput("instance file: matrix " + std::to_string(i) +
                         " asymmetric by " + std::to_string(asym));
    inst.map.mats.emplace_back(a);
  }
  inst.b = vector_from_json(j["b"], "b");
  if (inst.b.size() != m) throw InvalidInput("instance file: b has wrong length");
  if (j.contains("blocks"))
    for (const auto& bsz : j["blocks"]) inst.map.blocks.push_back(bsz.get<Index>());
  inst.map.traceless = j["flags"].value("traceless", false);
  inst.map.orthonormal = j["flags"].value("orthonormal", false);
  if (j.contains("meta") && j["meta"].contains("label"))
    inst.label = j["meta"]["label"].get<std::string>();
  validate(inst);
  return inst;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void dump_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  validate(inst);
  dump_file(instance_to_json(inst), path);
}

Instance read_instance(const std::filesystem::path& path) {
  try {
    return instance_from_json(parse_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_preconditioned(const PreconditionedInstance& pre, const std::filesystem::path& path) {
  Instance as_inst{pre.map, pre.b_hat, pre.label};
  validate(as_inst);
  json j = instance_to_json(as_inst);
  j["transform"] = {
      {"trace_offsets", vector_to_json(pre.record.trace_offsets)},
      {"whitener", matrix_to_json(pre.record.whitener)},
      {"whitener_inv", matrix_to_json(pre.record.whitener_inv)},
      {"gram_centered_eigs", vector_to_json(pre.record.gram_centered_eigs)},
      {"original_n", pre.record.original_n},
      {"original_m", pre.record.original_m},
  };
  dump_file(j, path);
}

PreconditionedInstance read_preconditioned(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    Instance inst = instance_from_json(j);
    if (!j.contains("transform")) throw InvalidInput("preconditioned file: missing transform");
    const json& t = j["transform"];
    PreconditionedInstance pre;
    pre.map = std::move(inst.map);
    pre.b_hat = std::move(inst.b);
    pre.label = std::move(inst.label);
    pre.record.original_n = t.at("original_n").get<Index>();
    pre.record.original_m = t.at("original_m").get<Index>();
    pre.record.trace_offsets = vector_from_json(t.at("trace_offsets"), "trace_offsets");
    pre.record.gram_centered_eigs =
        vector_from_json(t.at("gram_centered_eigs"), "gram_centered_eigs");
    const Index m = pre.record.original_m;
    pre.record.whitener = matrix_from_json(t.at("whitener"), m, m, "whitener");
    pre.record.whitener_inv = matrix_from_json(t.at("whitener_inv"), m, m, "whitener_inv");
    if (pre.record.trace_offsets.size() != m || pre.record.gram_centered_eigs.size() != m ||
        pre.record.original_n != pre.map.n() || m != pre.map.m())
      throw InvalidInput("preconditioned file: transform dimensions inconsistent");
    return pre;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_certificate(const MembershipReport& report, const std::string& instance_label,
                       const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["instance_label"] = instance_label;
  j["verdict"] = to_string(report.verdict);
  j["verified"] = report.certificate_verified;
  j["iterations"] = report.iterations;
  if (!report.quick_reject_reason.empty()) j["quick_reject_reason"] = report.quick_reject_reason;
  switch (report.verdict) {
    case Verdict::Feasible: {
      if (!report.density) throw InvalidInput("certificate: feasible report lacks density");
      json f;
      f["n"] = report.density->matrix.size();
      f["density"] = matrix_to_json(report.density->matrix.mat());
      f["spectrum"] = vector_to_json(report.density->spectrum);
      f["residual"] = report.residual;
      if (report.duality)
        f["duality"] = {{"f_star", report.duality->f_star},
                        {"entropy_of_x_star", report.duality->entropy_of_x_star},
                        {"mismatch", report.duality->mismatch}};
      j["feasible"] = std::move(f);
      break;
    }
    case Verdict::Infeasible: {
      if (!report.separator) throw InvalidInput("certificate: infeasible report lacks separator");
      j["infeasible"] = {{"u", vector_to_json(*report.separator)}, {"gap", report.gap}};
      break;
    }
    default: {
      json e;
      e["y_last"] = vector_to_json(report.y_last);
      e["grad_norm"] = report.grad_norm;
      if (std::isfinite(report.norm_bound)) e["norm_bound"] = report.norm_bound;
      if (!report.reason.empty()) e["reason"] = report.reason;
      j["evidence"] = std::move(e);
    }
  }
  j["timings"] = {{"precondition_seconds", report.precondition_seconds},
                  {"solve_seconds", report.solve_seconds}};
  dump_file(j, path);
}

MembershipReport read_certificate(const std::filesystem::path& path, std::string* instance_label) {
  const json j = parse_file(path);
  MembershipReport rep;
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw InvalidInput("certificate: unsupported schema_version");
    if (instance_label) *instance_label = j.value("instance_label", std::string());
    const std::string verdict = j.at("verdict").get<std::string>();
    rep.certificate_verified = j.value("verified", false);
    rep.iterations = j.value("iterations", 0);
    rep.quick_reject_reason = j.value("quick_reject_reason", std::string());
    if (verdict == "Feasible") {
      rep.verdict = Verdict::Feasible;
      const json& f = j.at("feasible");
      const Index n = f.at("n").get<Index>();
      DensityMatrix d;
      d.matrix = SymMatrix(matrix_from_json(f.at("density"), n, n, "density"));
      d.spectrum = vector_from_json(f.at("spectrum"), "spectrum");
      rep.density = std::move(d);
      rep.residual = f.at("residual").get<double>();
      if (f.contains("duality"))
        rep.duality = DualityCheck{f["duality"].at("f_star").get<double>(),
                                   f["duality"].at("entropy_of_x_star").get<double>(),
                                   f["duality"].at("mismatch").get<double>()};
    } else if (verdict == "Infeasible") {
      rep.verdict = Verdict::Infeasible;
      rep.separator = vector_from_json(j.at("infeasible").at("u"), "u");
      rep.gap = j.at("infeasible").at("gap").get<double>();
    } else if (verdict == "NotInterior" || verdict == "Indeterminate") {
      rep.verdict = verdict == "NotInterior" ? Verdict::NotInterior : Verdict::Indeterminate;
      const json& e = j.at("evidence");
      rep.y_last = vector_from_json(e.at("y_last"), "y_last");
      rep.grad_norm = e.at("grad_norm").get<double>();
      rep.norm_bound = e.value("norm_bound", std::numeric_limits<double>::infinity());
      rep.reason = e.value("reason", std::string());
    } else {
      throw InvalidInput("certificate: unknown verdict '" + verdict + "'");
    }
    if (j.contains("timings")) {
      rep.precondition_seconds = j["timings"].value("precondition_seconds", 0.0);
      rep.solve_seconds = j["timings"].value("solve_seconds", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return rep;
}

}  // namespace momentbody
