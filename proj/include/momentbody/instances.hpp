#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "momentbody/oracle.hpp"

namespace momentbody {

// Hand-written fixtures with exact dyadic entries, raw coordinates, b = 0
// (callers overwrite b).
Instance gen_example_2_1();  // n=3, m=2, hull of an ellipse and a point
Instance gen_example_2_2();  // n=4, m=3, blocks (2,2), hull of two circles

// Seeded random instance, already centered and whitened. b is the image of a
// random density X = exp1(A(y)) with ||y|| in [0.5, 1.5], so the instance is
// interior-feasible with a well-conditioned optimum by construction.
Instance gen_random(Index n, Index m, std::uint64_t seed);

// Same construction with block-diagonal matrices; preconditioning is joint
// and keeps the declared blocks.
Instance gen_random_block(const std::vector<Index>& blocks, Index m, std::uint64_t seed);

// b = (1 + margin) * boundary point along a random direction. margin > 0
// gives a certified-infeasible instance, margin = 0 a boundary one.
Instance gen_infeasible(Index n, Index m, std::uint64_t seed, double margin = 0.1);

void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

// Instance plus the transform that produced it, one file.
void write_preconditioned(const PreconditionedInstance& pre, const std::filesystem::path& path);
PreconditionedInstance read_preconditioned(const std::filesystem::path& path);

void write_certificate(const MembershipReport& report, const std::string& instance_label,
                       const std::filesystem::path& path);
MembershipReport read_certificate(const std::filesystem::path& path,
                                  std::string* instance_label = nullptr);

}  // namespace momentbody
