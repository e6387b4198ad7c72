#pragma once

// Seeded round-trip validation: random in-limit joints -> FK -> IK.

#include "gen3lite/dh_kinematics.hpp"
#include "gen3lite/ik_solver.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gen3lite {

/// Uniform sample inside the chain's joint limits.
JointAnglesd random_joints(std::mt19937_64& rng, const DhChaind& chain);

struct TrialFailure {
  int trial = 0;
  std::string reason;
};

struct ValidationSummary {
  int count = 0;
  int passed = 0;
  int failed = 0;
  /// Largest fk_residual over every returned solution.
  double worst_residual = 0;
  /// Largest distance from the sampled joints to the nearest returned solution.
  double worst_joint_error = 0;
  std::size_t max_solutions = 0;
  int oracle_converged = 0;
  int oracle_matched = 0;
  std::vector<TrialFailure> failures;  // ascending trial index
};

struct ValidationOptions {
  double joint_tol = 1e-6;
  double oracle_match_tol = 1e-4;
  /// Half-width of the uniform perturbation applied to the true joints to seed the oracle.
  double oracle_seed_spread = 0.3;
  ik::Options ik;
};

/// A trial passes when the sampled joints are among the solutions within
/// joint_tol, every solution has fk_residual < residual_max, there are at
/// most 16 solutions, and a converged oracle run matches some solution.
ValidationSummary run_validation(int count, std::uint64_t seed, const DhChaind& chain,
                                 const ValidationOptions& opts = {});

/// Plain-text summary; deterministic for a given summary.
std::string format_summary(const ValidationSummary& summary, std::uint64_t seed);

}  // namespace gen3lite
