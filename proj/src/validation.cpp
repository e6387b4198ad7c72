#include "gen3lite/validation.hpp"

#include "gen3lite/numeric_ik.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gen3lite {

JointAnglesd random_joints(std::mt19937_64& rng, const DhChaind& chain) {
  JointAnglesd q;
  for (int i = 0; i < 6; ++i) {
    std::uniform_real_distribution<double> dist(chain.lower[i], chain.upper[i]);
    q[i] = dist(rng);
  }
  return q;
}

ValidationSummary run_validation(int count, std::uint64_t seed, const DhChaind& chain,
                                 const ValidationOptions& opts) {
  if (count <= 0) throw std::invalid_argument("validation: count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(-opts.oracle_seed_spread, opts.oracle_seed_spread);

  ValidationSummary summary;
  summary.count = count;
  for (int trial = 0; trial < count; ++trial) {
    const JointAnglesd truth = random_joints(rng, chain);
    JointAnglesd seed_joints = truth;
    for (int i = 0; i < 6; ++i) seed_joints[i] += spread(rng);

    const Posed pose = forward_kinematics(truth, chain);
    const ik::SolutionSet set = ik::solve_ik(pose, chain, opts.ik);

    std::vector<std::string> problems;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& s : set.all) {
      nearest = std::min(nearest, max_joint_distance(s.joints, truth));
      summary.worst_residual = std::max(summary.worst_residual, s.residual);
      if (!(s.residual < opts.ik.residual_max)) problems.push_back("solution residual above limit");
    }
    summary.worst_joint_error = std::max(summary.worst_joint_error, nearest);
    summary.max_solutions = std::max(summary.max_solutions, set.all.size());
    if (!(nearest <= opts.joint_tol)) problems.push_back("sampled joints not recovered");
    if (set.all.size() > 16) problems.push_back("more than 16 solutions");

    const ik::NumericResult oracle = ik::numeric_ik(pose, chain, seed_joints);
    if (oracle.converged) {
      ++summary.oracle_converged;
      const bool matched = std::any_of(set.all.begin(), set.all.end(), [&](const auto& s) {
        return max_joint_distance(s.joints, oracle.joints) <= opts.oracle_match_tol;
      });
      if (matched) {
        ++summary.oracle_matched;
      } else {
        problems.push_back("oracle solution missing from analytical set");
      }
    }

    if (problems.empty()) {
      ++summary.passed;
    } else {
      ++summary.failed;
      std::string reason = problems.front();
      for (std::size_t k = 1; k < problems.size(); ++k) reason += "; " + problems[k];
      summary.failures.push_back({trial, reason});
    }
  }
  return summary;
}

std::string format_summary(const ValidationSummary& summary, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(3);
  os << "seed " << seed << ": " << summary.passed << "/" << summary.count << " round trips passed\n";
  os << std::scientific;
  os << "worst residual " << summary.worst_residual << ", worst joint error "
     << summary.worst_joint_error << "\n";
  os << "max solutions per pose " << summary.max_solutions << "\n";
  os << "oracle: " << summary.oracle_matched << "/" << summary.oracle_converged
     << " converged runs matched\n";
  for (const auto& f : summary.failures) os << "trial " << f.trial << ": " << f.reason << "\n";
  return os.str();
}

}  // namespace gen3lite
