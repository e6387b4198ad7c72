#pragma once

// Damped least-squares IK from a seed: an independent numerical oracle for the
// analytical solver.

#include "gen3lite/dh_kinematics.hpp"

namespace gen3lite::ik {

struct NumericOptions {
  double fd_step = 1e-6;
  double damping = 1e-3;
  int max_iterations = 500;
  double tolerance = 1e-8;
};

struct NumericResult {
  bool converged = false;
  JointAnglesd joints = JointAnglesd::Zero();
  /// Updates taken; 0 when the seed already satisfies the tolerance.
  int iterations = 0;
  double residual = 0;
};

/// Stacked pose error: p - p* followed by the entries of Q - Q* (column-major).
Eigen::Matrix<double, 12, 1> pose_error(const JointAnglesd& joints, const Posed& target,
                                        const DhChaind& chain);

/// Iterates dq = -(J^T J + damping^2 I)^-1 J^T e with a central-difference
/// Jacobian until fk_residual < tolerance. Joints are returned in (-pi, pi].
NumericResult numeric_ik(const Posed& target, const DhChaind& chain, const JointAnglesd& seed,
                         const NumericOptions& opts = {});

}  // namespace gen3lite::ik
