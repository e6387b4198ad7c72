#include "gen3lite/numeric_ik.hpp"

#include "gen3lite/ik_solver.hpp"

#include <cmath>

namespace gen3lite::ik {

using Error = Eigen::Matrix<double, 12, 1>;

Error pose_error(const JointAnglesd& joints, const Posed& target, const DhChaind& chain) {
  const Posed pose = forward_kinematics(joints, chain);
  Error e;
  e.head<3>() = pose.p - target.p;
  e.tail<9>() = (pose.Q - target.Q).reshaped();
  return e;
}

NumericResult numeric_ik(const Posed& target, const DhChaind& chain, const JointAnglesd& seed,
                         const NumericOptions& opts) {
  NumericResult out;
  out.joints = normalize_angles(seed);
  out.residual = fk_residual(out.joints, target, chain);
  const double lambda2 = opts.damping * opts.damping;

  while (out.residual >= opts.tolerance && out.iterations < opts.max_iterations) {
    Eigen::Matrix<double, 12, 6> jac;
    for (int j = 0; j < 6; ++j) {
      JointAnglesd hi = out.joints, lo = out.joints;
      hi[j] += opts.fd_step;
      lo[j] -= opts.fd_step;
      jac.col(j) = (pose_error(hi, target, chain) - pose_error(lo, target, chain)) / (2 * opts.fd_step);
    }
    const Error e = pose_error(out.joints, target, chain);
    const Eigen::Matrix<double, 6, 6> normal =
        jac.transpose() * jac + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    const JointAnglesd step = normal.ldlt().solve(-jac.transpose() * e);
    if (!step.allFinite()) break;
    out.joints = normalize_angles(JointAnglesd(out.joints + step));
    out.residual = fk_residual(out.joints, target, chain);
    ++out.iterations;
  }
  out.converged = out.residual < opts.tolerance;
  return out;
}

}  // namespace gen3lite::ik
