#pragma once

// Denavit-Hartenberg primitives and forward kinematics for the Gen3 Lite 6R
// chain. Everything here is templated on the scalar type and header-only.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gen3lite {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

/// Joint values theta_1..theta_6 in radians, in the robot's joint convention
/// (the one the joint limits refer to).
template <typename Scalar>
using JointAngles = Vector6<Scalar>;

using JointAnglesd = JointAngles<double>;
using Vector3d = Vector3<double>;
using Matrix3d = Matrix3<double>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar x) {
  using std::remainder;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar y = remainder(x, two_pi);
  if (y <= -std::numbers::pi_v<Scalar>) y += two_pi;
  return y;
}

template <typename Derived>
typename Derived::PlainObject normalize_angles(const Eigen::MatrixBase<Derived>& v) {
  typename Derived::PlainObject out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normalize_angle(out[i]);
  return out;
}

/// Absolute difference of two angles modulo 2 pi.
template <typename Scalar>
Scalar angle_distance(Scalar a, Scalar b) {
  using std::abs;
  return abs(normalize_angle(a - b));
}

/// Largest per-joint wrapped difference.
template <typename Scalar>
Scalar max_joint_distance(const JointAngles<Scalar>& a, const JointAngles<Scalar>& b) {
  Scalar worst(0);
  for (int i = 0; i < 6; ++i) worst = std::max(worst, angle_distance(a[i], b[i]));
  return worst;
}

/// Six-link DH table with joint limits.
///
/// Link i maps frame i to frame i+1 through a rotation theta_i about z and a
/// twist alpha_i about x, with offset vector (a_i cos theta_i, a_i sin theta_i,
/// b_i). The DH angle of joint i is `joint[i] + offset[i]`; limits apply to
/// the joint value, not the DH angle. `base` translates frame 1 in the world.
template <typename Scalar>
struct DhChain {
  Vector6<Scalar> a = Vector6<Scalar>::Zero();
  Vector6<Scalar> b = Vector6<Scalar>::Zero();
  Vector6<Scalar> alpha = Vector6<Scalar>::Zero();
  Vector6<Scalar> offset = Vector6<Scalar>::Zero();
  Vector6<Scalar> lower = Vector6<Scalar>::Constant(-std::numbers::pi_v<Scalar>);
  Vector6<Scalar> upper = Vector6<Scalar>::Constant(std::numbers::pi_v<Scalar>);
  Vector3<Scalar> base = Vector3<Scalar>::Zero();

  /// Kinova Gen3 Lite: a_2 = 0.28 m, b = (0.2433, 0.03, 0.02, 0.245, 0.057,
  /// 0.235) m, alpha = (pi/2, pi, pi/2, pi/2, pi/2, 0), limits +-154, 150,
  /// 150, 149, 145, 149 degrees. The joint zero of joints 2..6 sits at DH
  /// angles (pi/2, pi/2, pi/2, pi, pi/2).
  static DhChain gen3_lite() {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    constexpr Scalar deg = pi / Scalar(180);
    DhChain c;
    c.a << Scalar(0), Scalar(0.28), Scalar(0), Scalar(0), Scalar(0), Scalar(0);
    c.b << Scalar(0.2433), Scalar(0.03), Scalar(0.02), Scalar(0.245), Scalar(0.057),
        Scalar(0.235);
    c.alpha << pi / 2, pi, pi / 2, pi / 2, pi / 2, Scalar(0);
    c.offset << Scalar(0), pi / 2, pi / 2, pi / 2, pi, pi / 2;
    c.upper << Scalar(154) * deg, Scalar(150) * deg, Scalar(150) * deg, Scalar(149) * deg,
        Scalar(145) * deg, Scalar(149) * deg;
    c.lower = -c.upper;
    return c;
  }

  /// Throws std::invalid_argument when a limit pair is empty or b_5 == 0.
  void validate() const {
    for (int i = 0; i < 6; ++i) {
      if (!(lower[i] < upper[i]))
        throw std::invalid_argument("DhChain: lower limit must be below upper limit for joint " +
                                    std::to_string(i + 1));
    }
    if (b[4] == Scalar(0))
      throw std::invalid_argument("DhChain: b5 must be nonzero (non wrist-partitioned chain)");
  }

  [[nodiscard]] bool within_limits(const JointAngles<Scalar>& q) const {
    for (int i = 0; i < 6; ++i)
      if (q[i] < lower[i] || q[i] > upper[i]) return false;
    return true;
  }

  [[nodiscard]] JointAngles<Scalar> to_dh(const JointAngles<Scalar>& q) const {
    return normalize_angles(q + offset);
  }
  [[nodiscard]] JointAngles<Scalar> from_dh(const JointAngles<Scalar>& dh) const {
    return normalize_angles(dh - offset);
  }

  template <typename NewScalar>
  [[nodiscard]] DhChain<NewScalar> cast() const {
    DhChain<NewScalar> c;
    c.a = a.template cast<NewScalar>();
    c.b = b.template cast<NewScalar>();
    c.alpha = alpha.template cast<NewScalar>();
    c.offset = offset.template cast<NewScalar>();
    c.lower = lower.template cast<NewScalar>();
    c.upper = upper.template cast<NewScalar>();
    c.base = base.template cast<NewScalar>();
    return c;
  }
};

using DhChaind = DhChain<double>;

/// End-effector pose: position p of frame 7 and orientation Q from frame 1 to 7.
template <typename Scalar>
struct Pose {
  Vector3<Scalar> p = Vector3<Scalar>::Zero();
  Matrix3<Scalar> Q = Matrix3<Scalar>::Identity();

  [[nodiscard]] bool is_valid(Scalar tol = Scalar(1e-10)) const {
    using std::abs;
    const Matrix3<Scalar> e = Q * Q.transpose() - Matrix3<Scalar>::Identity();
    return e.cwiseAbs().maxCoeff() <= tol && abs(Q.determinant() - Scalar(1)) <= tol;
  }

  template <typename NewScalar>
  [[nodiscard]] Pose<NewScalar> cast() const {
    return {p.template cast<NewScalar>(), Q.template cast<NewScalar>()};
  }
};

using Posed = Pose<double>;

template <typename Scalar>
struct RpyAngles {
  Scalar roll{0};
  Scalar pitch{0};
  Scalar yaw{0};
  /// Set when |cos(pitch)| is too small to separate roll from yaw.
  bool gimbal_lock = false;
};

using RpyAnglesd = RpyAngles<double>;

/// Rotation Q_i = Rz(theta) Rx(alpha) relating frame i to frame i+1.
template <typename Scalar>
Matrix3<Scalar> joint_rotation(Scalar theta, Scalar alpha) {
  using std::cos;
  using std::sin;
  const Scalar ct = cos(theta), st = sin(theta), ca = cos(alpha), sa = sin(alpha);
  Matrix3<Scalar> q;
  q << ct, -ca * st, sa * st,
       st, ca * ct, -sa * ct,
       Scalar(0), sa, ca;
  return q;
}

/// Vector from the origin of frame i to the origin of frame i+1, in frame i.
template <typename Scalar>
Vector3<Scalar> link_offset(Scalar theta, Scalar a, Scalar b) {
  using std::cos;
  using std::sin;
  return Vector3<Scalar>(a * cos(theta), a * sin(theta), b);
}

/// Origins O_1..O_7 of the DH frames in the world (O_1 is the base).
template <typename Scalar>
std::array<Vector3<Scalar>, 7> frame_origins(const JointAngles<Scalar>& joints,
                                             const DhChain<Scalar>& chain) {
  std::array<Vector3<Scalar>, 7> origins;
  origins[0] = chain.base;
  Matrix3<Scalar> rot = Matrix3<Scalar>::Identity();
  for (int i = 0; i < 6; ++i) {
    const Scalar theta = joints[i] + chain.offset[i];
    origins[i + 1] = origins[i] + rot * link_offset(theta, chain.a[i], chain.b[i]);
    rot = rot * joint_rotation(theta, chain.alpha[i]);
  }
  return origins;
}

template <typename Scalar>
Pose<Scalar> forward_kinematics(const JointAngles<Scalar>& joints, const DhChain<Scalar>& chain) {
  Pose<Scalar> pose;
  pose.p = chain.base;
  Matrix3<Scalar> rot = Matrix3<Scalar>::Identity();
  for (int i = 0; i < 6; ++i) {
    const Scalar theta = joints[i] + chain.offset[i];
    pose.p += rot * link_offset(theta, chain.a[i], chain.b[i]);
    rot = rot * joint_rotation(theta, chain.alpha[i]);
  }
  pose.Q = rot;
  return pose;
}

/// Q = [q1 q2 q3] from roll (phi), pitch (theta) and yaw (psi):
/// Q = Rz(yaw) Ry(pitch) Rx(roll).
template <typename Scalar>
Matrix3<Scalar> rpy_to_matrix(const RpyAngles<Scalar>& rpy) {
  using std::cos;
  using std::sin;
  const Scalar cf = cos(rpy.roll), sf = sin(rpy.roll);
  const Scalar ct = cos(rpy.pitch), st = sin(rpy.pitch);
  const Scalar cp = cos(rpy.yaw), sp = sin(rpy.yaw);
  Matrix3<Scalar> q;
  q.col(0) << cp * ct, sp * ct, -st;
  q.col(1) << -sp * cf + cp * st * sf, cp * cf + sp * st * sf, ct * sf;
  q.col(2) << sp * sf + cp * st * cf, -cp * sf + sp * st * cf, ct * cf;
  return q;
}

template <typename Scalar>
Matrix3<Scalar> rpy_to_matrix(Scalar roll, Scalar pitch, Scalar yaw) {
  return rpy_to_matrix(RpyAngles<Scalar>{roll, pitch, yaw});
}

/// Inverse of rpy_to_matrix with pitch in [-pi/2, pi/2]. At gimbal lock the
/// roll is set to zero and the yaw absorbs the free rotation.
template <typename Scalar>
RpyAngles<Scalar> matrix_to_rpy(const Matrix3<Scalar>& q) {
  using std::abs;
  using std::asin;
  using std::atan2;
  using std::cos;
  RpyAngles<Scalar> out;
  const Scalar s = std::clamp(-q(2, 0), Scalar(-1), Scalar(1));
  out.pitch = asin(s);
  if (abs(cos(out.pitch)) < Scalar(1e-9)) {
    out.gimbal_lock = true;
    out.roll = Scalar(0);
    // With roll = 0: q12 = -sin(yaw), q22 = cos(yaw).
    out.yaw = atan2(-q(0, 1), q(1, 1));
  } else {
    out.roll = atan2(q(2, 1), q(2, 2));
    out.yaw = atan2(q(1, 0), q(0, 0));
  }
  return out;
}

/// Vector from O_1 to O_6. The last link only offsets b_6 along the tool z-axis.
template <typename Scalar>
Vector3<Scalar> wrist_vector(const Pose<Scalar>& pose, const DhChain<Scalar>& chain) {
  return pose.p - chain.base - chain.b[5] * pose.Q.col(2);
}

}  // namespace gen3lite
