#pragma once

// Worked-example poses, published joint rows and independent oracles shared
// by the unit and acceptance tests.

#include "gen3lite/dh_kinematics.hpp"
#include "gen3lite/ik_solver.hpp"
#include "gen3lite/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fixtures {

using gen3lite::DhChaind;
using gen3lite::JointAnglesd;
using gen3lite::Posed;
using gen3lite::Vector3d;

inline JointAnglesd joints(double t1, double t2, double t3, double t4, double t5, double t6) {
  JointAnglesd q;
  q << t1, t2, t3, t4, t5, t6;
  return q;
}

inline Posed pose_from(const Vector3d& p, double roll, double pitch, double yaw) {
  Posed pose;
  pose.p = p;
  pose.Q = gen3lite::rpy_to_matrix(roll, pitch, yaw);
  return pose;
}

// Reach example: joints, their pose as printed (3 decimals) and the six
// in-limit rows as printed.
inline JointAnglesd reach_joints() { return joints(1, 1, 1.5, 0, 0.5, -1.5); }
inline Vector3d reach_printed_position() { return {0.119, -0.04, 0.763}; }
inline Vector3d reach_printed_rpy() { return {-0.527, 0.47, -0.759}; }
inline Posed reach_printed_pose() {
  const Vector3d rpy = reach_printed_rpy();
  return pose_from(reach_printed_position(), rpy[0], rpy[1], rpy[2]);
}
inline Posed reach_exact_pose() {
  return gen3lite::forward_kinematics(reach_joints(), DhChaind::gen3_lite());
}
inline std::vector<JointAnglesd> reach_rows() {
  return {joints(1.544, 0.979, 1.900, 2.425, -0.982, 2.021),
          joints(0.993, 1.001, 1.502, 0.005, 0.496, -1.499),
          joints(-1.151, 0.665, 1.895, -2.313, 1.140, 2.383),
          joints(-1.098, -0.921, -1.885, -0.891, -1.029, 1.734),
          joints(0.160, 0.910, 1.609, -0.970, 0.010, 0.183),
          joints(-0.145, -0.735, -1.786, -1.382, -1.718, 1.049)};
}

// Pick-and-place example: printed pose, printed in-limit rows and the scene
// used to choose among them.
inline Posed pick_place_pose() { return pose_from({0.503, 0.122, -0.002}, 3.077, -0.254, 0.256); }
inline std::vector<JointAnglesd> pick_place_rows() {
  return {joints(0.415, -2.010, -1.030, -1.678, -1.829, -1.444),
          joints(0.414, -1.122, 1.092, -1.733, -0.692, -1.292),
          joints(0.166, -1.131, 1.021, 1.508, 0.732, 1.530),
          joints(0.166, -2.091, -1.045, 1.527, 1.837, 1.472)};
}
inline gen3lite::Scene pick_place_scene() {
  gen3lite::Scene scene;
  scene.camera = {0.329, 0.0, 1.0};
  scene.objects = {{0.25, 0.25, -0.002}};
  return scene;
}

/// Smallest per-joint distance from `q` to any solution in `sols`.
inline double nearest(const std::vector<gen3lite::ik::IkSolution>& sols, const JointAnglesd& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sols) best = std::min(best, gen3lite::max_joint_distance(s.joints, q));
  return best;
}

/// Index into `sols` of the solution nearest to `q`.
inline std::size_t nearest_index(const std::vector<gen3lite::ik::IkSolution>& sols,
                                 const JointAnglesd& q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sols.size(); ++i)
    if (gen3lite::max_joint_distance(sols[i].joints, q) <
        gen3lite::max_joint_distance(sols[best].joints, q))
      best = i;
  return best;
}

/// Forward kinematics as a product of 4x4 homogeneous DH transforms.
inline Eigen::Matrix4d homogeneous_fk(const JointAnglesd& q, const DhChaind& chain) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.block<3, 1>(0, 3) = chain.base;
  for (int i = 0; i < 6; ++i) {
    const double th = q[i] + chain.offset[i];
    const double ct = std::cos(th), st = std::sin(th);
    const double ca = std::cos(chain.alpha[i]), sa = std::sin(chain.alpha[i]);
    Eigen::Matrix4d link;
    link << ct, -st * ca, st * sa, chain.a[i] * ct,
            st, ct * ca, -ct * sa, chain.a[i] * st,
            0, sa, ca, chain.b[i],
            0, 0, 0, 1;
    t = t * link;
  }
  return t;
}

/// Origin of frame 6 as the explicit sum of the first five link vectors.
inline Vector3d wrist_sum(const JointAnglesd& q, const DhChaind& chain) {
  Vector3d r = Vector3d::Zero();
  gen3lite::Matrix3d rot = gen3lite::Matrix3d::Identity();
  for (int i = 0; i < 5; ++i) {
    const double th = q[i] + chain.offset[i];
    r += rot * Vector3d(chain.a[i] * std::cos(th), chain.a[i] * std::sin(th), chain.b[i]);
    rot = rot * gen3lite::joint_rotation(th, chain.alpha[i]);
  }
  return r;
}

/// Coefficients of the product of two ascending coefficient lists.
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Sampled minimum distance between a segment and a line: `n` points on the
/// segment against `n` points spaced over [-half_range, half_range] metres
/// along the line from line_a.
inline double brute_force_clearance(const Vector3d& s0, const Vector3d& s1, const Vector3d& line_a,
                                    const Vector3d& line_b, int n = 2000, double half_range = 1.8) {
  const Vector3d dir = (line_b - line_a).normalized();
  std::vector<Vector3d> line(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    line[static_cast<std::size_t>(j)] = line_a + (-half_range + 2 * half_range * j / (n - 1)) * dir;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vector3d x = s0 + (s1 - s0) * (static_cast<double>(i) / (n - 1));
    for (const Vector3d& y : line) best = std::min(best, (x - y).squaredNorm());
  }
  return std::sqrt(best);
}

/// Relative size of V at the true theta1 of `q`, normalised by the
/// eliminant coefficient scale.
inline double relative_v(const JointAnglesd& q, const DhChaind& chain) {
  const Posed pose = gen3lite::forward_kinematics(q, chain);
  const auto vw = gen3lite::ik::vw_split(q[0] + chain.offset[0], pose,
                                         gen3lite::wrist_vector(pose, chain), chain);
  return vw.V / vw.scale;
}

/// Joint vector near `start` at which V vanishes at the true theta1, found by
/// sweeping joint `k` over [-2.4, 2.4] for a sign change and bisecting. Returns
/// false when the sweep finds no usable sign change.
inline bool find_v_zero(JointAnglesd start, int k, const DhChaind& chain, JointAnglesd& out) {
  constexpr int samples = 96;
  double prev_x = -2.4;
  start[k] = prev_x;
  double prev = relative_v(start, chain);
  for (int i = 1; i <= samples; ++i) {
    const double x = -2.4 + 4.8 * i / samples;
    start[k] = x;
    const double cur = relative_v(start, chain);
    if ((prev < 0) != (cur < 0)) {
      double lo = prev_x, hi = x, flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        start[k] = mid;
        const double fm = relative_v(start, chain);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      start[k] = 0.5 * (lo + hi);
      const double dh4 = start[3] + chain.offset[3];
      // A vanishing s4 is the determinant case, not this one.
      if (std::abs(std::sin(dh4)) > 1e-3 && std::abs(relative_v(start, chain)) < 1e-10) {
        out = start;
        return true;
      }
    }
    prev = cur;
    prev_x = x;
  }
  return false;
}

/// A1 B2 - A2 B1 over max|B| at the true angles of `q`.
inline double relative_denominator(const JointAnglesd& q, const DhChaind& chain) {
  const Posed pose = gen3lite::forward_kinematics(q, chain);
  const JointAnglesd dh = q + chain.offset;
  const auto ab = gen3lite::ik::ab_coefficients(dh[0], std::sin(dh[3]), std::cos(dh[3]), pose,
                                                gen3lite::wrist_vector(pose, chain), chain);
  return ab.denominator() / ab.scale();
}

/// Joint vector near `start` at which the 2x2 determinant vanishes with s4
/// away from zero, found like find_v_zero.
inline bool find_denominator_zero(JointAnglesd start, int k, const DhChaind& chain,
                                  JointAnglesd& out) {
  constexpr int samples = 96;
  double prev_x = -2.4;
  start[k] = prev_x;
  double prev = relative_denominator(start, chain);
  for (int i = 1; i <= samples; ++i) {
    const double x = -2.4 + 4.8 * i / samples;
    start[k] = x;
    const double cur = relative_denominator(start, chain);
    if ((prev < 0) != (cur < 0)) {
      double lo = prev_x, hi = x, flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        start[k] = mid;
        const double fm = relative_denominator(start, chain);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      start[k] = 0.5 * (lo + hi);
      const double dh4 = start[3] + chain.offset[3];
      if (std::abs(std::sin(dh4)) > 1e-3 &&
          std::abs(relative_denominator(start, chain)) < 1e-10) {
        out = start;
        return true;
      }
    }
    prev = cur;
    prev_x = x;
  }
  return false;
}

}  // namespace fixtures
