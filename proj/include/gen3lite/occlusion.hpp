#pragma once

// Clearance between the arm's link segments and camera lines of sight, and
// posture selection by largest clearance.

#include "gen3lite/dh_kinematics.hpp"
#include "gen3lite/ik_solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gen3lite {

/// Camera point and the objects it looks at, in metres.
struct Scene {
  Vector3d camera = Vector3d::Zero();
  std::vector<Vector3d> objects;

  /// Throws std::invalid_argument without objects or when an object sits on the camera.
  void validate() const;
};

Scene scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

enum class ClearanceKind { interior, start_endpoint, end_endpoint, parallel };

template <typename Scalar>
struct LinkClearance {
  int link_index = 0;  // 1..6 when produced by occlusion_clearances
  std::size_t object_index = 0;
  /// Closest point on the segment is start + delta_i (end - start).
  Scalar delta_i{0};
  /// Closest point on the line is line_a + delta_p (line_b - line_a).
  Scalar delta_p{0};
  Scalar delta_d{0};
  ClearanceKind clamped = ClearanceKind::interior;
};

namespace detail {

template <typename Scalar>
Scalar point_line_distance(const Vector3<Scalar>& x, const Vector3<Scalar>& line_a,
                           const Vector3<Scalar>& dir) {
  return (line_a - x).cross(dir).norm() / dir.norm();
}

template <typename Scalar>
Scalar line_parameter(const Vector3<Scalar>& x, const Vector3<Scalar>& line_a,
                      const Vector3<Scalar>& dir) {
  return (x - line_a).dot(dir) / dir.squaredNorm();
}

}  // namespace detail

/// Shortest distance between the segment [seg_start, seg_end] and the infinite
/// line through line_a and line_b.
///
/// Solves seg_start + delta_i w + delta_d v = line_a + delta_p u with
/// w = seg_end - seg_start, u = line_b - line_a and v = unit(u x w). When
/// delta_i leaves [0, 1] the distance from the nearer endpoint to the line is
/// used instead. When |u x w| < 1e-9 the smaller endpoint distance is used.
template <typename Scalar>
LinkClearance<Scalar> segment_line_clearance(const Vector3<Scalar>& seg_start,
                                             const Vector3<Scalar>& seg_end,
                                             const Vector3<Scalar>& line_a,
                                             const Vector3<Scalar>& line_b) {
  using std::abs;
  const Vector3<Scalar> u = line_b - line_a;
  if (!(u.norm() > Scalar(1e-9)))
    throw std::invalid_argument("segment_line_clearance: degenerate sight line");
  const Vector3<Scalar> w = seg_end - seg_start;
  const Vector3<Scalar> n = u.cross(w);

  LinkClearance<Scalar> out;
  if (n.norm() < Scalar(1e-9)) {
    const Scalar d0 = detail::point_line_distance(seg_start, line_a, u);
    const Scalar d1 = detail::point_line_distance(seg_end, line_a, u);
    out.clamped = ClearanceKind::parallel;
    out.delta_i = d1 < d0 ? Scalar(1) : Scalar(0);
    out.delta_p = detail::line_parameter(d1 < d0 ? seg_end : seg_start, line_a, u);
    out.delta_d = std::min(d0, d1);
    return out;
  }

  const Vector3<Scalar> v = n / n.norm();
  Matrix3<Scalar> m;
  m.col(0) = w;
  m.col(1) = -u;
  m.col(2) = v;
  const Vector3<Scalar> x = m.partialPivLu().solve(line_a - seg_start);
  out.delta_i = x[0];
  out.delta_p = x[1];
  out.delta_d = abs(x[2]);
  if (x[0] < Scalar(0)) {
    out.clamped = ClearanceKind::start_endpoint;
    out.delta_i = Scalar(0);
    out.delta_p = detail::line_parameter(seg_start, line_a, u);
    out.delta_d = detail::point_line_distance(seg_start, line_a, u);
  } else if (x[0] > Scalar(1)) {
    out.clamped = ClearanceKind::end_endpoint;
    out.delta_i = Scalar(1);
    out.delta_p = detail::line_parameter(seg_end, line_a, u);
    out.delta_d = detail::point_line_distance(seg_end, line_a, u);
  }
  return out;
}

/// Clearance of every link against every sight line, link-major.
std::vector<LinkClearance<double>> occlusion_clearances(const JointAnglesd& joints,
                                                        const Scene& scene,
                                                        const DhChaind& chain);

/// Smallest clearance over the six links and all objects.
double occlusion_score(const JointAnglesd& joints, const Scene& scene, const DhChaind& chain);

struct PostureChoice {
  std::size_t index = 0;  // into SolutionSet::all
  double score = 0;
  /// Score of each feasible solution, parallel to SolutionSet::feasible.
  std::vector<double> scores;
};

/// Feasible solution with the largest occlusion score; ties go to the smaller
/// index. std::nullopt when nothing is feasible.
std::optional<PostureChoice> select_posture(const ik::SolutionSet& solutions, const Scene& scene,
                                            const DhChaind& chain);

std::string_view to_string(ClearanceKind kind);

}  // namespace gen3lite
