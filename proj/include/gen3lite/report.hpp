#pragma once

// JSON request and report documents shared by the CLI and the tests.

#include "gen3lite/dh_kinematics.hpp"
#include "gen3lite/ik_solver.hpp"
#include "gen3lite/occlusion.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gen3lite {

/// Target pose plus optional overrides.
///
/// JSON: {"position": [x,y,z], "rpy": [r,p,y] | "matrix": [[...],[...],[...]],
///        "units": "rad" | "deg", "chain": {...}, "scene": {...},
///        "tolerances": {"residual_max": ..., ...}}
/// "units" applies to "rpy" only; exactly one of "rpy" and "matrix" is allowed.
struct SolveRequest {
  Vector3d position = Vector3d::Zero();
  std::optional<RpyAnglesd> rpy;  // radians
  std::optional<Matrix3d> matrix;
  std::optional<DhChaind> chain;
  std::optional<Scene> scene;
  ik::Options options;

  /// Throws std::invalid_argument unless exactly one orientation is present
  /// and, for a matrix, it is orthonormal within 1e-6.
  void validate() const;
  /// The target pose. A matrix is projected onto the nearest rotation.
  [[nodiscard]] Posed pose() const;
};

SolveRequest request_from_json(const nlohmann::json& doc);
nlohmann::json request_to_json(const SolveRequest& request);

struct SolutionRow {
  JointAnglesd joints = JointAnglesd::Zero();
  std::optional<double> t1_root;  // empty when theta1 = pi
  double residual = 0;
  bool within_limits = false;
  bool wrist_singular = false;
  bool feasible = false;
  std::string branch;

  bool operator==(const SolutionRow&) const = default;
};

struct RejectionRow {
  double theta1 = 0;
  std::string reason;
  double residual = 0;

  bool operator==(const RejectionRow&) const = default;
};

struct SelectionRow {
  std::size_t index = 0;
  double score = 0;

  bool operator==(const SelectionRow&) const = default;
};

struct SolveReport {
  nlohmann::json request;
  Vector3d position = Vector3d::Zero();
  RpyAnglesd rpy;
  Matrix3d matrix = Matrix3d::Identity();
  std::vector<SolutionRow> solutions;
  std::vector<RejectionRow> rejected;
  int trimmed_degrees = 0;
  std::optional<SelectionRow> selection;
  /// Wall-clock time of solve and selection; not part of the content.
  double timing_ms = 0;

  /// Equality of everything except timing_ms.
  [[nodiscard]] bool same_content(const SolveReport& other) const;
};

SolveReport make_report(const SolveRequest& request);

nlohmann::json report_to_json(const SolveReport& report);
SolveReport report_from_json(const nlohmann::json& doc);

/// Forward kinematics document: joints, position, rpy, matrix (row-major),
/// gimbal_lock and within_limits.
nlohmann::json fk_to_json(const JointAnglesd& joints, const DhChaind& chain);

}  // namespace gen3lite
