#include "gen3lite/report.hpp"

#include "gen3lite/chain_io.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace gen3lite {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct RealTolerance {
  const char* name;
  double ik::Options::*field;
};

struct IntTolerance {
  const char* name;
  int ik::Options::*field;
};

constexpr std::array kRealTolerances = {
    RealTolerance{"real_tol", &ik::Options::real_tol},
    RealTolerance{"leading_tol", &ik::Options::leading_tol},
    RealTolerance{"near_real_tol", &ik::Options::near_real_tol},
    RealTolerance{"c4_tol", &ik::Options::c4_tol},
    RealTolerance{"v_zero_tol", &ik::Options::v_zero_tol},
    RealTolerance{"denominator_zero_tol", &ik::Options::denominator_zero_tol},
    RealTolerance{"special_fallback_tol", &ik::Options::special_fallback_tol},
    RealTolerance{"wrist_singular_tol", &ik::Options::wrist_singular_tol},
    RealTolerance{"polish_band", &ik::Options::polish_band},
    RealTolerance{"fold_window", &ik::Options::fold_window},
    RealTolerance{"residual_max", &ik::Options::residual_max},
    RealTolerance{"dedupe_tol", &ik::Options::dedupe_tol},
};

constexpr std::array kIntTolerances = {
    IntTolerance{"refine_samples_real", &ik::Options::refine_samples_real},
    IntTolerance{"refine_samples_near_real", &ik::Options::refine_samples_near_real},
    IntTolerance{"polish_iterations", &ik::Options::polish_iterations},
    IntTolerance{"fold_samples", &ik::Options::fold_samples},
};

double number_at(const nlohmann::json& arr, std::size_t i, const std::string& what) {
  if (!arr[i].is_number()) throw std::invalid_argument(what + " has a non-numeric entry");
  return arr[i].get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> read_fixed(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.size() != N)
    throw std::invalid_argument(what + " must be an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = number_at(v, static_cast<std::size_t>(i), what);
  return out;
}

Matrix3d read_matrix(const nlohmann::json& v, const std::string& what) {
  Matrix3d m;
  if (v.is_array() && v.size() == 3 && v[0].is_array()) {
    for (int r = 0; r < 3; ++r) m.row(r) = read_fixed<3>(v[static_cast<std::size_t>(r)], what);
  } else {
    const auto flat = read_fixed<9>(v, what);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = flat[3 * r + c];
  }
  return m;
}

template <typename Vec>
nlohmann::json array_of(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

nlohmann::json matrix_rows(const Matrix3d& m) {
  nlohmann::json out = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) out.push_back(array_of(Vector3d(m.row(r).transpose())));
  return out;
}

}  // namespace

void SolveRequest::validate() const {
  if (rpy.has_value() == matrix.has_value())
    throw std::invalid_argument("request: give exactly one of rpy and matrix");
  if (!position.allFinite()) throw std::invalid_argument("request: position must be finite");
  if (matrix) {
    const Matrix3d& m = *matrix;
    if (!m.allFinite() || (m * m.transpose() - Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(m.determinant() - 1.0) > 1e-6)
      throw std::invalid_argument("request: matrix is not a rotation (tolerance 1e-6)");
  }
  if (chain) chain->validate();
  if (scene) scene->validate();
}

Posed SolveRequest::pose() const {
  validate();
  Posed pose;
  pose.p = position;
  if (rpy) {
    pose.Q = rpy_to_matrix(*rpy);
  } else {
    Eigen::JacobiSVD<Matrix3d> svd(*matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    pose.Q = svd.matrixU() * svd.matrixV().transpose();
  }
  return pose;
}

SolveRequest request_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("request: document must be a JSON object");
  SolveRequest req;
  if (!doc.contains("position")) throw std::invalid_argument("request: missing key 'position'");
  req.position = read_fixed<3>(doc.at("position"), "request: position");

  double unit = 1.0;
  if (doc.contains("units")) {
    const auto units = doc.at("units").get<std::string>();
    if (units == "deg") {
      unit = kDeg;
    } else if (units != "rad") {
      throw std::invalid_argument("request: units must be \"rad\" or \"deg\"");
    }
  }
  if (doc.contains("rpy")) {
    const Vector3d v = read_fixed<3>(doc.at("rpy"), "request: rpy") * unit;
    req.rpy = RpyAnglesd{v[0], v[1], v[2]};
  }
  if (doc.contains("matrix")) req.matrix = read_matrix(doc.at("matrix"), "request: matrix");
  if (doc.contains("chain")) req.chain = chain_from_json(doc.at("chain"));
  if (doc.contains("scene")) req.scene = scene_from_json(doc.at("scene"));
  if (doc.contains("tolerances")) {
    const auto& tol = doc.at("tolerances");
    if (!tol.is_object()) throw std::invalid_argument("request: tolerances must be an object");
    for (const auto& [key, value] : tol.items()) {
      bool known = false;
      for (const auto& t : kRealTolerances)
        if (key == t.name) {
          req.options.*t.field = value.get<double>();
          known = true;
        }
      for (const auto& t : kIntTolerances)
        if (key == t.name) {
          req.options.*t.field = value.get<int>();
          known = true;
        }
      if (!known) throw std::invalid_argument("request: unknown tolerance '" + key + "'");
    }
  }
  req.validate();
  return req;
}

nlohmann::json request_to_json(const SolveRequest& request) {
  nlohmann::json doc;
  doc["position"] = array_of(request.position);
  if (request.rpy) doc["rpy"] = {request.rpy->roll, request.rpy->pitch, request.rpy->yaw};
  if (request.matrix) doc["matrix"] = matrix_rows(*request.matrix);
  if (request.chain) doc["chain"] = chain_to_json(*request.chain);
  if (request.scene) doc["scene"] = scene_to_json(*request.scene);
  nlohmann::json tol;
  for (const auto& t : kRealTolerances) tol[t.name] = request.options.*t.field;
  for (const auto& t : kIntTolerances) tol[t.name] = request.options.*t.field;
  doc["tolerances"] = tol;
  return doc;
}

bool SolveReport::same_content(const SolveReport& other) const {
  return request == other.request && position == other.position &&
         rpy.roll == other.rpy.roll && rpy.pitch == other.rpy.pitch && rpy.yaw == other.rpy.yaw &&
         rpy.gimbal_lock == other.rpy.gimbal_lock && matrix == other.matrix &&
         solutions == other.solutions && rejected == other.rejected &&
         trimmed_degrees == other.trimmed_degrees && selection == other.selection;
}

SolveReport make_report(const SolveRequest& request) {
  const Posed pose = request.pose();
  const DhChaind chain = request.chain.value_or(DhChaind::gen3_lite());

  SolveReport report;
  report.request = request_to_json(request);
  report.position = pose.p;
  report.matrix = pose.Q;
  report.rpy = matrix_to_rpy(pose.Q);

  const auto start = std::chrono::steady_clock::now();
  const ik::SolutionSet set = ik::solve_ik(pose, chain, request.options);
  std::optional<PostureChoice> choice;
  if (request.scene) choice = select_posture(set, *request.scene, chain);
  report.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  for (std::size_t i = 0; i < set.all.size(); ++i) {
    const auto& s = set.all[i];
    SolutionRow row;
    row.joints = s.joints;
    if (!s.t1_at_infinity) row.t1_root = s.t1_root;
    row.residual = s.residual;
    row.within_limits = s.within_limits;
    row.wrist_singular = s.wrist_singular;
    row.feasible = std::find(set.feasible.begin(), set.feasible.end(), i) != set.feasible.end();
    row.branch = std::string(ik::to_string(s.branch));
    report.solutions.push_back(std::move(row));
  }
  for (const auto& r : set.rejected)
    report.rejected.push_back({r.theta1, std::string(ik::to_string(r.reason)), r.residual});
  report.trimmed_degrees = set.trimmed_degrees;
  if (choice) report.selection = SelectionRow{choice->index, choice->score};
  return report;
}

nlohmann::json report_to_json(const SolveReport& report) {
  nlohmann::json doc;
  doc["request"] = report.request;
  doc["target"] = {{"position", array_of(report.position)},
                   {"rpy", {report.rpy.roll, report.rpy.pitch, report.rpy.yaw}},
                   {"gimbal_lock", report.rpy.gimbal_lock},
                   {"matrix", matrix_rows(report.matrix)}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : report.solutions) {
    rows.push_back({{"joints", array_of(s.joints)},
                    {"t1_root", s.t1_root ? nlohmann::json(*s.t1_root) : nlohmann::json(nullptr)},
                    {"residual", s.residual},
                    {"within_limits", s.within_limits},
                    {"wrist_singular", s.wrist_singular},
                    {"feasible", s.feasible},
                    {"branch", s.branch}});
  }
  doc["solutions"] = rows;
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& r : report.rejected)
    rejected.push_back({{"theta1", r.theta1}, {"reason", r.reason}, {"residual", r.residual}});
  doc["rejected"] = rejected;
  doc["trimmed_degrees"] = report.trimmed_degrees;
  doc["selection"] = report.selection ? nlohmann::json{{"index", report.selection->index},
                                                       {"score", report.selection->score}}
                                      : nlohmann::json(nullptr);
  doc["timing_ms"] = report.timing_ms;
  return doc;
}

SolveReport report_from_json(const nlohmann::json& doc) {
  SolveReport report;
  report.request = doc.at("request");
  const auto& target = doc.at("target");
  report.position = read_fixed<3>(target.at("position"), "report: position");
  const Vector3d rpy = read_fixed<3>(target.at("rpy"), "report: rpy");
  report.rpy = RpyAnglesd{rpy[0], rpy[1], rpy[2], target.at("gimbal_lock").get<bool>()};
  report.matrix = read_matrix(target.at("matrix"), "report: matrix");
  for (const auto& s : doc.at("solutions")) {
    SolutionRow row;
    row.joints = read_fixed<6>(s.at("joints"), "report: joints");
    if (!s.at("t1_root").is_null()) row.t1_root = s.at("t1_root").get<double>();
    row.residual = s.at("residual").get<double>();
    row.within_limits = s.at("within_limits").get<bool>();
    row.wrist_singular = s.at("wrist_singular").get<bool>();
    row.feasible = s.at("feasible").get<bool>();
    row.branch = s.at("branch").get<std::string>();
    report.solutions.push_back(std::move(row));
  }
  for (const auto& r : doc.at("rejected"))
    report.rejected.push_back({r.at("theta1").get<double>(), r.at("reason").get<std::string>(),
                               r.at("residual").get<double>()});
  report.trimmed_degrees = doc.at("trimmed_degrees").get<int>();
  if (!doc.at("selection").is_null())
    report.selection = SelectionRow{doc.at("selection").at("index").get<std::size_t>(),
                                    doc.at("selection").at("score").get<double>()};
  report.timing_ms = doc.at("timing_ms").get<double>();
  return report;
}

nlohmann::json fk_to_json(const JointAnglesd& joints, const DhChaind& chain) {
  const Posed pose = forward_kinematics(joints, chain);
  const RpyAnglesd rpy = matrix_to_rpy(pose.Q);
  return {{"joints", array_of(joints)},
          {"position", array_of(pose.p)},
          {"rpy", {rpy.roll, rpy.pitch, rpy.yaw}},
          {"gimbal_lock", rpy.gimbal_lock},
          {"matrix", matrix_rows(pose.Q)},
          {"within_limits", chain.within_limits(joints)}};
}

}  // namespace gen3lite
