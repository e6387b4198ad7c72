#include "gen3lite/occlusion.hpp"

#include <fstream>
#include <limits>
#include <string>

namespace gen3lite {

namespace {

Vector3d read_point(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3)
    throw std::invalid_argument("scene: " + what + " must be an array of 3 numbers");
  Vector3d out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number())
      throw std::invalid_argument("scene: " + what + " has a non-numeric entry");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

}  // namespace

void Scene::validate() const {
  if (objects.empty()) throw std::invalid_argument("scene: at least one object is required");
  for (std::size_t k = 0; k < objects.size(); ++k)
    if (!((objects[k] - camera).norm() > 1e-9))
      throw std::invalid_argument("scene: object " + std::to_string(k) +
                                  " coincides with the camera");
}

Scene scene_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("scene: document must be a JSON object");
  if (!doc.contains("camera")) throw std::invalid_argument("scene: missing key 'camera'");
  if (!doc.contains("objects") || !doc.at("objects").is_array())
    throw std::invalid_argument("scene: 'objects' must be an array of points");
  Scene scene;
  scene.camera = read_point(doc.at("camera"), "camera");
  for (std::size_t k = 0; k < doc.at("objects").size(); ++k)
    scene.objects.push_back(read_point(doc.at("objects")[k], "object " + std::to_string(k)));
  scene.validate();
  return scene;
}

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : scene.objects) objects.push_back({o.x(), o.y(), o.z()});
  return {{"camera", {scene.camera.x(), scene.camera.y(), scene.camera.z()}},
          {"objects", objects}};
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scene: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("scene: " + path.string() + ": " + e.what());
  }
  return scene_from_json(doc);
}

std::vector<LinkClearance<double>> occlusion_clearances(const JointAnglesd& joints,
                                                        const Scene& scene,
                                                        const DhChaind& chain) {
  scene.validate();
  const auto origins = frame_origins(joints, chain);
  std::vector<LinkClearance<double>> out;
  out.reserve(6 * scene.objects.size());
  for (int link = 0; link < 6; ++link) {
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      auto c = segment_line_clearance(origins[static_cast<std::size_t>(link)],
                                      origins[static_cast<std::size_t>(link + 1)], scene.camera,
                                      scene.objects[k]);
      c.link_index = link + 1;
      c.object_index = k;
      out.push_back(c);
    }
  }
  return out;
}

double occlusion_score(const JointAnglesd& joints, const Scene& scene, const DhChaind& chain) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : occlusion_clearances(joints, scene, chain)) best = std::min(best, c.delta_d);
  return best;
}

std::optional<PostureChoice> select_posture(const ik::SolutionSet& solutions, const Scene& scene,
                                            const DhChaind& chain) {
  if (solutions.feasible.empty()) return std::nullopt;
  PostureChoice choice;
  choice.score = -std::numeric_limits<double>::infinity();
  for (const std::size_t idx : solutions.feasible) {
    const double s = occlusion_score(solutions.all.at(idx).joints, scene, chain);
    choice.scores.push_back(s);
    if (s > choice.score || (s == choice.score && idx < choice.index)) {
      choice.score = s;
      choice.index = idx;
    }
  }
  return choice;
}

std::string_view to_string(ClearanceKind kind) {
  switch (kind) {
    case ClearanceKind::interior: return "interior";
    case ClearanceKind::start_endpoint: return "start_endpoint";
    case ClearanceKind::end_endpoint: return "end_endpoint";
    case ClearanceKind::parallel: return "parallel";
  }
  return "unknown";
}

}  // namespace gen3lite
