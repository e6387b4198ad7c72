#include "gen3lite/cli.hpp"

#include "gen3lite/chain_io.hpp"
#include "gen3lite/report.hpp"
#include "gen3lite/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>

namespace gen3lite {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

DhChaind resolve_chain(const std::string& flag) {
  if (!flag.empty()) return load_chain(flag);
  if (const char* env = std::getenv("GEN3LITE_CHAIN"); env != nullptr && *env != '\0')
    return load_chain(env);
  return DhChaind::gen3_lite();
}

void print_row(std::ostream& out, const char* label, const double* v, int n) {
  out << std::left << std::setw(10) << label << std::right;
  for (int i = 0; i < n; ++i) out << std::setw(11) << v[i];
  out << "\n";
}

void print_fk(std::ostream& out, const nlohmann::json& doc) {
  out << std::fixed << std::setprecision(6);
  const auto p = doc.at("position").get<std::vector<double>>();
  const auto rpy = doc.at("rpy").get<std::vector<double>>();
  print_row(out, "position", p.data(), 3);
  print_row(out, "rpy", rpy.data(), 3);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto row = doc.at("matrix")[r].get<std::vector<double>>();
    print_row(out, r == 0 ? "matrix" : "", row.data(), 3);
  }
  if (doc.at("gimbal_lock").get<bool>()) out << "note: gimbal lock, roll set to 0\n";
}

void print_solutions(std::ostream& out, const SolveReport& report) {
  if (report.solutions.empty()) {
    out << "no solutions\n";
    return;
  }
  out << std::fixed << std::setprecision(4);
  out << "  #   " << std::right;
  for (int j = 1; j <= 6; ++j) out << std::setw(9) << ("theta" + std::to_string(j));
  out << std::setw(11) << "residual" << "  flags\n";
  int feasible = 0;
  for (std::size_t i = 0; i < report.solutions.size(); ++i) {
    const auto& s = report.solutions[i];
    const bool selected = report.selection && report.selection->index == i;
    out << (selected ? ">" : " ") << std::setw(3) << i + 1 << "  ";
    for (int j = 0; j < 6; ++j) out << std::setw(9) << s.joints[j];
    out << std::setw(11) << std::scientific << std::setprecision(1) << s.residual << std::fixed
        << std::setprecision(4) << "  ";
    std::string flags = s.feasible ? "feasible" : (s.within_limits ? "wrist-singular" : "out-of-limits");
    if (s.branch != "generic") flags += " " + s.branch;
    if (selected) flags += " selected";
    out << flags << "\n";
    feasible += s.feasible ? 1 : 0;
  }
  out << report.solutions.size() << " solutions, " << feasible << " feasible\n";
  if (report.selection) {
    out << "selected #" << report.selection->index + 1 << ", occlusion score "
        << report.selection->score << " m\n";
  } else if (report.request.contains("scene")) {
    out << "no feasible solution to select\n";
  }
}

struct PoseFlags {
  std::vector<double> pos;
  std::vector<double> rpy;
  std::vector<double> matrix;
  std::string chain;
  std::string scene;
  std::string request;
  bool deg = false;
  bool json = false;
};

void add_pose_flags(CLI::App* cmd, PoseFlags& f, bool scene_required) {
  auto* pos = cmd->add_option("--pos", f.pos, "Target position x y z (m)")->expected(3);
  auto* rpy = cmd->add_option("--rpy", f.rpy, "Roll pitch yaw (rad, or deg with --deg)")->expected(3);
  auto* mat = cmd->add_option("--matrix", f.matrix, "Rotation matrix, 9 values row-major")->expected(9);
  rpy->excludes(mat);
  mat->excludes(rpy);
  cmd->add_option("--chain", f.chain, "Chain JSON file (default: $GEN3LITE_CHAIN or built-in)");
  auto* scene = cmd->add_option("--scene", f.scene, "Scene JSON file for posture selection");
  if (scene_required) scene->required();
  auto* req = cmd->add_option("--request", f.request, "Request JSON file");
  req->excludes(pos)->excludes(rpy)->excludes(mat);
  cmd->add_flag("--deg", f.deg, "RPY given in degrees");
  cmd->add_flag("--json", f.json, "Print the JSON report");
}

SolveRequest build_request(const PoseFlags& f) {
  SolveRequest req;
  if (!f.request.empty()) {
    std::ifstream in(f.request);
    if (!in) throw std::invalid_argument("cannot open request " + f.request);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("request: ") + e.what());
    }
    req = request_from_json(doc);
  } else {
    if (f.pos.size() != 3) throw std::invalid_argument("--pos is required (3 values)");
    if (f.rpy.empty() == f.matrix.empty())
      throw std::invalid_argument("give exactly one of --rpy and --matrix");
    req.position = Vector3d(f.pos[0], f.pos[1], f.pos[2]);
    if (!f.rpy.empty()) {
      const double unit = f.deg ? kDeg : 1.0;
      req.rpy = RpyAnglesd{f.rpy[0] * unit, f.rpy[1] * unit, f.rpy[2] * unit};
    } else {
      Matrix3d m;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = f.matrix[static_cast<std::size_t>(3 * r + c)];
      req.matrix = m;
    }
  }
  if (!f.chain.empty() || !req.chain) req.chain = resolve_chain(f.chain);
  if (!f.scene.empty()) req.scene = load_scene(f.scene);
  req.validate();
  return req;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical inverse kinematics for the Kinova Gen3 Lite", "gen3lite"};
  app.require_subcommand(1);

  std::vector<double> fk_joints;
  std::string fk_chain;
  bool fk_deg = false, fk_json = false;
  auto* fk = app.add_subcommand("fk", "Forward kinematics of six joint values");
  fk->add_option("joints", fk_joints, "theta1..theta6 (rad, or deg with --deg)")->expected(6)->required();
  fk->add_option("--chain", fk_chain, "Chain JSON file (default: $GEN3LITE_CHAIN or built-in)");
  fk->add_flag("--deg", fk_deg, "Joint values in degrees");
  fk->add_flag("--json", fk_json, "Print JSON");

  PoseFlags ik_flags;
  auto* ik = app.add_subcommand("ik", "All analytical IK solutions of a pose");
  add_pose_flags(ik, ik_flags, false);

  PoseFlags sel_flags;
  auto* sel = app.add_subcommand("select", "IK solutions and the least-occluding posture");
  add_pose_flags(sel, sel_flags, true);

  int count = 100;
  std::uint64_t seed = 1;
  std::string val_chain;
  auto* val = app.add_subcommand("validate", "Seeded random round-trip validation");
  val->add_option("--count", count, "Number of trials (> 0)")->default_val(100);
  val->add_option("--seed", seed, "Random seed")->default_val(1);
  val->add_option("--chain", val_chain, "Chain JSON file (default: $GEN3LITE_CHAIN or built-in)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (fk->parsed()) {
      const DhChaind chain = resolve_chain(fk_chain);
      JointAnglesd q;
      for (int i = 0; i < 6; ++i) q[i] = fk_joints[static_cast<std::size_t>(i)] * (fk_deg ? kDeg : 1.0);
      const nlohmann::json doc = fk_to_json(q, chain);
      if (!chain.within_limits(q)) err << "warning: joint values outside the chain limits\n";
      if (fk_json) {
        out << doc.dump(2) << "\n";
      } else {
        print_fk(out, doc);
        if (!doc.at("within_limits").get<bool>()) out << "warning: outside joint limits\n";
      }
      return exit_ok;
    }

    if (ik->parsed() || sel->parsed()) {
      const PoseFlags& flags = ik->parsed() ? ik_flags : sel_flags;
      const SolveRequest req = build_request(flags);
      if (sel->parsed() && !req.scene) throw std::invalid_argument("select needs a scene");
      const SolveReport report = make_report(req);
      if (flags.json) {
        out << report_to_json(report).dump(2) << "\n";
      } else {
        print_solutions(out, report);
      }
      return exit_ok;
    }

    if (val->parsed()) {
      if (count <= 0) {
        err << "error: --count must be positive\n";
        return exit_usage;
      }
      const DhChaind chain = resolve_chain(val_chain);
      const ValidationSummary summary = run_validation(count, seed, chain);
      out << format_summary(summary, seed);
      return summary.failed == 0 ? exit_ok : exit_validation_failed;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace gen3lite
