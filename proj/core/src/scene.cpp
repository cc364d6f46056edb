#include "splatsim/scene.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace splatsim {
namespace {

using nlohmann::json;

bool finite3(const Eigen::Vector3f& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

[[noreturn]] void fail(const std::string& what) { throw SceneError(what); }

json number_array(const float* v, int n) {
  json a = json::array();
  // Serialize through double: float -> double is exact, and the JSON writer
  // emits shortest round-trip text for doubles.
  for (int i = 0; i < n; ++i) a.push_back(static_cast<double>(v[i]));
  return a;
}

void read_floats(const json& j, const char* field, float* out, int n) {
  if (!j.contains(field)) fail(std::string(field) + ": missing");
  const json& a = j.at(field);
  if (!a.is_array() || static_cast<int>(a.size()) != n)
    fail(std::string(field) + ": expected array of " + std::to_string(n) + " numbers");
  for (int i = 0; i < n; ++i) {
    if (!a[i].is_number()) fail(std::string(field) + "[" + std::to_string(i) + "]: not a number");
    out[i] = static_cast<float>(a[i].get<double>());
  }
}

}  // namespace

void validate(const Scene& scene) {
  const Camera& cam = scene.camera;
  if (cam.width <= 0 || cam.height <= 0) fail("camera.dims: must be positive");
  if (!(cam.focal.x() > 0.0f) || !(cam.focal.y() > 0.0f)) fail("camera.focal: must be positive");
  Eigen::Matrix3f r = cam.view_transform.topLeftCorner<3, 3>();
  if ((r * r.transpose() - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() > 1e-5f)
    fail("camera.view: rotation block is not orthonormal");
  if (scene.config.patch_width <= 0 || scene.config.patch_height <= 0)
    fail("config.patch: must be positive");
  for (int c = 0; c < 3; ++c) {
    float b = scene.config.background[c];
    if (!(b >= 0.0f && b <= 1.0f)) fail("config.background: channels must be in [0,1]");
  }
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    const Gaussian3D& g = scene.gaussians[i];
    const std::string at = "gaussians[" + std::to_string(i) + "].";
    if (!finite3(g.mean)) fail(at + "mean: not finite");
    if (!finite3(g.scale) || !(g.scale.minCoeff() > 0.0f))
      fail(at + "scale: components must be strictly positive");
    if (std::abs(g.rotation.norm() - 1.0f) > 1e-6f) fail(at + "rot: quaternion not unit length");
    if (!(g.opacity >= 0.0f && g.opacity <= 1.0f)) fail(at + "opacity: must be in [0,1]");
    for (int c = 0; c < 3; ++c)
      if (!(g.color[c] >= 0.0f && g.color[c] <= 1.0f)) fail(at + "color: channels must be in [0,1]");
  }
}

Eigen::Matrix3f covariance_of(const Gaussian3D& g) {
  Eigen::Matrix3f r = g.rotation.normalized().toRotationMatrix();
  Eigen::Matrix3f m = r * g.scale.asDiagonal();
  return m * m.transpose();
}

Scene parse_scene(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("scene file: ") + e.what());
  }

  Scene scene;
  if (!j.contains("camera")) fail("camera: missing");
  const json& jc = j.at("camera");
  float view[16];
  read_floats(jc, "view", view, 16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) scene.camera.view_transform(r, c) = view[r * 4 + c];
  float focal[2];
  read_floats(jc, "focal", focal, 2);
  scene.camera.focal = {focal[0], focal[1]};
  if (!jc.contains("dims") || !jc.at("dims").is_array() || jc.at("dims").size() != 2)
    fail("camera.dims: expected [width, height]");
  scene.camera.width = jc.at("dims")[0].get<int>();
  scene.camera.height = jc.at("dims")[1].get<int>();

  if (j.contains("config")) {
    const json& jf = j.at("config");
    if (jf.contains("patch")) {
      if (!jf.at("patch").is_array() || jf.at("patch").size() != 2)
        fail("config.patch: expected [w, h]");
      scene.config.patch_width = jf.at("patch")[0].get<int>();
      scene.config.patch_height = jf.at("patch")[1].get<int>();
    }
    if (jf.contains("background")) {
      float bg[3];
      read_floats(jf, "background", bg, 3);
      scene.config.background = {bg[0], bg[1], bg[2]};
    }
    if (jf.contains("seed")) scene.config.seed = jf.at("seed").get<std::uint64_t>();
  }

  if (!j.contains("gaussians") || !j.at("gaussians").is_array()) fail("gaussians: missing array");
  scene.gaussians.reserve(j.at("gaussians").size());
  std::size_t idx = 0;
  for (const json& jg : j.at("gaussians")) {
    Gaussian3D g;
    try {
      float v3[4];
      read_floats(jg, "mean", v3, 3);
      g.mean = {v3[0], v3[1], v3[2]};
      read_floats(jg, "scale", v3, 3);
      g.scale = {v3[0], v3[1], v3[2]};
      read_floats(jg, "rot", v3, 4);
      g.rotation = Eigen::Quaternionf(v3[0], v3[1], v3[2], v3[3]);
      if (!jg.contains("opacity") || !jg.at("opacity").is_number())
        fail("opacity: missing or not a number");
      g.opacity = static_cast<float>(jg.at("opacity").get<double>());
      read_floats(jg, "color", v3, 3);
      g.color = {v3[0], v3[1], v3[2]};
    } catch (const SceneError& e) {
      fail("gaussians[" + std::to_string(idx) + "]." + e.what());
    }
    scene.gaussians.push_back(g);
    ++idx;
  }

  validate(scene);
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json j;
  float view[16];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) view[r * 4 + c] = scene.camera.view_transform(r, c);
  j["camera"] = {{"view", number_array(view, 16)},
                 {"focal", number_array(scene.camera.focal.data(), 2)},
                 {"dims", {scene.camera.width, scene.camera.height}}};
  j["config"] = {{"patch", {scene.config.patch_width, scene.config.patch_height}},
                 {"background", number_array(scene.config.background.data(), 3)},
                 {"seed", scene.config.seed}};
  json arr = json::array();
  for (const Gaussian3D& g : scene.gaussians) {
    float q[4] = {g.rotation.w(), g.rotation.x(), g.rotation.y(), g.rotation.z()};
    arr.push_back({{"mean", number_array(g.mean.data(), 3)},
                   {"scale", number_array(g.scale.data(), 3)},
                   {"rot", number_array(q, 4)},
                   {"opacity", static_cast<double>(g.opacity)},
                   {"color", number_array(g.color.data(), 3)}});
  }
  j["gaussians"] = std::move(arr);
  return j.dump(2);
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scene file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  validate(scene);
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path.string());
  out << serialize_scene(scene) << '\n';
  if (!out) fail("write failed: " + path.string());
}

}  // namespace splatsim
