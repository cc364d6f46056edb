#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatsim {

// World-space splat: mean, per-axis scale, rotation, opacity and flat RGB
// color. The covariance is kept factored as scale+rotation, which makes it
// positive-definite by construction.
struct Gaussian3D {
  Eigen::Vector3f mean = Eigen::Vector3f::Zero();
  Eigen::Vector3f scale = Eigen::Vector3f::Ones();
  Eigen::Quaternionf rotation = Eigen::Quaternionf::Identity();  // w,x,y,z
  float opacity = 1.0f;
  Eigen::Vector3f color = Eigen::Vector3f::Zero();
};

struct Camera {
  Eigen::Matrix4f view_transform = Eigen::Matrix4f::Identity();  // world -> camera
  Eigen::Vector2f focal = {100.0f, 100.0f};                      // pixels
  int width = 0;
  int height = 0;
};

struct SceneConfig {
  int patch_width = 16;
  int patch_height = 8;
  Eigen::Vector3f background = Eigen::Vector3f::Zero();
  std::uint64_t seed = 0;
};

struct Scene {
  std::vector<Gaussian3D> gaussians;
  Camera camera;
  SceneConfig config;
};

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws SceneError naming the offending field if any invariant is violated:
// positive scales, unit quaternion (1e-6), opacity/color in [0,1], orthonormal
// view rotation block, positive focal and image dims.
void validate(const Scene& scene);

// Sigma = R * S * S^T * R^T, symmetric positive-definite.
Eigen::Matrix3f covariance_of(const Gaussian3D& g);

// JSON scene file I/O. Round-trips are bit-exact on every float field.
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

Scene parse_scene(const std::string& json_text);
std::string serialize_scene(const Scene& scene);

}  // namespace splatsim
