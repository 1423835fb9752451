#pragma once

#include "light4d/priors.hpp"
#include "light4d/tensor.hpp"
#include "light4d/types.hpp"

#include <Eigen/Core>

#include <string>

namespace light4d {

enum class SceneKind { sphere, textured_plane, two_spheres };
enum class AlbedoPattern { constant, checker, gradient };

SceneKind scene_kind_from_string(const std::string& s);
AlbedoPattern albedo_pattern_from_string(const std::string& s);
std::string to_string(SceneKind k);
std::string to_string(AlbedoPattern p);

// Procedural scene viewed by an orthographic camera orbiting the vertical
// axis. Lengths are in pixels; the world origin projects to the image centre
// at yaw 0.
struct SceneSpec {
  SceneKind kind = SceneKind::sphere;
  int height = 64;
  int width = 64;
  int frames = 16;
  double yaw_start = -15.0;
  double yaw_end = 15.0;
  AlbedoPattern albedo = AlbedoPattern::checker;
  double albedo_value = 0.7;  // constant pattern
  // Sinusoidal horizontal object translation, one period over the clip.
  double motion_amplitude = 0.0;
  double background = 0.2;
  int channels = 3;

  void validate() const;
  CameraTrajectory trajectory() const;
};

// Linear yaw sweep from -range/2 to +range/2. range must be 30, 90 or 180.
CameraTrajectory camera_sweep(int range_deg, int frames);

struct SurfaceSample {
  bool hit = false;
  Eigen::Vector3d point;   // camera space
  Eigen::Vector3d normal;  // camera space, unit
  Eigen::Vector3d albedo;  // per channel (first `channels` entries used)
};

// Analytic ray-free lookup of what covers pixel (x, y) of frame f at the given yaw.
SurfaceSample sample_surface(const SceneSpec& spec, int f, double yaw_deg, double px, double py);

struct RenderedScene {
  SceneSpec spec;
  CameraTrajectory camera;
  VideoTensor video;
  VideoTensor normals;
  VideoTensor albedo;
  VideoTensor mask;

  // Ground-truth render of the same geometry under another light.
  VideoTensor relit(const LightingSpec& light) const;
  SceneBuffers buffers() const;
};

RenderedScene render(const SceneSpec& spec, const LightingSpec& light);

// Warps frames seen from the yaw-0 camera into the views of `target`, using
// the scene's geometry: each target pixel is lifted to its surface point,
// rotated into the source camera and bilinearly sampled there. Background
// pixels and pixels whose surface point falls outside the source frame keep
// the source pixel at the same location.
VideoTensor reproject_from_front(const SceneSpec& spec, const VideoTensor& source,
                                 const CameraTrajectory& target);

// Bilinear sample of channel c of frame f at a continuous pixel position with
// clamped borders.
double sample_bilinear(const VideoTensor& v, int f, double x, double y, int c);

}  // namespace light4d
