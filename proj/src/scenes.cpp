#include "light4d/scenes.hpp"

#include "light4d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace light4d {
namespace {

constexpr double kPi = std::numbers::pi;

const Eigen::Vector3d kCheckerHi{0.85, 0.75, 0.6};
const Eigen::Vector3d kCheckerLo{0.3, 0.35, 0.45};
const Eigen::Vector3d kTint{1.0, 0.9, 0.8};

double sphere_radius(const SceneSpec& s) {
  return s.kind == SceneKind::two_spheres ? 0.18 * std::min(s.height, s.width)
                                          : 0.35 * std::min(s.height, s.width);
}

double object_offset(const SceneSpec& s, int f) {
  if (s.motion_amplitude == 0.0) return 0.0;
  return s.motion_amplitude * std::sin(2.0 * kPi * f / s.frames);
}

// Albedo from a surface parameterization (u, v) in [0, 1)^2.
Eigen::Vector3d albedo_at(const SceneSpec& s, double u, double v, int cells) {
  switch (s.albedo) {
    case AlbedoPattern::constant:
      return Eigen::Vector3d::Constant(s.albedo_value);
    case AlbedoPattern::checker: {
      const int iu = static_cast<int>(std::floor(u * cells));
      const int iv = static_cast<int>(std::floor(v * cells));
      return ((iu + iv) % 2 == 0) ? kCheckerHi : kCheckerLo;
    }
    case AlbedoPattern::gradient:
      return (0.3 + 0.6 * std::clamp(u, 0.0, 1.0)) * kTint;
  }
  return Eigen::Vector3d::Zero();
}

// Surface hit of the sphere with world centre `centre_w`.
SurfaceSample hit_sphere(const SceneSpec& s, const Eigen::Matrix3d& to_cam,
                         const Eigen::Vector3d& centre_w, double radius, double X, double Y) {
  SurfaceSample out;
  const Eigen::Vector3d c = to_cam * centre_w;
  const double dx = X - c.x();
  const double dy = Y - c.y();
  const double r2 = dx * dx + dy * dy;
  if (r2 > radius * radius) return out;
  const double dz = std::sqrt(radius * radius - r2);
  out.hit = true;
  out.point = {X, Y, c.z() + dz};
  out.normal = Eigen::Vector3d(dx, dy, dz) / radius;
  const Eigen::Vector3d nw = to_cam.transpose() * out.normal;
  const double lon = std::atan2(nw.x(), nw.z());              // [-pi, pi]
  const double lat = std::asin(std::clamp(nw.y(), -1.0, 1.0));  // [-pi/2, pi/2]
  out.albedo = albedo_at(s, (lon + kPi) / (2.0 * kPi), (lat + 0.5 * kPi) / kPi, 12);
  return out;
}

SurfaceSample hit_plane(const SceneSpec& s, const Eigen::Matrix3d& to_cam, double offset, double X,
                        double Y) {
  SurfaceSample out;
  // Plane z = 0 in the world, spanning |u|, |v| <= half. Orthographic rays
  // travel along camera z, so solve camera-x for the world u coordinate.
  const double half = 0.4 * std::min(s.height, s.width);
  const Eigen::Vector3d ex = to_cam * Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ez = to_cam * Eigen::Vector3d::UnitZ();
  if (std::abs(ex.x()) < 1e-9) return out;
  const double u = X / ex.x() - offset;
  const double v = Y;
  if (std::abs(u) > half || std::abs(v) > half) return out;
  out.hit = true;
  out.point = to_cam * Eigen::Vector3d(u + offset, v, 0.0);
  out.normal = ez.z() >= 0.0 ? ez : Eigen::Vector3d(-ez);
  out.albedo = albedo_at(s, (u + half) / (2.0 * half), (v + half) / (2.0 * half), 8);
  return out;
}

double channel_albedo(const Eigen::Vector3d& a, int c, int channels) {
  return channels == 3 ? a[c] : a.mean();
}

}  // namespace

SceneKind scene_kind_from_string(const std::string& s) {
  if (s == "sphere") return SceneKind::sphere;
  if (s == "textured_plane") return SceneKind::textured_plane;
  if (s == "two_spheres") return SceneKind::two_spheres;
  throw std::invalid_argument("unknown scene kind '" + s + "'");
}

AlbedoPattern albedo_pattern_from_string(const std::string& s) {
  if (s == "constant") return AlbedoPattern::constant;
  if (s == "checker") return AlbedoPattern::checker;
  if (s == "gradient") return AlbedoPattern::gradient;
  throw std::invalid_argument("unknown albedo pattern '" + s + "'");
}

std::string to_string(SceneKind k) {
  switch (k) {
    case SceneKind::sphere: return "sphere";
    case SceneKind::textured_plane: return "textured_plane";
    case SceneKind::two_spheres: return "two_spheres";
  }
  return "?";
}

std::string to_string(AlbedoPattern p) {
  switch (p) {
    case AlbedoPattern::constant: return "constant";
    case AlbedoPattern::checker: return "checker";
    case AlbedoPattern::gradient: return "gradient";
  }
  return "?";
}

void SceneSpec::validate() const {
  if (height < 1 || width < 1 || frames < 1) throw std::invalid_argument("scene size must be positive");
  if (channels != 1 && channels != 3) throw std::invalid_argument("scene channels must be 1 or 3");
  if (std::abs(yaw_start) > 90.0 || std::abs(yaw_end) > 90.0) {
    throw std::invalid_argument("scene yaw must lie in [-90, 90] degrees");
  }
  if (!(albedo_value >= 0.0 && albedo_value <= 1.0)) {
    throw std::invalid_argument("scene albedo value must lie in [0, 1]");
  }
  if (!(background >= 0.0 && background <= 1.0)) {
    throw std::invalid_argument("scene background must lie in [0, 1]");
  }
  if (!std::isfinite(motion_amplitude)) throw std::invalid_argument("motion amplitude must be finite");
}

CameraTrajectory SceneSpec::trajectory() const {
  CameraTrajectory t;
  t.yaw_deg.resize(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    const double a = frames == 1 ? 0.0 : static_cast<double>(f) / (frames - 1);
    t.yaw_deg[static_cast<std::size_t>(f)] = yaw_start + (yaw_end - yaw_start) * a;
  }
  return t;
}

CameraTrajectory camera_sweep(int range_deg, int frames) {
  if (range_deg != 30 && range_deg != 90 && range_deg != 180) {
    throw std::invalid_argument("camera sweep range must be 30, 90 or 180, got " +
                                std::to_string(range_deg));
  }
  if (frames < 2) throw std::invalid_argument("camera sweep needs at least 2 frames");
  CameraTrajectory t;
  const double half = range_deg / 2.0;
  for (int f = 0; f < frames; ++f) {
    t.yaw_deg.push_back(-half + range_deg * static_cast<double>(f) / (frames - 1));
  }
  return t;
}

SurfaceSample sample_surface(const SceneSpec& spec, int f, double yaw_deg, double px, double py) {
  const Eigen::Matrix3d to_cam = yaw_rotation(-yaw_deg);
  const double X = px - spec.width / 2.0;
  const double Y = spec.height / 2.0 - py;
  const double m = object_offset(spec, f);
  switch (spec.kind) {
    case SceneKind::sphere:
      return hit_sphere(spec, to_cam, {m, 0.0, 0.0}, sphere_radius(spec), X, Y);
    case SceneKind::textured_plane:
      return hit_plane(spec, to_cam, m, X, Y);
    case SceneKind::two_spheres: {
      const double sep = 0.22 * spec.width;
      const double r = sphere_radius(spec);
      SurfaceSample a = hit_sphere(spec, to_cam, {m - sep, 0.0, 0.0}, r, X, Y);
      SurfaceSample b = hit_sphere(spec, to_cam, {m + sep, 0.0, 0.0}, r, X, Y);
      if (a.hit && b.hit) return a.point.z() >= b.point.z() ? a : b;
      return a.hit ? a : b;
    }
  }
  return {};
}

namespace {

// Shading evaluated straight from the analytic surface, frame by frame.
VideoTensor shade_scene(const SceneSpec& spec, const CameraTrajectory& cam, const LightingSpec& light) {
  light.validate();
  VideoTensor out({spec.frames, spec.height, spec.width, spec.channels});
  parallel_for(spec.frames, [&](int f) {
    const double yaw = cam.yaw_deg[static_cast<std::size_t>(f)];
    const Eigen::Vector3d l = yaw_rotation(-yaw) * light.direction;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const SurfaceSample s = sample_surface(spec, f, yaw, x, y);
        for (int c = 0; c < spec.channels; ++c) {
          double v = spec.background;
          if (s.hit) {
            const double a = channel_albedo(s.albedo, c, spec.channels);
            v = a * (light.intensity * std::max(0.0, s.normal.dot(l)) + light.ambient);
          }
          out(f, y, x, c) = std::clamp(v, 0.0, 1.0);
        }
      }
    }
  });
  return out;
}

}  // namespace

RenderedScene render(const SceneSpec& spec, const LightingSpec& light) {
  spec.validate();
  RenderedScene r;
  r.spec = spec;
  r.camera = spec.trajectory();
  const Shape4 shape{spec.frames, spec.height, spec.width, spec.channels};
  r.normals = VideoTensor({spec.frames, spec.height, spec.width, 3});
  r.albedo = VideoTensor(shape);
  r.mask = VideoTensor({spec.frames, spec.height, spec.width, 1});
  parallel_for(spec.frames, [&](int f) {
    const double yaw = r.camera.yaw_deg[static_cast<std::size_t>(f)];
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const SurfaceSample s = sample_surface(spec, f, yaw, x, y);
        if (!s.hit) continue;
        r.mask(f, y, x, 0) = 1.0;
        for (int k = 0; k < 3; ++k) r.normals(f, y, x, k) = s.normal[k];
        for (int c = 0; c < spec.channels; ++c) {
          r.albedo(f, y, x, c) = channel_albedo(s.albedo, c, spec.channels);
        }
      }
    }
  });
  r.video = shade_scene(spec, r.camera, light);
  return r;
}

VideoTensor RenderedScene::relit(const LightingSpec& light) const {
  return shade_scene(spec, camera, light);
}

SceneBuffers RenderedScene::buffers() const {
  SceneBuffers b;
  b.normals = normals;
  b.albedo = albedo;
  b.mask = mask;
  b.background = spec.background;
  b.camera = camera;
  return b;
}

double sample_bilinear(const VideoTensor& v, int f, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(v.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(v.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, v.width() - 1);
  const int y1 = std::min(y0 + 1, v.height() - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  return (1 - ay) * ((1 - ax) * v(f, y0, x0, c) + ax * v(f, y0, x1, c)) +
         ay * ((1 - ax) * v(f, y1, x0, c) + ax * v(f, y1, x1, c));
}

VideoTensor reproject_from_front(const SceneSpec& spec, const VideoTensor& source,
                                 const CameraTrajectory& target) {
  if (source.frames() != target.frames() || source.height() != spec.height ||
      source.width() != spec.width) {
    throw std::invalid_argument("reprojection: source " + to_string(source.shape()) +
                                " does not match the scene and trajectory");
  }
  VideoTensor out(source.shape());
  parallel_for(source.frames(), [&](int f) {
    const double yaw = target.yaw_deg[static_cast<std::size_t>(f)];
    const Eigen::Matrix3d to_world = yaw_rotation(yaw);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const SurfaceSample s = sample_surface(spec, f, yaw, x, y);
        double sx = x;
        double sy = y;
        if (s.hit) {
          const Eigen::Vector3d pw = to_world * s.point;
          const double cx = pw.x() + spec.width / 2.0;
          const double cy = spec.height / 2.0 - pw.y();
          if (cx >= 0.0 && cx <= spec.width - 1.0 && cy >= 0.0 && cy <= spec.height - 1.0) {
            sx = cx;
            sy = cy;
          }
        }
        for (int c = 0; c < source.channels(); ++c) out(f, y, x, c) = sample_bilinear(source, f, sx, sy, c);
      }
    }
  });
  return out;
}

}  // namespace light4d
