#include "light4d/types.hpp"

#include "light4d/tensor.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace light4d {

std::string to_string(const Shape4& s) {
  return std::to_string(s.frames) + "x" + std::to_string(s.height) + "x" +
         std::to_string(s.width) + "x" + std::to_string(s.channels);
}

void LightingSpec::validate() const {
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("light direction must be a unit vector");
  }
  if (!(intensity >= 0.0)) throw std::invalid_argument("light intensity must be >= 0");
  if (!(ambient >= 0.0 && ambient <= 1.0)) {
    throw std::invalid_argument("light ambient must lie in [0, 1]");
  }
}

Eigen::Vector3d direction_for_label(const std::string& label) {
  Eigen::Vector3d d;
  if (label == "Left") {
    d = {-1.0, 0.0, 0.3};
  } else if (label == "Right") {
    d = {1.0, 0.0, 0.3};
  } else if (label == "Top") {
    d = {0.0, 1.0, 0.3};
  } else if (label == "Bottom") {
    d = {0.0, -1.0, 0.3};
  } else if (label == "Front") {
    d = {0.0, 0.0, 1.0};
  } else if (label == "Back") {
    d = {0.0, 0.0, -1.0};
  } else {
    throw std::invalid_argument("unknown lighting label '" + label + "'");
  }
  return d.normalized();
}

LightingSpec lighting_from_label(const std::string& label, double intensity, double ambient) {
  LightingSpec l;
  l.direction = direction_for_label(label);
  l.intensity = intensity;
  l.ambient = ambient;
  l.label = label;
  return l;
}

Eigen::Matrix3d yaw_rotation(double deg) {
  return Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, Eigen::Vector3d::UnitY())
      .toRotationMatrix();
}

void CameraTrajectory::validate() const {
  if (yaw_deg.empty()) throw std::invalid_argument("camera trajectory has no frames");
  for (double y : yaw_deg) {
    if (!std::isfinite(y) || std::abs(y) > 90.0) {
      throw std::invalid_argument("camera yaw must lie in [-90, 90] degrees");
    }
  }
}

Eigen::Matrix3d CameraTrajectory::world_to_camera(int f) const {
  // A camera yawed by theta sees world vectors rotated by -theta.
  return yaw_rotation(-yaw_deg.at(static_cast<std::size_t>(f)));
}

FeatureSequence::FeatureSequence(int frames, int tokens, int dim)
    : frames_(static_cast<std::size_t>(frames), Eigen::MatrixXd::Zero(tokens, dim)),
      tokens_(tokens),
      dim_(dim) {}

FeatureSequence::FeatureSequence(std::vector<Eigen::MatrixXd> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) return;
  tokens_ = static_cast<int>(frames_.front().rows());
  dim_ = static_cast<int>(frames_.front().cols());
  for (const auto& m : frames_) {
    if (m.rows() != tokens_ || m.cols() != dim_) {
      throw std::invalid_argument("feature sequence frames must share token count and dimension");
    }
  }
}

}  // namespace light4d
