#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace light4d {

// Directional light. The direction lives in the reference camera frame (the
// yaw-0 camera), so it stays fixed in the world while the camera orbits.
struct LightingSpec {
  Eigen::Vector3d direction{0.0, 0.0, 1.0};
  double intensity = 1.0;
  double ambient = 0.1;
  std::string label = "Front";

  void validate() const;
};

// Fixed label table: Left, Right, Top, Bottom, Front, Back. Left is (-1, 0, 0.3)
// normalized and the others follow the same pattern.
Eigen::Vector3d direction_for_label(const std::string& label);
LightingSpec lighting_from_label(const std::string& label, double intensity = 1.0,
                                 double ambient = 0.1);

struct CameraTrajectory {
  std::vector<double> yaw_deg;

  int frames() const { return static_cast<int>(yaw_deg.size()); }
  void validate() const;
  // Rotation taking reference-frame vectors into the camera frame of frame f.
  Eigen::Matrix3d world_to_camera(int f) const;
};

// Rotation about the vertical (y) axis by `deg` degrees.
Eigen::Matrix3d yaw_rotation(double deg);

// Per-frame token matrices (N tokens x d features). N and d are the same for
// every frame.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(int frames, int tokens, int dim);
  explicit FeatureSequence(std::vector<Eigen::MatrixXd> frames);

  int frames() const { return static_cast<int>(frames_.size()); }
  int tokens() const { return tokens_; }
  int dim() const { return dim_; }

  Eigen::MatrixXd& operator[](int f) { return frames_[static_cast<std::size_t>(f)]; }
  const Eigen::MatrixXd& operator[](int f) const { return frames_[static_cast<std::size_t>(f)]; }

  bool same_shape(const FeatureSequence& other) const {
    return frames() == other.frames() && tokens_ == other.tokens_ && dim_ == other.dim_;
  }

 private:
  std::vector<Eigen::MatrixXd> frames_;
  int tokens_ = 0;
  int dim_ = 0;
};

}  // namespace light4d
