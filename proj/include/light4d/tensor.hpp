#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace light4d {

struct Shape4 {
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(frames) * height * width * channels;
  }
  std::size_t frame_size() const { return static_cast<std::size_t>(height) * width * channels; }
  bool operator==(const Shape4&) const = default;
};

std::string to_string(const Shape4& s);

// Tag types. They keep pixel-space videos and latent states from being mixed
// up at compile time; the storage is identical.
struct PixelSpace {};
struct LatentSpace {};

// Dense F x H x W x C tensor, frame-major and row-major within a frame, with
// channels interleaved. Arithmetic goes through array(), which is a plain
// Eigen column array so callers can write expressions directly.
template <typename Scalar_, typename Space>
class Tensor4 {
 public:
  using Scalar = Scalar_;
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using PlaneStride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
  using Plane = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>, 0,
                           PlaneStride>;
  using ConstPlane =
      Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>, 0,
                 PlaneStride>;
  using FrameMap = Eigen::Map<Storage>;
  using ConstFrameMap = Eigen::Map<const Storage>;

  Tensor4() = default;

  explicit Tensor4(const Shape4& shape, Scalar fill = Scalar(0)) : shape_(shape) {
    if (shape.frames < 1 || shape.height < 1 || shape.width < 1 || shape.channels < 1) {
      throw std::invalid_argument("tensor shape must be positive, got " + to_string(shape));
    }
    data_ = Storage::Constant(static_cast<Eigen::Index>(shape.size()), fill);
  }

  Tensor4(const Shape4& shape, Storage data) : Tensor4(shape) {
    if (data.size() != data_.size()) {
      throw std::invalid_argument("tensor data size does not match shape " + to_string(shape));
    }
    data_ = std::move(data);
  }

  const Shape4& shape() const { return shape_; }
  int frames() const { return shape_.frames; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }
  bool empty() const { return data_.size() == 0; }

  std::size_t index(int f, int y, int x, int c) const {
    return ((static_cast<std::size_t>(f) * shape_.height + y) * shape_.width + x) * shape_.channels +
           c;
  }

  Scalar& operator()(int f, int y, int x, int c) { return data_[index(f, y, x, c)]; }
  Scalar operator()(int f, int y, int x, int c) const { return data_[index(f, y, x, c)]; }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  // All values of frame f, interleaved channels.
  FrameMap frame(int f) {
    return FrameMap(data_.data() + f * shape_.frame_size(),
                    static_cast<Eigen::Index>(shape_.frame_size()));
  }
  ConstFrameMap frame(int f) const {
    return ConstFrameMap(data_.data() + f * shape_.frame_size(),
                         static_cast<Eigen::Index>(shape_.frame_size()));
  }

  // H x W view of a single channel of frame f.
  Plane plane(int f, int c) {
    return Plane(data_.data() + f * shape_.frame_size() + c, shape_.height, shape_.width,
                 PlaneStride(static_cast<Eigen::Index>(shape_.width) * shape_.channels,
                             shape_.channels));
  }
  ConstPlane plane(int f, int c) const {
    return ConstPlane(data_.data() + f * shape_.frame_size() + c, shape_.height, shape_.width,
                      PlaneStride(static_cast<Eigen::Index>(shape_.width) * shape_.channels,
                                  shape_.channels));
  }

  template <typename Other, typename OtherSpace = Space>
  Tensor4<Other, OtherSpace> cast() const {
    return Tensor4<Other, OtherSpace>(shape_, data_.template cast<Other>());
  }

 private:
  Shape4 shape_;
  Storage data_;
};

using VideoTensor = Tensor4<double, PixelSpace>;
using LatentVideo = Tensor4<double, LatentSpace>;
using VideoTensorF = Tensor4<float, PixelSpace>;

template <typename T>
T like(const T& reference, typename T::Scalar fill) {
  return T(reference.shape(), fill);
}

inline VideoTensor video_like(const VideoTensor& reference, double fill) {
  return like(reference, fill);
}

// Thrown by assert_finite; carries the (f, y, x, c) position of the first bad entry.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::array<int, 4> where)
      : std::runtime_error(what), where_(where) {}
  const std::array<int, 4>& where() const { return where_; }

 private:
  std::array<int, 4> where_;
};

template <typename Scalar, typename Space>
void assert_finite(const Tensor4<Scalar, Space>& t, const std::string& label = "tensor") {
  const auto& a = t.array();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) {
      const Shape4& s = t.shape();
      std::size_t r = static_cast<std::size_t>(i);
      const int c = static_cast<int>(r % s.channels);
      r /= s.channels;
      const int x = static_cast<int>(r % s.width);
      r /= s.width;
      const int y = static_cast<int>(r % s.height);
      const int f = static_cast<int>(r / s.height);
      throw NonFiniteError(label + ": non-finite value " + std::to_string(a[i]) + " at (" +
                               std::to_string(f) + "," + std::to_string(y) + "," +
                               std::to_string(x) + "," + std::to_string(c) + ")",
                           {f, y, x, c});
    }
  }
}

template <typename Scalar, typename Space>
Tensor4<Scalar, Space> clamp01(Tensor4<Scalar, Space> t) {
  t.array() = t.array().max(Scalar(0)).min(Scalar(1));
  return t;
}

// Moves data between spaces; used by the identity codec and by tests.
template <typename ToSpace, typename Scalar, typename FromSpace>
Tensor4<Scalar, ToSpace> reinterpret_space(const Tensor4<Scalar, FromSpace>& t) {
  return Tensor4<Scalar, ToSpace>(t.shape(), t.array());
}

template <typename Scalar, typename Space>
Scalar l2_norm(const Tensor4<Scalar, Space>& t) {
  return t.array().matrix().norm();
}

}  // namespace light4d
