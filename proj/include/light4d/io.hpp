#pragma once

#include "light4d/tensor.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace light4d {

// Tensor dump: "L4DT", then F, H, W, C as little-endian uint32, then the
// values as little-endian float32 in storage order.
void write_tensor(const std::filesystem::path& path, const VideoTensorF& t);
VideoTensorF read_tensor(const std::filesystem::path& path);

// Doubles are narrowed to float32 on write.
template <typename Space>
void write_tensor(const std::filesystem::path& path, const Tensor4<double, Space>& t) {
  write_tensor(path, t.template cast<float, PixelSpace>());
}

enum class FrameFormat { png, ppm };

FrameFormat frame_format_from_string(const std::string& s);

// Writes frame_%04d.png / .ppm into dir. Values are clamped to [0, 1] and
// quantized to 8 bits. Returns the written paths.
std::vector<std::filesystem::path> write_frames(const std::filesystem::path& dir,
                                                const VideoTensor& video,
                                                FrameFormat format = FrameFormat::png);

VideoTensor read_image(const std::filesystem::path& path);

// Loads every frame_*.png / frame_*.ppm in dir, sorted by name.
VideoTensor read_frames(const std::filesystem::path& dir);
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace light4d
