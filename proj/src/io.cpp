#include "light4d/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace light4d {
namespace {

static_assert(std::endian::native == std::endian::little, "tensor dumps assume a little-endian host");

constexpr std::array<char, 4> kMagic{'L', '4', 'D', 'T'};

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

std::vector<std::uint8_t> frame_bytes(const VideoTensor& video, int f) {
  const auto frame = video.frame(f);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(frame.size()));
  for (Eigen::Index i = 0; i < frame.size(); ++i) out[static_cast<std::size_t>(i)] = quantize(frame[i]);
  return out;
}

void write_png(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes, int h,
               int w, int c) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = c == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write " + path.string() + ": " + image.message);
  }
}

void write_ppm(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes, int h,
               int w, int c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << (c == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

VideoTensor read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw std::runtime_error("cannot read " + path.string() + ": " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int c = gray ? 1 : 3;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    throw std::runtime_error("cannot decode " + path.string() + ": " + image.message);
  }
  VideoTensor t({1, static_cast<int>(image.height), static_cast<int>(image.width), c});
  for (std::size_t i = 0; i < bytes.size(); ++i) t.array()[static_cast<Eigen::Index>(i)] = bytes[i] / 255.0;
  return t;
}

VideoTensor read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if ((magic != "P6" && magic != "P5") || w < 1 || h < 1 || maxval != 255) {
    throw std::runtime_error("unsupported PPM header in " + path.string());
  }
  in.get();
  const int c = magic == "P6" ? 3 : 1;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * c);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw std::runtime_error("truncated PPM " + path.string());
  }
  VideoTensor t({1, h, w, c});
  for (std::size_t i = 0; i < bytes.size(); ++i) t.array()[static_cast<Eigen::Index>(i)] = bytes[i] / 255.0;
  return t;
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const VideoTensorF& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), 4);
  const Shape4& s = t.shape();
  for (int v : {s.frames, s.height, s.width, s.channels}) {
    const auto u = static_cast<std::uint32_t>(v);
    out.write(reinterpret_cast<const char*>(&u), sizeof u);
  }
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.array().size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

VideoTensorF read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kMagic) throw std::runtime_error(path.string() + " is not an L4DT tensor");
  std::array<std::uint32_t, 4> dims{};
  in.read(reinterpret_cast<char*>(dims.data()), sizeof dims);
  if (!in) throw std::runtime_error("truncated header in " + path.string());
  VideoTensorF t({static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]),
                  static_cast<int>(dims[3])});
  const auto bytes = static_cast<std::streamsize>(t.array().size() * sizeof(float));
  in.read(reinterpret_cast<char*>(t.data()), bytes);
  if (in.gcount() != bytes) throw std::runtime_error("truncated data in " + path.string());
  return t;
}

FrameFormat frame_format_from_string(const std::string& s) {
  if (s == "png") return FrameFormat::png;
  if (s == "ppm") return FrameFormat::ppm;
  throw std::invalid_argument("unknown frame format '" + s + "' (expected png or ppm)");
}

std::vector<std::filesystem::path> write_frames(const std::filesystem::path& dir,
                                                const VideoTensor& video, FrameFormat format) {
  if (video.channels() != 1 && video.channels() != 3) {
    throw std::invalid_argument("frame export needs 1 or 3 channels");
  }
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (int f = 0; f < video.frames(); ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.%s", f, format == FrameFormat::png ? "png" : "ppm");
    const auto path = dir / name;
    const auto bytes = frame_bytes(video, f);
    if (format == FrameFormat::png) {
      write_png(path, bytes, video.height(), video.width(), video.channels());
    } else {
      write_ppm(path, bytes, video.height(), video.width(), video.channels());
    }
    paths.push_back(path);
  }
  return paths;
}

VideoTensor read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm" || ext == ".pgm") return read_ppm(path);
  throw std::runtime_error("unsupported frame file " + path.string());
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && name.starts_with("frame_") &&
        (ext == ".png" || ext == ".ppm" || ext == ".pgm")) {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

VideoTensor read_frames(const std::filesystem::path& dir) {
  const auto paths = list_frames(dir);
  if (paths.empty()) throw std::runtime_error("no frame_* images in " + dir.string());
  const VideoTensor first = read_image(paths.front());
  VideoTensor video({static_cast<int>(paths.size()), first.height(), first.width(), first.channels()});
  video.frame(0) = first.frame(0);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const VideoTensor img = read_image(paths[i]);
    if (img.shape() != first.shape()) {
      throw std::runtime_error("frame " + paths[i].string() + " has shape " + to_string(img.shape()) +
                               ", expected " + to_string(first.shape()));
    }
    video.frame(static_cast<int>(i)) = img.frame(0);
  }
  return video;
}

}  // namespace light4d
