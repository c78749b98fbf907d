#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vdepth {

inline constexpr int kDefaultWidth = 320;
inline constexpr int kDefaultHeight = 288;
inline constexpr int kDefaultFps = 30;

struct Geometry {
  int width = kDefaultWidth;
  int height = kDefaultHeight;

  std::size_t pixels() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const Geometry&) const = default;
};

// One 16-bit depth image in millimeters. A value of 0 marks a pixel with no
// return; the codec treats it like any other value.
struct DepthFrame {
  Geometry geometry;
  std::uint32_t frame_index = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<std::uint16_t> depth;  // row-major, geometry.pixels() values

  DepthFrame() = default;
  DepthFrame(Geometry g, std::uint32_t index, std::uint64_t timestamp,
             std::uint16_t fill = 0);

  std::uint16_t at(int x, int y) const {
    return depth[static_cast<std::size_t>(y) * geometry.width + x];
  }
  std::uint16_t& at(int x, int y) {
    return depth[static_cast<std::size_t>(y) * geometry.width + x];
  }

  bool operator==(const DepthFrame&) const = default;
};

// Throws DimensionError unless the frame is well formed.
void validate(const DepthFrame& frame);

// Capture timestamp of frame_index for a stream starting at t = 0.
std::uint64_t frame_timestamp_us(std::uint32_t frame_index, int fps);

// Little-endian byte views of depth samples.
void append_le16(std::span<const std::uint16_t> values,
                 std::vector<std::uint8_t>& out);
std::vector<std::uint16_t> read_le16(std::span<const std::uint8_t> bytes);

}  // namespace vdepth
