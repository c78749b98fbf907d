#include "vdepth/depth_frame.hpp"

#include <string>

#include "vdepth/errors.hpp"

namespace vdepth {

DepthFrame::DepthFrame(Geometry g, std::uint32_t index, std::uint64_t timestamp,
                       std::uint16_t fill)
    : geometry(g), frame_index(index), timestamp_us(timestamp) {
  if (g.width < 1 || g.height < 1) {
    throw DimensionError("depth frame must be at least 1x1");
  }
  depth.assign(g.pixels(), fill);
}

void validate(const DepthFrame& frame) {
  if (frame.geometry.width < 1 || frame.geometry.height < 1) {
    throw DimensionError("depth frame must be at least 1x1");
  }
  if (frame.depth.size() != frame.geometry.pixels()) {
    throw DimensionError("depth frame holds " + std::to_string(frame.depth.size()) +
                         " samples, geometry needs " +
                         std::to_string(frame.geometry.pixels()));
  }
}

std::uint64_t frame_timestamp_us(std::uint32_t frame_index, int fps) {
  return static_cast<std::uint64_t>(frame_index) * 1'000'000ull /
         static_cast<std::uint64_t>(fps);
}

void append_le16(std::span<const std::uint16_t> values,
                 std::vector<std::uint8_t>& out) {
  out.reserve(out.size() + 2 * values.size());
  for (auto v : values) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
}

std::vector<std::uint16_t> read_le16(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint16_t> values(bytes.size() / 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
  }
  return values;
}

}  // namespace vdepth
