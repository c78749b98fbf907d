#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "vdepth/depth_frame.hpp"

namespace vdepth::synth {

// A flat disk in front of the background. Motion wraps toroidally at the
// frame edges so the per-frame change stays stationary.
struct Blob {
  int radius_px = 0;
  std::uint16_t depth_mm = 0;
  int velocity_x = 0;  // px per frame
  int velocity_y = 0;
  int start_x = 0;     // center at frame 0
  int start_y = 0;

  bool operator==(const Blob&) const = default;
};

struct SceneParams {
  Geometry geometry;
  int fps = kDefaultFps;
  std::uint16_t background_depth_mm = 1500;
  // Background is a plane tilted away from the camera, row by row.
  std::uint16_t background_slope_mm_per_row = 2;
  std::vector<Blob> blobs;
  // Used only when blobs is empty: calibrate() derives blobs whose motion
  // changes this fraction of pixels per frame.
  double target_change_fraction = 0.0;
  std::uint64_t seed = 0;
};

// Throws ParameterError for blobs that do not fit or out-of-range values.
void validate(const SceneParams& params);

// Fills params.blobs from target_change_fraction when no blobs are given.
// The chosen motion changes at most target * pixels per frame, as close to
// it as the raster allows.
SceneParams calibrate(SceneParams params);

// Pixels that change between consecutive frames for calibrated lane blobs;
// exposed so tests can cross-check it against a frame diff.
std::size_t predicted_changed_pixels(const SceneParams& calibrated);

DepthFrame synth_frame(const SceneParams& params, std::uint32_t frame_index);

struct NoiseModel {
  // Systematic error: scale * (offset + slope * distance), where scale is a
  // seeded constant in [-1, 1]. It depends on distance only, so every pixel
  // at the same true depth gets the same error in every frame.
  double bias_offset_mm = 11.0;
  double bias_slope = 0.001;
  // Zero-mean Gaussian noise per pixel and frame; off by default.
  double jitter_stddev_mm = 0.0;
  std::uint64_t seed = 0;
};

// Bound on the systematic error at depth d.
double bias_bound_mm(const NoiseModel& model, double depth_mm);

// The seeded scale in [-1, 1].
double bias_scale(const NoiseModel& model);

// Systematic error at depth d; truncated toward zero.
int systematic_error_mm(const NoiseModel& model, std::uint16_t depth_mm);

// Invalid (0) pixels stay 0; valid pixels are clamped to [1, 65535].
DepthFrame apply_noise(const DepthFrame& frame, const NoiseModel& model);

struct DepthStream {
  Geometry geometry;
  int fps = kDefaultFps;
  std::vector<DepthFrame> frames;

  bool operator==(const DepthStream&) const = default;
};

DepthStream generate(const SceneParams& params, std::uint32_t frame_count);

// ".d16" raw stream: "VD16", u16 width, u16 height, u16 fps, u32 frame_count,
// u32 reserved (0), then row-major little-endian u16 frames.
inline constexpr std::size_t kRawHeaderBytes = 18;

void write_raw(const DepthStream& stream, std::ostream& out);
void write_raw(const DepthStream& stream, const std::filesystem::path& path);
// Throws FormatError on bad magic, truncation or trailing bytes.
DepthStream read_raw(std::istream& in);
DepthStream read_raw(const std::filesystem::path& path);

}  // namespace vdepth::synth
