#include "vdepth/scene_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "vdepth/errors.hpp"

namespace vdepth::synth {
namespace {

constexpr std::array<char, 4> kMagic = {'V', 'D', '1', '6'};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a 64-bit hash.
double unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int floor_mod(long long a, int m) {
  long long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

int isqrt(int n) {
  int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Changed pixels when a disk of radius r shifts horizontally by v on a
// torus of the given width. Each raster row is an arc; the change is the
// symmetric difference of the old and new arcs.
std::size_t disk_shift_change(int r, int v, int width) {
  v = floor_mod(v, width);
  std::size_t total = 0;
  for (int dy = -r; dy <= r; ++dy) {
    const int len = 2 * isqrt(r * r - dy * dy) + 1;
    const int overlap =
        std::min(len, std::max(0, len - v) + std::max(0, v + len - width));
    total += static_cast<std::size_t>(2 * (len - overlap));
  }
  return total;
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_le(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void validate(const SceneParams& params) {
  const auto& g = params.geometry;
  if (g.width < 1 || g.height < 1 || g.width > 65535 || g.height > 65535) {
    throw ParameterError("scene geometry must be between 1x1 and 65535x65535");
  }
  if (params.fps < 1 || params.fps > 65535) {
    throw ParameterError("fps must be in [1, 65535]");
  }
  if (!(params.target_change_fraction >= 0.0 && params.target_change_fraction <= 1.0)) {
    throw ParameterError("target change fraction must be in [0, 1]");
  }
  for (const auto& blob : params.blobs) {
    if (blob.radius_px < 0) throw ParameterError("blob radius must be non-negative");
    if (2 * blob.radius_px + 1 > g.width || 2 * blob.radius_px + 1 > g.height) {
      throw ParameterError("blob of radius " + std::to_string(blob.radius_px) +
                           " does not fit in the frame");
    }
  }
}

SceneParams calibrate(SceneParams params) {
  validate(params);
  if (!params.blobs.empty() || params.target_change_fraction == 0.0) return params;

  const int w = params.geometry.width;
  const int h = params.geometry.height;
  const auto budget = static_cast<std::size_t>(
      std::floor(params.target_change_fraction * static_cast<double>(params.geometry.pixels())));
  const int preferred_radius = std::max(1, std::min(w, h) / 4);

  struct Choice {
    int blobs = 0;
    int radius = 0;
    int velocity = 0;
    std::size_t changed = 0;
  } best;

  auto consider = [&](int blobs, int r) {
    // Change grows with the shift up to half the width, so keep the largest
    // shift that stays within budget.
    Choice local;
    for (int v = 1; v <= w / 2; ++v) {
      const std::size_t changed = static_cast<std::size_t>(blobs) * disk_shift_change(r, v, w);
      if (changed > budget) break;
      if (changed > local.changed) local = {blobs, r, v, changed};
    }
    if (local.changed > best.changed) best = local;
    return best.changed >= budget - budget / 100;
  };

  bool done = false;
  for (int blobs = 1; !done && blobs * 3 <= h; ++blobs) {
    const int max_radius = std::min((h / blobs - 1) / 2, (w - 1) / 2);
    for (int r = std::min(preferred_radius, max_radius); !done && r >= 1; --r) {
      done = consider(blobs, r);
    }
    for (int r = preferred_radius + 1; !done && r <= max_radius; ++r) {
      done = consider(blobs, r);
    }
  }
  if (best.changed == 0 || best.changed < budget - budget / 5) {
    throw ParameterError("cannot reach a change fraction of " +
                         std::to_string(params.target_change_fraction) +
                         " with moving blobs at this geometry");
  }

  const int lane = 2 * best.radius + 1;
  std::uint64_t state = params.seed;
  auto next = [&state] { return state = splitmix64(state); };
  const int y_offset = static_cast<int>(next() % static_cast<std::uint64_t>(h - best.blobs * lane + 1));
  const auto near = static_cast<int>(params.background_depth_mm) - 500;
  const auto blob_depth = static_cast<std::uint16_t>(std::max(300, near));
  for (int j = 0; j < best.blobs; ++j) {
    Blob blob;
    blob.radius_px = best.radius;
    blob.depth_mm = blob_depth;
    blob.velocity_x = best.velocity;
    blob.start_x = static_cast<int>(next() % static_cast<std::uint64_t>(w));
    blob.start_y = y_offset + j * lane + best.radius;
    params.blobs.push_back(blob);
  }
  return params;
}

std::size_t predicted_changed_pixels(const SceneParams& calibrated) {
  std::size_t total = 0;
  for (const auto& blob : calibrated.blobs) {
    total += disk_shift_change(blob.radius_px, blob.velocity_x, calibrated.geometry.width);
  }
  return total;
}

DepthFrame synth_frame(const SceneParams& params, std::uint32_t frame_index) {
  validate(params);
  const auto& g = params.geometry;
  DepthFrame frame(g, frame_index, frame_timestamp_us(frame_index, params.fps));
  for (int y = 0; y < g.height; ++y) {
    const auto row_depth = std::min<long>(
        65535, params.background_depth_mm +
                   static_cast<long>(params.background_slope_mm_per_row) * y);
    std::fill_n(frame.depth.begin() + static_cast<std::ptrdiff_t>(y) * g.width, g.width,
                static_cast<std::uint16_t>(row_depth));
  }
  const long long k = frame_index;
  for (const auto& blob : params.blobs) {
    const int cx = floor_mod(blob.start_x + blob.velocity_x * k, g.width);
    const int cy = floor_mod(blob.start_y + blob.velocity_y * k, g.height);
    const int r = blob.radius_px;
    for (int dy = -r; dy <= r; ++dy) {
      const int half = isqrt(r * r - dy * dy);
      const int y = floor_mod(cy + dy, g.height);
      for (int dx = -half; dx <= half; ++dx) {
        frame.at(floor_mod(cx + dx, g.width), y) = blob.depth_mm;
      }
    }
  }
  return frame;
}

double bias_bound_mm(const NoiseModel& model, double depth_mm) {
  return model.bias_offset_mm + model.bias_slope * depth_mm;
}

double bias_scale(const NoiseModel& model) {
  return 2.0 * unit(splitmix64(model.seed ^ 0xbb67ae8584caa73bull)) - 1.0;
}

int systematic_error_mm(const NoiseModel& model, std::uint16_t depth_mm) {
  return static_cast<int>(std::trunc(bias_scale(model) * bias_bound_mm(model, depth_mm)));
}

DepthFrame apply_noise(const DepthFrame& frame, const NoiseModel& model) {
  validate(frame);
  DepthFrame out = frame;
  const std::uint64_t frame_key =
      splitmix64(model.seed ^ 0x6a09e667f3bcc909ull) ^ splitmix64(frame.frame_index);
  for (std::size_t i = 0; i < out.depth.size(); ++i) {
    const std::uint16_t d = frame.depth[i];
    if (d == 0) continue;
    double noisy = d + systematic_error_mm(model, d);
    if (model.jitter_stddev_mm > 0.0) {
      // Box-Muller on two hashed uniforms keeps the stream platform-stable.
      const std::uint64_t h = splitmix64(frame_key ^ splitmix64(i + 1));
      const double u1 = 1.0 - unit(h);
      const double u2 = unit(splitmix64(h));
      const double gauss =
          std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      noisy += std::round(gauss * model.jitter_stddev_mm);
    }
    out.depth[i] = static_cast<std::uint16_t>(std::clamp(noisy, 1.0, 65535.0));
  }
  return out;
}

DepthStream generate(const SceneParams& params, std::uint32_t frame_count) {
  const SceneParams scene = calibrate(params);
  DepthStream stream{scene.geometry, scene.fps, {}};
  stream.frames.reserve(frame_count);
  for (std::uint32_t k = 0; k < frame_count; ++k) {
    stream.frames.push_back(synth_frame(scene, k));
  }
  return stream;
}

void write_raw(const DepthStream& stream, std::ostream& out) {
  const auto& g = stream.geometry;
  if (g.width < 1 || g.height < 1 || g.width > 65535 || g.height > 65535 ||
      stream.fps < 1 || stream.fps > 65535) {
    throw ParameterError("stream geometry or fps does not fit the raw header");
  }
  out.write(kMagic.data(), kMagic.size());
  put_u16(out, static_cast<std::uint16_t>(g.width));
  put_u16(out, static_cast<std::uint16_t>(g.height));
  put_u16(out, static_cast<std::uint16_t>(stream.fps));
  put_u32(out, static_cast<std::uint32_t>(stream.frames.size()));
  put_u32(out, 0);
  std::vector<std::uint8_t> bytes;
  for (const auto& frame : stream.frames) {
    validate(frame);
    if (frame.geometry != g) throw DimensionError("frame geometry differs from stream");
    bytes.clear();
    append_le16(frame.depth, bytes);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw FormatError("failed writing raw depth stream");
}

void write_raw(const DepthStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_raw(stream, out);
}

DepthStream read_raw(std::istream& in) {
  unsigned char header[kRawHeaderBytes];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (in.gcount() != static_cast<std::streamsize>(sizeof header)) {
    throw FormatError("raw depth stream: truncated header");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), header)) {
    throw FormatError("raw depth stream: bad magic");
  }
  DepthStream stream;
  stream.geometry = {static_cast<int>(get_le(header + 4, 2)),
                     static_cast<int>(get_le(header + 6, 2))};
  stream.fps = static_cast<int>(get_le(header + 8, 2));
  const std::uint32_t count = get_le(header + 10, 4);
  if (stream.geometry.width == 0 || stream.geometry.height == 0 || stream.fps == 0) {
    throw FormatError("raw depth stream: zero geometry or fps");
  }
  if (get_le(header + 14, 4) != 0) {
    throw FormatError("raw depth stream: reserved field is not zero");
  }

  const std::size_t frame_bytes = 2 * stream.geometry.pixels();
  std::vector<std::uint8_t> buffer(frame_bytes);
  for (std::uint32_t k = 0; k < count; ++k) {
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(frame_bytes));
    if (in.gcount() != static_cast<std::streamsize>(frame_bytes)) {
      throw FormatError("raw depth stream: truncated frame " + std::to_string(k));
    }
    DepthFrame frame;
    frame.geometry = stream.geometry;
    frame.frame_index = k;
    frame.timestamp_us = frame_timestamp_us(k, stream.fps);
    frame.depth = read_le16(buffer);
    stream.frames.push_back(std::move(frame));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("raw depth stream: trailing bytes after last frame");
  }
  return stream;
}

DepthStream read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_raw(in);
}

}  // namespace vdepth::synth
