#include "vdepth/scene_synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "support/zlib_oracle.hpp"
#include "vdepth/errors.hpp"

namespace {

using namespace vdepth;

std::size_t diff_pixels(const DepthFrame& a, const DepthFrame& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.depth.size(); ++i) n += a.depth[i] != b.depth[i];
  return n;
}

TEST(SceneSynthTest, StaticSceneNeverChanges) {
  const synth::SceneParams params;
  const auto stream = synth::generate(params, 10);
  ASSERT_EQ(stream.frames.size(), 10u);
  for (std::size_t i = 1; i < stream.frames.size(); ++i) {
    EXPECT_EQ(diff_pixels(stream.frames[i - 1], stream.frames[i]), 0u);
  }
  EXPECT_EQ(stream.frames[0].at(0, 0), 1500);
  EXPECT_EQ(stream.frames[0].at(0, 287), 1500 + 2 * 287);
}

TEST(SceneSynthTest, CalibratedSceneHitsTargetFraction) {
  for (double target : {0.02, 0.05, 0.10, 0.25}) {
    const auto params = synth::calibrate({.target_change_fraction = target, .seed = 3});
    ASSERT_FALSE(params.blobs.empty());
    const double pixels = static_cast<double>(params.geometry.pixels());
    const auto predicted = synth::predicted_changed_pixels(params);
    EXPECT_LE(predicted, std::floor(target * pixels));
    EXPECT_GE(predicted, 0.8 * target * pixels);

    auto prev = synth::synth_frame(params, 0);
    for (std::uint32_t i = 1; i < 90; ++i) {
      const auto cur = synth::synth_frame(params, i);
      // Brute-force frame diff agrees with the analytic count on every frame.
      ASSERT_EQ(diff_pixels(prev, cur), predicted) << "target " << target << " frame " << i;
      prev = cur;
    }
  }
}

TEST(SceneSynthTest, TenPercentSceneStaysNearTarget) {
  const auto params = synth::calibrate({.target_change_fraction = 0.10, .seed = 7});
  const auto predicted = synth::predicted_changed_pixels(params);
  const double fraction = static_cast<double>(predicted) / 92160.0;
  EXPECT_NEAR(fraction, 0.10, 0.01);
  EXPECT_LT(fraction, 0.12);
}

TEST(SceneSynthTest, SameSeedSameStream) {
  const synth::SceneParams p{.target_change_fraction = 0.1, .seed = 42};
  EXPECT_EQ(synth::generate(synth::calibrate(p), 20), synth::generate(synth::calibrate(p), 20));
  synth::SceneParams q = p;
  q.seed = 43;
  EXPECT_NE(synth::calibrate(p).blobs, synth::calibrate(q).blobs);
}

TEST(SceneSynthTest, OversizedBlobRejected) {
  synth::SceneParams params;
  params.blobs.push_back({.radius_px = 200, .depth_mm = 1000});
  EXPECT_THROW(synth::validate(params), ParameterError);
  EXPECT_THROW(synth::synth_frame(params, 0), ParameterError);
}

TEST(SceneSynthTest, OutOfRangeTargetRejected) {
  EXPECT_THROW(synth::calibrate({.target_change_fraction = 1.5}), ParameterError);
  EXPECT_THROW(synth::calibrate({.target_change_fraction = -0.1}), ParameterError);
}

TEST(NoiseTest, ZeroModelIsIdentity) {
  const auto frame = synth::synth_frame(synth::calibrate({.target_change_fraction = 0.1}), 3);
  const synth::NoiseModel zero{.bias_offset_mm = 0, .bias_slope = 0, .jitter_stddev_mm = 0};
  EXPECT_EQ(synth::apply_noise(frame, zero), frame);
}

TEST(NoiseTest, SystematicErrorWithinBound) {
  EXPECT_DOUBLE_EQ(synth::bias_bound_mm({}, 2000), 13.0);
  double min_scale = 1.0;
  double max_scale = -1.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const synth::NoiseModel model{.seed = seed};
    const double scale = synth::bias_scale(model);
    min_scale = std::min(min_scale, scale);
    max_scale = std::max(max_scale, scale);
    for (int d = 500; d <= 5000; d += 50) {
      const int err = synth::systematic_error_mm(model, static_cast<std::uint16_t>(d));
      ASSERT_LE(std::abs(err), 11.0 + 0.001 * d) << "seed " << seed << " depth " << d;
    }
  }
  // Seeds cover the whole [-1, 1] range of the bound.
  EXPECT_LT(min_scale, -0.95);
  EXPECT_GT(max_scale, 0.95);
}

TEST(NoiseTest, FlatFrameShiftsUniformly) {
  const synth::NoiseModel model{.seed = 5};
  const DepthFrame flat(Geometry{}, 0, 0, 2000);
  const auto noisy = synth::apply_noise(flat, model);
  const int expected = 2000 + synth::systematic_error_mm(model, 2000);
  EXPECT_LE(std::abs(expected - 2000), 13);
  for (auto d : noisy.depth) ASSERT_EQ(d, expected);
}

TEST(NoiseTest, SystematicErrorIsStableInTime) {
  const synth::NoiseModel model{.seed = 8};
  const auto params = synth::calibrate({.target_change_fraction = 0.1});
  const auto a = synth::synth_frame(params, 0);
  auto b = a;
  b.frame_index = 57;
  b.timestamp_us = 1'900'000;
  EXPECT_EQ(synth::apply_noise(a, model).depth, synth::apply_noise(b, model).depth);
}

TEST(NoiseTest, JitterIsSeededAndInvalidPixelsStayZero) {
  const synth::NoiseModel model{.jitter_stddev_mm = 3.0, .seed = 9};
  DepthFrame f(Geometry{}, 4, 0, 2500);
  f.depth[100] = 0;
  const auto a = synth::apply_noise(f, model);
  EXPECT_EQ(a, synth::apply_noise(f, model));
  EXPECT_EQ(a.depth[100], 0);
  auto g = f;
  g.frame_index = 5;
  EXPECT_NE(a.depth, synth::apply_noise(g, model).depth);
}

TEST(RawIoTest, EmptyStreamIsHeaderOnly) {
  const synth::DepthStream empty;
  std::ostringstream out;
  synth::write_raw(empty, out);
  const auto bytes = out.str();
  ASSERT_EQ(bytes.size(), 18u);
  EXPECT_EQ(bytes.substr(0, 4), "VD16");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]) | (static_cast<unsigned char>(bytes[5]) << 8), 320);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]) | (static_cast<unsigned char>(bytes[7]) << 8), 288);
  std::istringstream in(bytes);
  EXPECT_EQ(synth::read_raw(in), empty);
}

TEST(RawIoTest, FileSizeAndRoundTrip) {
  const auto params = synth::calibrate({.target_change_fraction = 0.1, .seed = 2});
  const auto stream = synth::generate(params, 300);
  const auto path = oracle::temp_dir("raw_io") / "scene.d16";
  synth::write_raw(stream, path);
  EXPECT_EQ(std::filesystem::file_size(path), 18u + 300u * 184320u);
  const auto back = synth::read_raw(path);
  EXPECT_EQ(back, stream);
  EXPECT_EQ(back.frames[299].timestamp_us, 9966666u);
}

TEST(RawIoTest, RejectsBadMagicTruncationAndTrailingBytes) {
  const auto stream = synth::generate({.geometry = {8, 4}}, 2);
  std::ostringstream out;
  synth::write_raw(stream, out);
  const auto good = out.str();

  auto bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream a(bad_magic);
  EXPECT_THROW(synth::read_raw(a), FormatError);

  std::istringstream b(good.substr(0, good.size() - 1));
  EXPECT_THROW(synth::read_raw(b), FormatError);

  std::istringstream c(good + "x");
  EXPECT_THROW(synth::read_raw(c), FormatError);

  std::istringstream d(good.substr(0, 10));
  EXPECT_THROW(synth::read_raw(d), FormatError);
}

}  // namespace
