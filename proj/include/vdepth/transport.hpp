#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vdepth/depth_codec.hpp"
#include "vdepth/scene_synth.hpp"
#include "vdepth/wire.hpp"

namespace vdepth::transport {

using wire::ChannelKind;
using wire::WireMessage;

// Depth packet <-> DEPTH channel message. The payload is the packet's
// compressed bytes; a delta's base is always frame_index - 1.
WireMessage to_wire(const codec::Packet& packet, std::uint32_t seq);
// Throws FormatError for a non-depth msg_type.
codec::Packet from_wire(const WireMessage& msg);

WireMessage keyframe_request(std::uint32_t seq, std::uint32_t last_good_frame,
                             std::uint64_t now_us);

// Encodes a whole stream as DEPTH channel messages (the ".vds" content).
std::vector<WireMessage> encode_stream(const synth::DepthStream& stream,
                                       const codec::ChangePolicy& policy);

// Decodes DEPTH messages back into frames. Throws DesyncError when the first
// message is not a keyframe and FormatError on corrupt payloads.
synth::DepthStream decode_stream(const std::vector<WireMessage>& messages,
                                 Geometry geometry, int fps);

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual Geometry geometry() const = 0;
  // Next frame, or nullopt once exhausted.
  virtual std::optional<DepthFrame> next() = 0;
};

// Frames from a synthetic scene, optionally passed through a noise model.
class SyntheticSource : public FrameSource {
 public:
  SyntheticSource(synth::SceneParams params, std::uint32_t frame_count,
                  std::optional<synth::NoiseModel> noise = std::nullopt);
  Geometry geometry() const override { return params_.geometry; }
  std::optional<DepthFrame> next() override;

 private:
  synth::SceneParams params_;
  std::uint32_t frame_count_;
  std::optional<synth::NoiseModel> noise_;
  std::uint32_t produced_ = 0;
};

class StreamSource : public FrameSource {
 public:
  explicit StreamSource(synth::DepthStream stream) : stream_(std::move(stream)) {}
  Geometry geometry() const override { return stream_.geometry; }
  std::optional<DepthFrame> next() override;

 private:
  synth::DepthStream stream_;
  std::size_t position_ = 0;
};

// Opaque stand-in for the color video channel: pseudo-random payloads whose
// sizes add up to bitrate_bps at the configured frame rate.
struct ColorStub {
  bool enabled = true;
  std::uint64_t bitrate_bps = 1'900'000;
  int fps = 30;
  std::string geometry_label = "1920x1080";
  std::uint64_t seed = 0;

  // Payload bytes of color frame k. Cumulative size through frame k is
  // floor((k + 1) * bitrate / (8 * fps)).
  std::size_t frame_bytes(std::uint32_t k) const;
};

struct SenderConfig {
  int fps = kDefaultFps;
  codec::ChangePolicy policy;
  ColorStub color;
};

struct SenderStats {
  std::uint32_t depth_messages = 0;
  std::uint32_t keyframes = 0;
  std::uint32_t forced_keyframes = 0;
  std::uint32_t color_messages = 0;
  std::uint64_t color_payload_bytes = 0;
  std::uint32_t keyframe_requests = 0;
};

// Camera-side state machine. The caller drives it with tick(now); each call
// emits at most one depth frame, once its capture time is due.
class Sender {
 public:
  Sender(std::unique_ptr<FrameSource> source, SenderConfig config);

  std::vector<WireMessage> tick(std::uint64_t now_us);
  // Handles CONTROL messages; a keyframe request forces the next frame to be
  // a keyframe.
  void on_control(const WireMessage& msg);

  // Capture time of the next frame, or nullopt once the source is exhausted.
  std::optional<std::uint64_t> next_due_us() const;
  bool finished() const { return finished_; }
  const SenderStats& stats() const { return stats_; }
  const codec::CodecState& codec_state() const { return codec_; }

 private:
  std::unique_ptr<FrameSource> source_;
  SenderConfig config_;
  codec::CodecState codec_;
  std::optional<DepthFrame> pending_;
  std::uint32_t ticks_ = 0;
  std::array<std::uint32_t, wire::kChannelCount> seq_{};
  std::uint64_t color_rng_;
  SenderStats stats_;
  bool finished_ = false;
};

enum class EventKind {
  kNone,
  kFrameDecoded,
  kColor,
  kPose,
  kAnnotation,
  kControl,
  kRequestSent,
};

struct ReceiverEvent {
  EventKind kind = EventKind::kNone;
  std::optional<DepthFrame> frame;        // kFrameDecoded
  std::optional<WireMessage> message;     // pose, annotation, control, or the
                                          // keyframe request to send
  std::string error;                      // why a request was sent
};

struct ReceiverStats {
  std::uint32_t frames_decoded = 0;
  std::uint32_t desyncs = 0;
  std::uint32_t corrupt_payloads = 0;
  std::uint32_t sequence_gaps = 0;
  std::uint32_t requests_sent = 0;
  std::uint32_t skipped_before_keyframe = 0;
};

// Viewer-side state machine. Channels are reliable and ordered, so a
// sequence gap is a contract violation; it is counted and answered with a
// keyframe request like a desync.
class Receiver {
 public:
  explicit Receiver(Geometry geometry, codec::ChangePolicy policy = {});

  ReceiverEvent ingest(const WireMessage& msg, std::uint64_t now_us);

  const ReceiverStats& stats() const { return stats_; }
  const codec::CodecState& codec_state() const { return codec_; }

 private:
  ReceiverEvent request(std::string reason, std::uint64_t now_us);
  bool check_sequence(const WireMessage& msg);

  codec::CodecState codec_;
  std::array<std::optional<std::uint32_t>, wire::kChannelCount> expected_seq_{};
  std::uint32_t control_seq_ = 0;
  bool request_outstanding_ = false;
  ReceiverStats stats_;
};

}  // namespace vdepth::transport
