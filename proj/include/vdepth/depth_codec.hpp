#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "vdepth/depth_frame.hpp"

namespace vdepth::codec {

struct ChangePolicy {
  // A pixel counts as changed when |cur - prev| > threshold_mm. 0 means any
  // difference, which makes the stream lossless.
  std::uint16_t threshold_mm = 0;
  // Frames between forced keyframes; 30 at 30 FPS is one per second.
  std::uint32_t keyframe_interval_frames = 30;
};

void validate(const ChangePolicy& policy);

// Full frame: DEFLATE over the little-endian depth samples.
struct KeyframePacket {
  std::uint32_t frame_index = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<std::uint8_t> compressed_payload;

  bool operator==(const KeyframePacket&) const = default;
};

// Changed pixels only: DEFLATE over [bitmask || changed samples]. The mask is
// ceil(pixels / 8) bytes, row-major, least significant bit first; samples are
// little-endian in mask scan order. changed_count is encoder-side bookkeeping;
// it is not carried on the wire and decoding derives it from the mask.
struct DeltaPacket {
  std::uint32_t frame_index = 0;
  std::uint32_t base_frame_index = 0;
  std::uint64_t timestamp_us = 0;
  std::uint32_t changed_count = 0;
  std::vector<std::uint8_t> compressed_payload;

  bool operator==(const DeltaPacket&) const = default;
};

using Packet = std::variant<KeyframePacket, DeltaPacket>;

enum class PacketKind { kKeyframe, kDelta };

struct ChangeSet {
  std::vector<std::uint8_t> bitmask;
  std::vector<std::uint16_t> changed_values;
  double change_fraction = 0.0;

  std::uint32_t changed_count() const {
    return static_cast<std::uint32_t>(changed_values.size());
  }
};

// Pixels of cur that differ from prev by more than threshold_mm.
// Throws DimensionError when the geometries differ.
ChangeSet change_mask(const DepthFrame& prev, const DepthFrame& cur,
                      std::uint16_t threshold_mm);

std::size_t mask_bytes(const Geometry& geometry);

KeyframePacket encode_keyframe(const DepthFrame& frame);

// Temporal-coherence state shared in shape by encoder and decoder. After both
// sides process frame k their reconstructions are bit-identical.
class CodecState {
 public:
  explicit CodecState(Geometry geometry = {}, ChangePolicy policy = {});

  const Geometry& geometry() const { return geometry_; }
  const ChangePolicy& policy() const { return policy_; }
  const std::optional<DepthFrame>& last_reconstructed() const { return last_; }
  std::uint32_t frames_since_keyframe() const { return frames_since_keyframe_; }
  bool keyframe_requested() const { return keyframe_requested_; }

  // Forces the next scheduled packet to be a keyframe.
  void request_keyframe() { keyframe_requested_ = true; }
  // Drops the reconstruction so the next packet must be a keyframe.
  void reset();

 private:
  friend KeyframePacket encode_keyframe(CodecState&, const DepthFrame&);
  friend DeltaPacket encode_delta(CodecState&, const DepthFrame&);
  friend DepthFrame decode_packet(CodecState&, const Packet&);

  void commit(DepthFrame reconstruction, bool keyframe);

  Geometry geometry_;
  ChangePolicy policy_;
  std::optional<DepthFrame> last_;
  std::uint32_t frames_since_keyframe_ = 0;
  bool keyframe_requested_ = false;
};

PacketKind schedule(const CodecState& state);

// Encodes a keyframe and resets the state's reconstruction to the frame.
KeyframePacket encode_keyframe(CodecState& state, const DepthFrame& frame);

// Encodes frame against the state's reconstruction and advances it to the
// decoder-visible result. Throws SequencingError unless frame follows the
// reconstruction directly.
DeltaPacket encode_delta(CodecState& state, const DepthFrame& frame);

// Encodes whichever packet schedule() asks for.
Packet encode_next(CodecState& state, const DepthFrame& frame);

// Throws FormatError on a corrupt payload and DesyncError when a delta does
// not apply to the current reconstruction. The state is unchanged on error.
DepthFrame decode_packet(CodecState& state, const Packet& packet);

std::uint32_t frame_index_of(const Packet& packet);
std::uint64_t timestamp_of(const Packet& packet);
const std::vector<std::uint8_t>& payload_of(const Packet& packet);

}  // namespace vdepth::codec
