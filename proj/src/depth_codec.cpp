#include "vdepth/depth_codec.hpp"

#include <bit>
#include <string>

#include "vdepth/deflate.hpp"
#include "vdepth/errors.hpp"

namespace vdepth::codec {
namespace {

void require_geometry(const Geometry& expected, const DepthFrame& frame) {
  validate(frame);
  if (frame.geometry != expected) {
    throw DimensionError(
        "frame is " + std::to_string(frame.geometry.width) + "x" +
        std::to_string(frame.geometry.height) + ", stream is " +
        std::to_string(expected.width) + "x" + std::to_string(expected.height));
  }
}

std::vector<std::uint8_t> compress_frame(const DepthFrame& frame) {
  std::vector<std::uint8_t> raw;
  append_le16(frame.depth, raw);
  return deflate::compress(raw);
}

}  // namespace

void validate(const ChangePolicy& policy) {
  if (policy.keyframe_interval_frames < 1) {
    throw ParameterError("keyframe interval must be at least one frame");
  }
}

std::size_t mask_bytes(const Geometry& geometry) {
  return (geometry.pixels() + 7) / 8;
}

ChangeSet change_mask(const DepthFrame& prev, const DepthFrame& cur,
                      std::uint16_t threshold_mm) {
  validate(prev);
  require_geometry(prev.geometry, cur);
  ChangeSet out;
  const std::size_t n = cur.depth.size();
  out.bitmask.assign(mask_bytes(cur.geometry), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int diff = static_cast<int>(cur.depth[i]) - static_cast<int>(prev.depth[i]);
    if (diff > threshold_mm || -diff > threshold_mm) {
      out.bitmask[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
      out.changed_values.push_back(cur.depth[i]);
    }
  }
  out.change_fraction = static_cast<double>(out.changed_values.size()) /
                        static_cast<double>(n);
  return out;
}

KeyframePacket encode_keyframe(const DepthFrame& frame) {
  validate(frame);
  return {frame.frame_index, frame.timestamp_us, compress_frame(frame)};
}

CodecState::CodecState(Geometry geometry, ChangePolicy policy)
    : geometry_(geometry), policy_(policy) {
  if (geometry.width < 1 || geometry.height < 1) {
    throw DimensionError("stream geometry must be at least 1x1");
  }
  validate(policy_);
}

void CodecState::reset() {
  last_.reset();
  frames_since_keyframe_ = 0;
}

void CodecState::commit(DepthFrame reconstruction, bool keyframe) {
  last_ = std::move(reconstruction);
  if (keyframe) {
    frames_since_keyframe_ = 1;
    keyframe_requested_ = false;
  } else {
    ++frames_since_keyframe_;
  }
}

PacketKind schedule(const CodecState& state) {
  if (!state.last_reconstructed() || state.keyframe_requested() ||
      state.frames_since_keyframe() >= state.policy().keyframe_interval_frames) {
    return PacketKind::kKeyframe;
  }
  return PacketKind::kDelta;
}

KeyframePacket encode_keyframe(CodecState& state, const DepthFrame& frame) {
  require_geometry(state.geometry_, frame);
  auto packet = encode_keyframe(frame);
  state.commit(frame, true);
  return packet;
}

DeltaPacket encode_delta(CodecState& state, const DepthFrame& frame) {
  require_geometry(state.geometry_, frame);
  if (!state.last_ || state.last_->frame_index + 1 != frame.frame_index) {
    throw SequencingError("delta for frame " + std::to_string(frame.frame_index) +
                          " does not follow the last reconstructed frame");
  }
  ChangeSet changes = change_mask(*state.last_, frame, state.policy_.threshold_mm);

  std::vector<std::uint8_t> raw = changes.bitmask;
  append_le16(changes.changed_values, raw);

  DeltaPacket packet{frame.frame_index, state.last_->frame_index,
                     frame.timestamp_us, changes.changed_count(),
                     deflate::compress(raw)};

  // Decoder-visible result: changed pixels take the new value, the rest hold.
  DepthFrame recon = *state.last_;
  recon.frame_index = frame.frame_index;
  recon.timestamp_us = frame.timestamp_us;
  std::size_t next = 0;
  for (std::size_t i = 0; i < recon.depth.size(); ++i) {
    if (changes.bitmask[i >> 3] & (1u << (i & 7))) {
      recon.depth[i] = changes.changed_values[next++];
    }
  }
  state.commit(std::move(recon), false);
  return packet;
}

Packet encode_next(CodecState& state, const DepthFrame& frame) {
  if (schedule(state) == PacketKind::kKeyframe) {
    return encode_keyframe(state, frame);
  }
  return encode_delta(state, frame);
}

DepthFrame decode_packet(CodecState& state, const Packet& packet) {
  const Geometry& g = state.geometry_;
  const std::size_t pixels = g.pixels();

  if (const auto* key = std::get_if<KeyframePacket>(&packet)) {
    auto raw = deflate::decompress(key->compressed_payload, 2 * pixels);
    if (raw.size() != 2 * pixels) {
      throw FormatError("keyframe payload holds " + std::to_string(raw.size()) +
                        " bytes, expected " + std::to_string(2 * pixels));
    }
    DepthFrame frame;
    frame.geometry = g;
    frame.frame_index = key->frame_index;
    frame.timestamp_us = key->timestamp_us;
    frame.depth = read_le16(raw);
    state.commit(frame, true);
    return frame;
  }

  const auto& delta = std::get<DeltaPacket>(packet);
  if (delta.base_frame_index + 1 != delta.frame_index) {
    throw FormatError("delta base must be the immediately preceding frame");
  }
  if (!state.last_ || state.last_->frame_index != delta.base_frame_index) {
    throw DesyncError("delta for frame " + std::to_string(delta.frame_index) +
                      " needs base " + std::to_string(delta.base_frame_index));
  }
  const std::size_t mask_len = mask_bytes(g);
  auto raw = deflate::decompress(delta.compressed_payload, mask_len + 2 * pixels);
  if (raw.size() < mask_len) throw FormatError("delta payload shorter than its mask");
  std::size_t popcount = 0;
  for (std::size_t b = 0; b < mask_len; ++b) popcount += std::popcount(raw[b]);
  if (raw.size() != mask_len + 2 * popcount) {
    throw FormatError("delta payload does not hold one sample per mask bit");
  }
  if (pixels % 8 != 0 && (raw[mask_len - 1] >> (pixels % 8)) != 0) {
    throw FormatError("delta mask marks pixels past the frame end");
  }

  DepthFrame frame = *state.last_;
  frame.frame_index = delta.frame_index;
  frame.timestamp_us = delta.timestamp_us;
  const std::uint8_t* values = raw.data() + mask_len;
  for (std::size_t i = 0; i < pixels; ++i) {
    if (raw[i >> 3] & (1u << (i & 7))) {
      frame.depth[i] = static_cast<std::uint16_t>(values[0] | (values[1] << 8));
      values += 2;
    }
  }
  state.commit(frame, false);
  return frame;
}

std::uint32_t frame_index_of(const Packet& packet) {
  return std::visit([](const auto& p) { return p.frame_index; }, packet);
}

std::uint64_t timestamp_of(const Packet& packet) {
  return std::visit([](const auto& p) { return p.timestamp_us; }, packet);
}

const std::vector<std::uint8_t>& payload_of(const Packet& packet) {
  return std::visit(
      [](const auto& p) -> const std::vector<std::uint8_t>& {
        return p.compressed_payload;
      },
      packet);
}

}  // namespace vdepth::codec
