#include "vdepth/transport.hpp"

#include <string>

#include "vdepth/errors.hpp"

namespace vdepth::transport {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::size_t channel_index(ChannelKind kind) { return static_cast<std::size_t>(kind); }

}  // namespace

WireMessage to_wire(const codec::Packet& packet, std::uint32_t seq) {
  WireMessage msg;
  msg.channel = static_cast<std::uint8_t>(ChannelKind::kDepth);
  msg.msg_type = std::holds_alternative<codec::KeyframePacket>(packet)
                     ? wire::msg_type::kKeyframe
                     : wire::msg_type::kDelta;
  msg.seq = seq;
  msg.frame_index = codec::frame_index_of(packet);
  msg.timestamp_us = codec::timestamp_of(packet);
  msg.payload = codec::payload_of(packet);
  return msg;
}

codec::Packet from_wire(const WireMessage& msg) {
  if (msg.kind() != ChannelKind::kDepth) {
    throw FormatError("message on channel " + std::to_string(msg.channel) +
                      " is not depth");
  }
  if (msg.msg_type == wire::msg_type::kKeyframe) {
    return codec::KeyframePacket{msg.frame_index, msg.timestamp_us, msg.payload};
  }
  if (msg.msg_type == wire::msg_type::kDelta) {
    if (msg.frame_index == 0) throw FormatError("delta message for frame 0");
    return codec::DeltaPacket{msg.frame_index, msg.frame_index - 1, msg.timestamp_us,
                              0, msg.payload};
  }
  throw FormatError("unknown depth msg_type " + std::to_string(msg.msg_type));
}

WireMessage keyframe_request(std::uint32_t seq, std::uint32_t last_good_frame,
                             std::uint64_t now_us) {
  WireMessage msg;
  msg.channel = static_cast<std::uint8_t>(ChannelKind::kControl);
  msg.msg_type = wire::msg_type::kKeyframeRequest;
  msg.seq = seq;
  msg.frame_index = last_good_frame;
  msg.timestamp_us = now_us;
  return msg;
}

std::vector<WireMessage> encode_stream(const synth::DepthStream& stream,
                                       const codec::ChangePolicy& policy) {
  codec::CodecState state(stream.geometry, policy);
  std::vector<WireMessage> out;
  out.reserve(stream.frames.size());
  std::uint32_t seq = 0;
  for (const auto& frame : stream.frames) {
    out.push_back(to_wire(codec::encode_next(state, frame), seq++));
  }
  return out;
}

synth::DepthStream decode_stream(const std::vector<WireMessage>& messages,
                                 Geometry geometry, int fps) {
  codec::CodecState state(geometry);
  synth::DepthStream stream{geometry, fps, {}};
  stream.frames.reserve(messages.size());
  for (const auto& msg : messages) {
    stream.frames.push_back(codec::decode_packet(state, from_wire(msg)));
  }
  return stream;
}

SyntheticSource::SyntheticSource(synth::SceneParams params, std::uint32_t frame_count,
                                 std::optional<synth::NoiseModel> noise)
    : params_(synth::calibrate(std::move(params))), frame_count_(frame_count),
      noise_(noise) {}

std::optional<DepthFrame> SyntheticSource::next() {
  if (produced_ >= frame_count_) return std::nullopt;
  auto frame = synth::synth_frame(params_, produced_++);
  if (noise_) return synth::apply_noise(frame, *noise_);
  return frame;
}

std::optional<DepthFrame> StreamSource::next() {
  if (position_ >= stream_.frames.size()) return std::nullopt;
  return stream_.frames[position_++];
}

std::size_t ColorStub::frame_bytes(std::uint32_t k) const {
  const std::uint64_t denom = 8ull * static_cast<std::uint64_t>(fps);
  const std::uint64_t through_k = (static_cast<std::uint64_t>(k) + 1) * bitrate_bps / denom;
  const std::uint64_t before_k = static_cast<std::uint64_t>(k) * bitrate_bps / denom;
  return static_cast<std::size_t>(through_k - before_k);
}

Sender::Sender(std::unique_ptr<FrameSource> source, SenderConfig config)
    : source_(std::move(source)), config_(config),
      codec_(source_->geometry(), config.policy), color_rng_(config.color.seed) {
  if (config_.fps < 1) throw ParameterError("sender fps must be positive");
  if (config_.color.enabled && (config_.color.fps < 1 || config_.color.bitrate_bps == 0)) {
    throw ParameterError("color stub needs positive fps and bitrate");
  }
  pending_ = source_->next();
  finished_ = !pending_;
}

std::optional<std::uint64_t> Sender::next_due_us() const {
  if (finished_) return std::nullopt;
  return pending_->timestamp_us;
}

std::vector<WireMessage> Sender::tick(std::uint64_t now_us) {
  std::vector<WireMessage> out;
  if (finished_ || pending_->timestamp_us > now_us) return out;

  const bool forced = codec_.keyframe_requested() && codec_.last_reconstructed() &&
                      codec_.frames_since_keyframe() < config_.policy.keyframe_interval_frames;
  auto packet = codec::encode_next(codec_, *pending_);
  if (std::holds_alternative<codec::KeyframePacket>(packet)) {
    ++stats_.keyframes;
    if (forced) ++stats_.forced_keyframes;
  }
  out.push_back(to_wire(packet, seq_[channel_index(ChannelKind::kDepth)]++));
  ++stats_.depth_messages;

  if (config_.color.enabled) {
    // Color frames due up to this depth frame's capture time.
    const auto depth_time = pending_->timestamp_us;
    for (;;) {
      const auto k = stats_.color_messages;
      const auto due = frame_timestamp_us(k, config_.color.fps);
      if (due > depth_time) break;
      WireMessage color;
      color.channel = static_cast<std::uint8_t>(ChannelKind::kColor);
      color.msg_type = wire::msg_type::kColor;
      color.seq = seq_[channel_index(ChannelKind::kColor)]++;
      color.frame_index = k;
      color.timestamp_us = due;
      color.payload.resize(config_.color.frame_bytes(k));
      for (std::size_t i = 0; i < color.payload.size(); i += 8) {
        const std::uint64_t bits = splitmix64(color_rng_);
        for (std::size_t b = 0; b < 8 && i + b < color.payload.size(); ++b) {
          color.payload[i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
        }
      }
      stats_.color_payload_bytes += color.payload.size();
      ++stats_.color_messages;
      out.push_back(std::move(color));
    }
  }

  ++ticks_;
  pending_ = source_->next();
  finished_ = !pending_;
  return out;
}

void Sender::on_control(const WireMessage& msg) {
  if (msg.kind() == ChannelKind::kControl &&
      msg.msg_type == wire::msg_type::kKeyframeRequest) {
    ++stats_.keyframe_requests;
    codec_.request_keyframe();
  }
}

Receiver::Receiver(Geometry geometry, codec::ChangePolicy policy)
    : codec_(geometry, policy) {}

bool Receiver::check_sequence(const WireMessage& msg) {
  if (msg.channel >= wire::kChannelCount) return true;
  auto& expected = expected_seq_[msg.channel];
  const bool in_order = !expected || *expected == msg.seq;
  if (!in_order) ++stats_.sequence_gaps;
  expected = msg.seq + 1;
  return in_order;
}

ReceiverEvent Receiver::request(std::string reason, std::uint64_t now_us) {
  ReceiverEvent event;
  event.error = std::move(reason);
  if (request_outstanding_) return event;
  request_outstanding_ = true;
  ++stats_.requests_sent;
  const auto& last = codec_.last_reconstructed();
  event.kind = EventKind::kRequestSent;
  event.message = keyframe_request(control_seq_++, last ? last->frame_index : 0, now_us);
  return event;
}

ReceiverEvent Receiver::ingest(const WireMessage& msg, std::uint64_t now_us) {
  const bool in_order = check_sequence(msg);
  ReceiverEvent event;
  switch (msg.kind()) {
    case ChannelKind::kDepth: {
      if (!in_order && msg.msg_type != wire::msg_type::kKeyframe) {
        codec_.reset();
      }
      try {
        event.frame = codec::decode_packet(codec_, from_wire(msg));
        event.kind = EventKind::kFrameDecoded;
        ++stats_.frames_decoded;
        if (msg.msg_type == wire::msg_type::kKeyframe) request_outstanding_ = false;
      } catch (const DesyncError& e) {
        if (!codec_.last_reconstructed()) ++stats_.skipped_before_keyframe;
        ++stats_.desyncs;
        return request(e.what(), now_us);
      } catch (const FormatError& e) {
        ++stats_.corrupt_payloads;
        codec_.reset();
        return request(e.what(), now_us);
      }
      return event;
    }
    case ChannelKind::kColor:
      event.kind = EventKind::kColor;
      return event;
    case ChannelKind::kPose:
      event.kind = EventKind::kPose;
      break;
    case ChannelKind::kAnnotation:
      event.kind = EventKind::kAnnotation;
      break;
    case ChannelKind::kControl:
      event.kind = EventKind::kControl;
      break;
    default:
      return event;
  }
  event.message = msg;
  return event;
}

}  // namespace vdepth::transport
