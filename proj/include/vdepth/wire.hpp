#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace vdepth::wire {

enum class ChannelKind : std::uint8_t {
  kDepth = 0,
  kColor = 1,
  kPose = 2,
  kAnnotation = 3,
  kControl = 4,
};

inline constexpr int kChannelCount = 5;

std::string_view to_string(ChannelKind kind);

// msg_type values. Unknown values survive a parse/serialize roundtrip.
namespace msg_type {
inline constexpr std::uint8_t kKeyframe = 0;
inline constexpr std::uint8_t kDelta = 1;
inline constexpr std::uint8_t kColor = 2;
inline constexpr std::uint8_t kPose = 3;
inline constexpr std::uint8_t kAnnotation = 4;
inline constexpr std::uint8_t kKeyframeRequest = 5;
}  // namespace msg_type

// Header layout, little-endian:
//   u8 channel | u8 msg_type | u32 seq | u32 frame_index | u64 timestamp_us |
//   u32 payload_len
inline constexpr std::size_t kHeaderBytes = 22;

struct WireMessage {
  std::uint8_t channel = 0;
  std::uint8_t msg_type = 0;
  std::uint32_t seq = 0;
  std::uint32_t frame_index = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<std::uint8_t> payload;

  ChannelKind kind() const { return static_cast<ChannelKind>(channel); }
  std::size_t wire_size() const { return kHeaderBytes + payload.size(); }

  bool operator==(const WireMessage&) const = default;
};

void serialize(const WireMessage& msg, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> serialize(const WireMessage& msg);

// Parses exactly one message occupying the whole buffer.
// Throws FormatError on a short buffer or a payload length mismatch.
WireMessage parse(std::span<const std::uint8_t> bytes);

// Parses one message from the front of bytes and reports how many bytes it
// used. Throws FormatError when the buffer ends mid-message.
WireMessage parse_prefix(std::span<const std::uint8_t> bytes, std::size_t& consumed);

// ".vds" files: serialized DEPTH channel messages back to back.
void write_vds(const std::filesystem::path& path, std::span<const WireMessage> messages);
std::vector<WireMessage> read_vds(const std::filesystem::path& path);
std::vector<WireMessage> parse_all(std::span<const std::uint8_t> bytes);

}  // namespace vdepth::wire
