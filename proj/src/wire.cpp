#include "vdepth/wire.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "vdepth/errors.hpp"

namespace vdepth::wire {
namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    value = static_cast<T>((value << 8) | bytes[offset + i]);
  }
  return value;
}

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kDepth: return "depth";
    case ChannelKind::kColor: return "color";
    case ChannelKind::kPose: return "pose";
    case ChannelKind::kAnnotation: return "annotation";
    case ChannelKind::kControl: return "control";
  }
  return "unknown";
}

void serialize(const WireMessage& msg, std::vector<std::uint8_t>& out) {
  if (msg.payload.size() > 0xffffffffu) throw FormatError("payload exceeds u32 length");
  out.reserve(out.size() + msg.wire_size());
  out.push_back(msg.channel);
  out.push_back(msg.msg_type);
  put_le(out, msg.seq);
  put_le(out, msg.frame_index);
  put_le(out, msg.timestamp_us);
  put_le(out, static_cast<std::uint32_t>(msg.payload.size()));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
}

std::vector<std::uint8_t> serialize(const WireMessage& msg) {
  std::vector<std::uint8_t> out;
  serialize(msg, out);
  return out;
}

WireMessage parse_prefix(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  if (bytes.size() < kHeaderBytes) {
    throw FormatError("wire message: " + std::to_string(bytes.size()) +
                      " bytes is shorter than the header");
  }
  WireMessage msg;
  msg.channel = bytes[0];
  msg.msg_type = bytes[1];
  msg.seq = get_le<std::uint32_t>(bytes, 2);
  msg.frame_index = get_le<std::uint32_t>(bytes, 6);
  msg.timestamp_us = get_le<std::uint64_t>(bytes, 10);
  const auto len = get_le<std::uint32_t>(bytes, 18);
  if (bytes.size() - kHeaderBytes < len) {
    throw FormatError("wire message: payload_len " + std::to_string(len) +
                      " exceeds the remaining " +
                      std::to_string(bytes.size() - kHeaderBytes) + " bytes");
  }
  auto payload = bytes.subspan(kHeaderBytes, len);
  msg.payload.assign(payload.begin(), payload.end());
  consumed = kHeaderBytes + len;
  return msg;
}

WireMessage parse(std::span<const std::uint8_t> bytes) {
  std::size_t consumed = 0;
  auto msg = parse_prefix(bytes, consumed);
  if (consumed != bytes.size()) {
    throw FormatError("wire message: payload_len does not match buffer length");
  }
  return msg;
}

std::vector<WireMessage> parse_all(std::span<const std::uint8_t> bytes) {
  std::vector<WireMessage> out;
  while (!bytes.empty()) {
    std::size_t consumed = 0;
    out.push_back(parse_prefix(bytes, consumed));
    bytes = bytes.subspan(consumed);
  }
  return out;
}

void write_vds(const std::filesystem::path& path, std::span<const WireMessage> messages) {
  std::vector<std::uint8_t> bytes;
  for (const auto& msg : messages) serialize(msg, bytes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<WireMessage> read_vds(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_all(bytes);
}

}  // namespace vdepth::wire
