#include "vdepth/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "vdepth/errors.hpp"
#include "vdepth/transport.hpp"

namespace vdepth::metrics {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::micro>(to - from).count();
}

nlohmann::ordered_json latency_json(const session::LatencySummary& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["mean_us"] = s.mean_us;
  j["min_us"] = s.min_us;
  j["p50_us"] = s.p50_us;
  j["p95_us"] = s.p95_us;
  j["p99_us"] = s.p99_us;
  j["max_us"] = s.max_us;
  return j;
}

}  // namespace

std::vector<ByteSample> samples_from_messages(std::span<const wire::WireMessage> messages,
                                              std::optional<wire::ChannelKind> channel) {
  std::vector<ByteSample> out;
  for (const auto& msg : messages) {
    if (channel && msg.kind() != *channel) continue;
    out.push_back({msg.timestamp_us, msg.wire_size()});
  }
  return out;
}

std::vector<ByteSample> samples_from_trace(std::span<const netsim::TraceRecord> trace,
                                           const std::string& channel, netsim::Action event,
                                           std::optional<std::string> dst) {
  std::vector<ByteSample> out;
  for (const auto& r : trace) {
    if (r.channel != channel || r.event != event) continue;
    if (dst && r.dst != *dst) continue;
    out.push_back({r.time_us, r.bytes});
  }
  return out;
}

std::vector<WindowRate> bitrate_windows(std::vector<ByteSample> samples, std::uint64_t width_us,
                                        std::uint64_t step_us) {
  std::vector<WindowRate> out;
  if (samples.empty()) return out;
  if (width_us == 0 || step_us == 0) throw ParameterError("window width and step must be positive");
  std::sort(samples.begin(), samples.end(),
            [](const ByteSample& a, const ByteSample& b) { return a.time_us < b.time_us; });
  const std::uint64_t last = samples.back().time_us;
  const std::uint64_t count = last < width_us ? 1 : (last - width_us) / step_us + 1;

  // Two pointers over sorted samples; [lo, hi) is inside the current window.
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::uint64_t bytes = 0;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t start = k * step_us;
    const std::uint64_t end = start + width_us;
    while (hi < samples.size() && samples[hi].time_us < end) bytes += samples[hi++].bytes;
    while (lo < hi && samples[lo].time_us < start) bytes -= samples[lo++].bytes;
    out.push_back({start, 8.0 * static_cast<double>(bytes) * 1e6 / static_cast<double>(width_us)});
  }
  return out;
}

double max_bps(std::span<const WindowRate> windows) {
  double best = 0.0;
  for (const auto& w : windows) best = std::max(best, w.bps);
  return best;
}

std::uint64_t total_bytes(std::span<const ByteSample> samples) {
  std::uint64_t total = 0;
  for (const auto& s : samples) total += s.bytes;
  return total;
}

std::vector<FrameTiming> encode_bench(const synth::DepthStream& stream,
                                      const codec::ChangePolicy& policy) {
  codec::CodecState encoder(stream.geometry, policy);
  codec::CodecState decoder(stream.geometry, policy);
  std::vector<FrameTiming> out;
  out.reserve(stream.frames.size());
  std::uint32_t seq = 0;
  for (const auto& frame : stream.frames) {
    FrameTiming t;
    const auto t0 = Clock::now();
    const auto msg = transport::to_wire(codec::encode_next(encoder, frame), seq++);
    const auto bytes = wire::serialize(msg);
    const auto t1 = Clock::now();
    const auto decoded = codec::decode_packet(decoder, transport::from_wire(wire::parse(bytes)));
    const auto t2 = Clock::now();
    if (decoded.depth != encoder.last_reconstructed()->depth) {
      throw Error("bench: decoder diverged from encoder at frame " +
                  std::to_string(frame.frame_index));
    }
    t.encode_us = elapsed_us(t0, t1);
    t.decode_us = elapsed_us(t1, t2);
    t.keyframe = msg.msg_type == wire::msg_type::kKeyframe;
    t.wire_bytes = bytes.size();
    out.push_back(t);
  }
  return out;
}

BenchSummary summarize(std::span<const FrameTiming> timings) {
  BenchSummary s;
  s.frames = timings.size();
  if (timings.empty()) return s;
  for (const auto& t : timings) {
    s.mean_encode_us += t.encode_us;
    s.mean_decode_us += t.decode_us;
    s.max_encode_us = std::max(s.max_encode_us, t.encode_us);
    s.max_decode_us = std::max(s.max_decode_us, t.decode_us);
  }
  s.mean_encode_us /= static_cast<double>(timings.size());
  s.mean_decode_us /= static_cast<double>(timings.size());
  return s;
}

bool queue_growth(const netsim::LinkStats& stats) {
  const auto& waits = stats.waits;
  if (waits.size() < 2) return false;
  double mean_t = 0.0;
  double mean_w = 0.0;
  for (const auto& [t, w] : waits) {
    mean_t += static_cast<double>(t);
    mean_w += static_cast<double>(w);
  }
  mean_t /= static_cast<double>(waits.size());
  mean_w /= static_cast<double>(waits.size());
  double cov = 0.0;
  double var = 0.0;
  for (const auto& [t, w] : waits) {
    cov += (static_cast<double>(t) - mean_t) * (static_cast<double>(w) - mean_w);
    var += (static_cast<double>(t) - mean_t) * (static_cast<double>(t) - mean_t);
  }
  const double slope = var > 0.0 ? cov / var : 0.0;

  const std::uint64_t last_t = waits.back().first;
  std::uint64_t tail_max = 0;
  for (const auto& [t, w] : waits) {
    if (t + 1'000'000 > last_t) tail_max = std::max(tail_max, w);
  }
  return slope > 0.01 && tail_max > 100'000;
}

nlohmann::ordered_json simulation_report(const session::SimResult& result) {
  using wire::ChannelKind;
  nlohmann::ordered_json report;
  report["duration_s"] = result.duration_s;
  report["fps"] = result.fps;

  nlohmann::ordered_json sender;
  sender["depth_messages"] = result.sender.depth_messages;
  sender["keyframes"] = result.sender.keyframes;
  sender["forced_keyframes"] = result.sender.forced_keyframes;
  sender["keyframe_requests"] = result.sender.keyframe_requests;
  sender["color_messages"] = result.sender.color_messages;
  sender["color_payload_bytes"] = result.sender.color_payload_bytes;
  report["sender"] = sender;

  auto receivers = nlohmann::ordered_json::array();
  for (const auto& inst : result.instructors) {
    nlohmann::ordered_json r;
    r["node"] = inst.remote_computer;
    r["depth_frames_decoded"] = inst.receiver.frames_decoded;
    r["delivered_fps"] =
        result.duration_s > 0 ? inst.receiver.frames_decoded / result.duration_s : 0.0;
    r["desyncs"] = inst.receiver.desyncs;
    r["corrupt_payloads"] = inst.receiver.corrupt_payloads;
    r["sequence_gaps"] = inst.receiver.sequence_gaps;
    r["keyframe_requests_sent"] = inst.receiver.requests_sent;

    std::uint64_t depth_bytes = 0;
    for (const auto& m : inst.recorded_depth) depth_bytes += m.wire_size();
    r["depth_bytes_received"] = depth_bytes;
    const auto depth_windows =
        bitrate_windows(samples_from_messages(inst.recorded_depth, ChannelKind::kDepth));
    r["depth_max_window_bps"] = max_bps(depth_windows);
    const auto color_windows = bitrate_windows(
        samples_from_trace(result.trace, "color", netsim::Action::kSend, inst.remote_computer));
    r["color_max_window_bps"] = max_bps(color_windows);
    receivers.push_back(r);
  }
  report["receivers"] = receivers;

  nlohmann::ordered_json latency;
  for (auto kind : {ChannelKind::kDepth, ChannelKind::kColor, ChannelKind::kPose,
                    ChannelKind::kAnnotation, ChannelKind::kControl}) {
    const auto values = session::latencies(result, kind);
    latency[std::string(wire::to_string(kind))] = latency_json(session::summarize(values));
  }
  report["latency"] = latency;

  nlohmann::ordered_json links;
  bool any_growth = false;
  for (const auto& [name, stats] : result.links) {
    nlohmann::ordered_json l;
    l["messages"] = stats.messages;
    l["bytes"] = stats.bytes;
    l["retransmits"] = stats.retransmits;
    l["max_queue_wait_us"] = stats.max_queue_wait_us;
    const bool growth = queue_growth(stats);
    any_growth = any_growth || growth;
    l["queue_growth"] = growth;
    links[name] = l;
  }
  report["links"] = links;
  report["queue_growth"] = any_growth;

  nlohmann::ordered_json annotations;
  annotations["trainee_objects"] = result.trainee_objects.size();
  annotations["rejected_events"] = result.annotation_rejects;
  annotations["tables_match"] = result.trainee_objects == result.instructor_objects;
  report["annotations"] = annotations;
  report["poses_received"] = result.poses_received;
  report["trace_records"] = result.trace.size();
  return report;
}

void write_windows_csv(std::span<const WindowRate> windows, std::ostream& out) {
  out << "start_us,bps\n";
  for (const auto& w : windows) out << w.start_us << ',' << static_cast<std::uint64_t>(w.bps) << '\n';
}

nlohmann::ordered_json windows_json(std::span<const WindowRate> windows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& w : windows) arr.push_back({{"start_us", w.start_us}, {"bps", w.bps}});
  return arr;
}

}  // namespace vdepth::metrics
