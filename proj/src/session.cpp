#include "vdepth/session.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numeric>

#include "json.hpp"

#include "vdepth/errors.hpp"

namespace vdepth::session {
namespace {

using wire::ChannelKind;
using wire::WireMessage;

void put_f32(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

float get_f32(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | in[offset + static_cast<std::size_t>(i)];
  return std::bit_cast<float>(bits);
}

std::array<float, 4> unit_quaternion(double angle, double ax, double ay, double az) {
  const double norm = std::sqrt(ax * ax + ay * ay + az * az);
  const double s = std::sin(angle / 2) / norm;
  return {static_cast<float>(std::cos(angle / 2)), static_cast<float>(ax * s),
          static_cast<float>(ay * s), static_cast<float>(az * s)};
}

// Time of the k-th tick of a periodic stream starting at t = 0.
std::uint64_t tick_us(std::uint64_t k, double rate_hz) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(k) * 1e6 / rate_hz));
}

NodeRole parse_role(const nlohmann::json& j) { return role_from_string(j.get<std::string>()); }

}  // namespace

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kCameraComputer: return "CAMERA_COMPUTER";
    case NodeRole::kLocalTraineeHmd: return "LOCAL_TRAINEE_HMD";
    case NodeRole::kRemoteInstructorHmd: return "REMOTE_INSTRUCTOR_HMD";
    case NodeRole::kRemoteComputer: return "REMOTE_COMPUTER";
  }
  return "UNKNOWN";
}

NodeRole role_from_string(std::string_view name) {
  for (auto role : {NodeRole::kCameraComputer, NodeRole::kLocalTraineeHmd,
                    NodeRole::kRemoteInstructorHmd, NodeRole::kRemoteComputer}) {
    if (to_string(role) == name) return role;
  }
  throw TopologyError("unknown node role '" + std::string(name) + "'");
}

std::vector<std::uint8_t> encode_pose(const PoseSample& sample) {
  if (sample.joints.size() > 255) throw ParameterError("pose holds more than 255 joints");
  std::vector<std::uint8_t> out;
  out.reserve(4 + 28 * sample.joints.size());
  out.push_back(static_cast<std::uint8_t>(sample.node));
  out.push_back(static_cast<std::uint8_t>(sample.kind));
  out.push_back(sample.frame_id);
  out.push_back(static_cast<std::uint8_t>(sample.joints.size()));
  for (const auto& joint : sample.joints) {
    for (float v : joint.position) put_f32(out, v);
    for (float v : joint.rotation) put_f32(out, v);
  }
  return out;
}

PoseSample decode_pose(std::span<const std::uint8_t> payload, std::uint64_t timestamp_us) {
  if (payload.size() < 4) throw FormatError("pose payload shorter than its header");
  PoseSample sample;
  sample.node = static_cast<NodeRole>(payload[0]);
  sample.kind = static_cast<PoseKind>(payload[1]);
  sample.frame_id = payload[2];
  sample.timestamp_us = timestamp_us;
  const std::size_t count = payload[3];
  if (payload.size() != 4 + 28 * count) throw FormatError("pose payload size mismatch");
  sample.joints.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t base = 4 + 28 * j;
    for (std::size_t c = 0; c < 3; ++c) sample.joints[j].position[c] = get_f32(payload, base + 4 * c);
    for (std::size_t c = 0; c < 4; ++c) sample.joints[j].rotation[c] = get_f32(payload, base + 12 + 4 * c);
  }
  return sample;
}

std::vector<std::uint8_t> encode_annotation(const AnnotationEvent& event) {
  std::vector<std::uint8_t> out;
  out.reserve(kAnnotationPayloadBytes);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(event.object_id >> (8 * i)));
  out.push_back(static_cast<std::uint8_t>(event.op));
  out.push_back(static_cast<std::uint8_t>(event.shape));
  out.push_back(static_cast<std::uint8_t>(event.mesh_id & 0xff));
  out.push_back(static_cast<std::uint8_t>(event.mesh_id >> 8));
  for (float v : event.pose) put_f32(out, v);
  for (float v : event.scale) put_f32(out, v);
  return out;
}

AnnotationEvent decode_annotation(std::span<const std::uint8_t> payload,
                                  std::uint64_t timestamp_us) {
  if (payload.size() != kAnnotationPayloadBytes) {
    throw FormatError("annotation payload must be 48 bytes");
  }
  AnnotationEvent event;
  event.object_id = static_cast<std::uint32_t>(payload[0] | (payload[1] << 8) |
                                               (payload[2] << 16)) |
                    (static_cast<std::uint32_t>(payload[3]) << 24);
  if (payload[4] > 2 || payload[5] > 2) throw FormatError("annotation op or shape out of range");
  event.op = static_cast<AnnotationOp>(payload[4]);
  event.shape = static_cast<ShapeKind>(payload[5]);
  event.mesh_id = static_cast<std::uint16_t>(payload[6] | (payload[7] << 8));
  for (std::size_t i = 0; i < 7; ++i) event.pose[i] = get_f32(payload, 8 + 4 * i);
  for (std::size_t i = 0; i < 3; ++i) event.scale[i] = get_f32(payload, 36 + 4 * i);
  event.timestamp_us = timestamp_us;
  return event;
}

AnnotationStatus apply_annotation(ObjectTable& table, const AnnotationEvent& event) {
  auto it = table.find(event.object_id);
  switch (event.op) {
    case AnnotationOp::kCreate:
      if (it != table.end()) return AnnotationStatus::kDuplicateObject;
      table.emplace(event.object_id,
                    SceneObject{event.shape, event.mesh_id, event.pose, event.scale});
      return AnnotationStatus::kApplied;
    case AnnotationOp::kUpdate:
      if (it == table.end()) return AnnotationStatus::kUnknownObject;
      it->second.pose = event.pose;
      it->second.scale = event.scale;
      return AnnotationStatus::kApplied;
    case AnnotationOp::kDelete:
      if (it == table.end()) return AnnotationStatus::kUnknownObject;
      table.erase(it);
      return AnnotationStatus::kApplied;
  }
  return AnnotationStatus::kUnknownObject;
}

ObjectTable replay(std::span<const AnnotationEvent> log) {
  ObjectTable table;
  for (const auto& event : log) apply_annotation(table, event);
  return table;
}

SessionSpec default_session(int instructors) {
  if (instructors < 1) throw TopologyError("a session needs at least one instructor pair");
  SessionSpec spec;
  const netsim::LinkConfig lan{100'000'000, 5.0, 0.0, 0.0, 0};
  auto add = [&spec, &lan](std::string name, NodeRole role) {
    const std::string link = name + "-uplink";
    spec.links[link] = lan;
    spec.nodes.push_back({std::move(name), role, link});
  };
  add("camera-computer", NodeRole::kCameraComputer);
  add("trainee-hmd", NodeRole::kLocalTraineeHmd);
  for (int i = 0; i < instructors; ++i) {
    add("instructor-hmd-" + std::to_string(i), NodeRole::kRemoteInstructorHmd);
    add("remote-computer-" + std::to_string(i), NodeRole::kRemoteComputer);
  }
  spec.scene.target_change_fraction = 0.10;
  spec.scene.seed = 7;
  spec.noise = synth::NoiseModel{};
  return spec;
}

SessionSpec parse_session(std::string_view json_text) {
  SessionSpec spec = default_session();
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (doc.contains("duration_s")) spec.duration_s = doc["duration_s"].get<double>();
    if (doc.contains("links")) {
      spec.links.clear();
      for (const auto& l : doc["links"]) {
        netsim::LinkConfig c;
        c.bandwidth_bps = l.value("bandwidth_bps", c.bandwidth_bps);
        c.latency_ms = l.value("latency_ms", c.latency_ms);
        c.jitter_ms_stddev = l.value("jitter_ms_stddev", c.jitter_ms_stddev);
        c.loss_prob = l.value("loss_prob", c.loss_prob);
        c.seed = l.value("seed", c.seed);
        netsim::validate(c);
        spec.links[l.at("name").get<std::string>()] = c;
      }
    }
    if (doc.contains("nodes")) {
      spec.nodes.clear();
      for (const auto& n : doc["nodes"]) {
        const NodeRole role = parse_role(n.at("role"));
        std::string name = n.value("name", std::string(to_string(role)) + "-" +
                                               std::to_string(spec.nodes.size()));
        spec.nodes.push_back({std::move(name), role, n.at("link").get<std::string>()});
      }
    }
    if (doc.contains("scene")) {
      const auto& s = doc["scene"];
      spec.scene.geometry.width = s.value("width", spec.scene.geometry.width);
      spec.scene.geometry.height = s.value("height", spec.scene.geometry.height);
      spec.scene.fps = s.value("fps", spec.scene.fps);
      spec.scene.background_depth_mm = s.value("background_depth_mm", spec.scene.background_depth_mm);
      spec.scene.target_change_fraction = s.value("change_fraction", spec.scene.target_change_fraction);
      spec.scene.seed = s.value("seed", spec.scene.seed);
      if (s.contains("blobs")) {
        for (const auto& b : s["blobs"]) {
          synth::Blob blob;
          blob.radius_px = b.at("radius_px").get<int>();
          blob.depth_mm = b.at("depth_mm").get<std::uint16_t>();
          blob.velocity_x = b.value("velocity_x", 0);
          blob.velocity_y = b.value("velocity_y", 0);
          blob.start_x = b.value("start_x", 0);
          blob.start_y = b.value("start_y", 0);
          spec.scene.blobs.push_back(blob);
        }
      }
    }
    if (doc.contains("noise")) {
      const auto& n = doc["noise"];
      if (!n.value("enabled", true)) {
        spec.noise.reset();
      } else {
        synth::NoiseModel m;
        m.bias_offset_mm = n.value("bias_offset_mm", m.bias_offset_mm);
        m.bias_slope = n.value("bias_slope", m.bias_slope);
        m.jitter_stddev_mm = n.value("jitter_stddev_mm", m.jitter_stddev_mm);
        m.seed = n.value("seed", m.seed);
        spec.noise = m;
      }
    }
    if (doc.contains("policy")) {
      const auto& p = doc["policy"];
      spec.sender.policy.threshold_mm = p.value("threshold_mm", spec.sender.policy.threshold_mm);
      spec.sender.policy.keyframe_interval_frames =
          p.value("keyframe_interval_frames", spec.sender.policy.keyframe_interval_frames);
    }
    if (doc.contains("color")) {
      const auto& c = doc["color"];
      auto& color = spec.sender.color;
      color.enabled = c.value("enabled", color.enabled);
      color.bitrate_bps = c.value("bitrate_bps", color.bitrate_bps);
      color.fps = c.value("fps", color.fps);
      color.seed = c.value("seed", color.seed);
    }
    if (doc.contains("pose")) {
      const auto& p = doc["pose"];
      spec.pose.rate_hz = p.value("rate_hz", spec.pose.rate_hz);
      spec.pose.hands = p.value("hands", spec.pose.hands);
      spec.pose.joints_per_hand = p.value("joints_per_hand", spec.pose.joints_per_hand);
      spec.pose.head = p.value("head", spec.pose.head);
    }
    if (doc.contains("annotation")) {
      spec.annotation.rate_hz = doc["annotation"].value("rate_hz", spec.annotation.rate_hz);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("session file: ") + e.what());
  }
  return spec;
}

SessionSpec load_session(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open session file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_session(text);
}

std::size_t Topology::fan_out(ChannelKind channel, std::size_t src) const {
  return static_cast<std::size_t>(std::count_if(routes.begin(), routes.end(), [&](const Route& r) {
    return r.channel == channel && r.src == src;
  }));
}

Topology build_topology(const SessionSpec& spec) {
  Topology topo;
  topo.nodes = spec.nodes;
  std::vector<std::size_t> cameras;
  std::vector<std::size_t> trainees;
  std::vector<std::size_t> hmds;
  std::vector<std::size_t> computers;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const auto& node = spec.nodes[i];
    if (!spec.links.contains(node.link)) {
      throw TopologyError("node '" + node.name + "' uses unknown link '" + node.link + "'");
    }
    switch (node.role) {
      case NodeRole::kCameraComputer: cameras.push_back(i); break;
      case NodeRole::kLocalTraineeHmd: trainees.push_back(i); break;
      case NodeRole::kRemoteInstructorHmd: hmds.push_back(i); break;
      case NodeRole::kRemoteComputer: computers.push_back(i); break;
    }
  }
  if (cameras.size() != 1) {
    throw TopologyError("a session needs exactly one camera computer, found " +
                        std::to_string(cameras.size()));
  }
  if (trainees.size() != 1) {
    throw TopologyError("a session needs exactly one local trainee HMD, found " +
                        std::to_string(trainees.size()));
  }
  if (hmds.empty() || hmds.size() != computers.size()) {
    throw TopologyError("instructor HMDs and remote computers must pair up, found " +
                        std::to_string(hmds.size()) + " and " +
                        std::to_string(computers.size()));
  }
  topo.camera = cameras.front();
  topo.trainee = trainees.front();
  for (std::size_t i = 0; i < hmds.size(); ++i) {
    topo.instructor_pairs.emplace_back(hmds[i], computers[i]);
  }
  for (const auto& [hmd, computer] : topo.instructor_pairs) {
    topo.routes.push_back({ChannelKind::kDepth, topo.camera, computer, false});
    topo.routes.push_back({ChannelKind::kColor, topo.camera, computer, false});
    topo.routes.push_back({ChannelKind::kControl, computer, topo.camera, true});
    topo.routes.push_back({ChannelKind::kPose, hmd, topo.trainee, false});
    topo.routes.push_back({ChannelKind::kAnnotation, hmd, topo.trainee, false});
  }
  return topo;
}

namespace {

// Instructor-side synthetic motion: head and hands drift on slow circles.
std::vector<PoseSample> synth_poses(const PoseConfig& config, std::size_t instructor,
                                    std::uint64_t t_us) {
  std::vector<PoseSample> out;
  const double t = static_cast<double>(t_us) * 1e-6;
  const double phase = 0.5 * t + static_cast<double>(instructor);
  if (config.head) {
    PoseSample head;
    head.kind = PoseKind::kHead;
    head.timestamp_us = t_us;
    Joint j;
    j.position = {static_cast<float>(0.1 * std::cos(phase)), 1.6f,
                  static_cast<float>(0.1 * std::sin(phase))};
    j.rotation = unit_quaternion(0.2 * std::sin(phase), 0, 1, 0);
    head.joints.push_back(j);
    out.push_back(std::move(head));
  }
  for (int hand = 0; hand < config.hands; ++hand) {
    PoseSample sample;
    sample.kind = PoseKind::kHand;
    sample.frame_id = static_cast<std::uint8_t>(hand);
    sample.timestamp_us = t_us;
    const double side = hand == 0 ? -0.2 : 0.2;
    for (int k = 0; k < config.joints_per_hand; ++k) {
      Joint j;
      const double a = phase + 0.05 * k;
      j.position = {static_cast<float>(side + 0.02 * std::cos(a)), 1.1f + 0.004f * static_cast<float>(k),
                    static_cast<float>(0.3 + 0.02 * std::sin(a))};
      j.rotation = unit_quaternion(a, 0.3, 1.0, 0.1 * k);
      sample.joints.push_back(j);
    }
    out.push_back(std::move(sample));
  }
  return out;
}

// Scripted annotation activity for one instructor: create an object, move it
// a few times, delete it, repeat with the next shape.
class AnnotationScript {
 public:
  explicit AnnotationScript(std::size_t instructor)
      : base_id_(static_cast<std::uint32_t>(1000 * (instructor + 1))) {}

  AnnotationEvent next(std::uint64_t t_us) {
    const std::uint32_t step = count_++ % 6;
    AnnotationEvent event;
    event.timestamp_us = t_us;
    if (step == 0) {
      current_ = base_id_ + object_++;
      event.op = AnnotationOp::kCreate;
      event.shape = static_cast<ShapeKind>(object_ % 3);
      event.mesh_id = event.shape == ShapeKind::kTool ? 7 : 0;
      event.scale = {0.05f, 0.05f, 0.1f};
    } else if (step == 5) {
      event.op = AnnotationOp::kDelete;
    } else {
      event.op = AnnotationOp::kUpdate;
      event.scale = {0.05f, 0.05f, 0.1f};
    }
    event.object_id = current_;
    const float offset = 0.01f * static_cast<float>(step);
    event.pose = {0.1f + offset, 0.9f, 0.4f - offset, 1.0f, 0.0f, 0.0f, 0.0f};
    return event;
  }

 private:
  std::uint32_t base_id_;
  std::uint32_t count_ = 0;
  std::uint32_t object_ = 0;
  std::uint32_t current_ = 0;
};

}  // namespace

SimResult run(const SessionSpec& spec) {
  SimResult result;
  result.topology = build_topology(spec);
  result.duration_s = spec.duration_s;
  result.fps = spec.scene.fps;
  if (!(spec.duration_s >= 0.0)) throw ParameterError("duration must be non-negative");

  const auto& topo = result.topology;
  const auto& nodes = topo.nodes;
  const auto end_us = static_cast<std::uint64_t>(std::llround(spec.duration_s * 1e6));

  netsim::Network net;
  for (const auto& [name, config] : spec.links) net.add_link(name, config);
  auto& events = net.events();

  const auto frame_count =
      static_cast<std::uint32_t>(std::llround(spec.duration_s * spec.scene.fps));
  transport::SenderConfig sender_config = spec.sender;
  sender_config.fps = spec.scene.fps;
  transport::Sender sender(
      std::make_unique<transport::SyntheticSource>(spec.scene, frame_count, spec.noise),
      sender_config);

  std::vector<transport::Receiver> receivers;
  result.instructors.resize(topo.instructor_pairs.size());
  for (std::size_t i = 0; i < topo.instructor_pairs.size(); ++i) {
    receivers.emplace_back(spec.scene.geometry, spec.sender.policy);
    result.instructors[i].remote_computer = nodes[topo.instructor_pairs[i].second].name;
  }

  auto envelope = [&](std::size_t src, std::size_t dst, const WireMessage& msg) {
    return netsim::Network::Envelope{nodes[src].link,
                                     std::string(wire::to_string(msg.kind())),
                                     msg.seq,
                                     msg.wire_size(),
                                     nodes[src].name,
                                     nodes[dst].name};
  };
  auto record_latency = [&result, &nodes](const WireMessage& msg, std::size_t dst,
                                          std::uint64_t now) {
    result.latencies.push_back(
        {msg.kind(), nodes[dst].name, msg.timestamp_us, now, msg.wire_size()});
  };

  // Camera computer -> remote computers.
  std::function<void()> camera_tick = [&]() {
    const auto now = events.now_us();
    for (auto& msg : sender.tick(now)) {
      auto shared = std::make_shared<const WireMessage>(std::move(msg));
      for (std::size_t i = 0; i < topo.instructor_pairs.size(); ++i) {
        const std::size_t computer = topo.instructor_pairs[i].second;
        net.send(envelope(topo.camera, computer, *shared), [&, shared, i, computer](std::uint64_t at) {
          record_latency(*shared, computer, at);
          auto& mine = result.instructors[i];
          if (shared->kind() == ChannelKind::kDepth) mine.recorded_depth.push_back(*shared);
          auto ev = receivers[i].ingest(*shared, at);
          if (ev.kind == transport::EventKind::kFrameDecoded) mine.last_frame = std::move(ev.frame);
          if (ev.kind == transport::EventKind::kRequestSent) {
            auto request = std::make_shared<const WireMessage>(std::move(*ev.message));
            net.send(envelope(computer, topo.camera, *request), [&, request](std::uint64_t at2) {
              record_latency(*request, topo.camera, at2);
              sender.on_control(*request);
            });
          }
        });
      }
    }
    if (auto due = sender.next_due_us(); due && *due < end_us) {
      events.schedule(*due, camera_tick);
    }
  };
  if (auto due = sender.next_due_us(); due && *due < end_us) events.schedule(*due, camera_tick);

  // Instructor HMDs -> trainee HMD.
  std::vector<AnnotationScript> scripts;
  for (std::size_t i = 0; i < topo.instructor_pairs.size(); ++i) scripts.emplace_back(i);
  std::vector<std::array<std::uint32_t, wire::kChannelCount>> hmd_seq(topo.instructor_pairs.size());

  auto deliver_to_trainee = [&](std::size_t hmd, WireMessage msg) {
    auto shared = std::make_shared<const WireMessage>(std::move(msg));
    net.send(envelope(hmd, topo.trainee, *shared), [&, shared](std::uint64_t at) {
      record_latency(*shared, topo.trainee, at);
      if (shared->kind() == ChannelKind::kPose) {
        decode_pose(shared->payload, shared->timestamp_us);
        ++result.poses_received;
      } else {
        const auto event = decode_annotation(shared->payload, shared->timestamp_us);
        if (apply_annotation(result.trainee_objects, event) != AnnotationStatus::kApplied) {
          ++result.annotation_rejects;
        }
      }
    });
  };

  if (spec.pose.rate_hz > 0.0 && (spec.pose.head || spec.pose.hands > 0)) {
    const double rate = spec.pose.rate_hz;
    for (std::size_t i = 0; i < topo.instructor_pairs.size(); ++i) {
      const std::size_t hmd = topo.instructor_pairs[i].first;
      for (std::uint64_t k = 0, t = 0; t < end_us; t = tick_us(++k, rate)) {
        events.schedule(t, [&, i, hmd, t]() {
          for (auto& sample : synth_poses(spec.pose, i, t)) {
            sample.node = NodeRole::kRemoteInstructorHmd;
            WireMessage msg;
            msg.channel = static_cast<std::uint8_t>(ChannelKind::kPose);
            msg.msg_type = wire::msg_type::kPose;
            msg.seq = hmd_seq[i][static_cast<std::size_t>(ChannelKind::kPose)]++;
            msg.timestamp_us = t;
            msg.payload = encode_pose(sample);
            deliver_to_trainee(hmd, std::move(msg));
          }
        });
      }
    }
  }

  if (spec.annotation.rate_hz > 0.0) {
    const double rate = spec.annotation.rate_hz;
    for (std::size_t i = 0; i < topo.instructor_pairs.size(); ++i) {
      const std::size_t hmd = topo.instructor_pairs[i].first;
      for (std::uint64_t k = 0, t = 0; t < end_us; t = tick_us(++k, rate)) {
        events.schedule(t, [&, i, hmd, t]() {
          const auto event = scripts[i].next(t);
          apply_annotation(result.instructor_objects, event);
          WireMessage msg;
          msg.channel = static_cast<std::uint8_t>(ChannelKind::kAnnotation);
          msg.msg_type = wire::msg_type::kAnnotation;
          msg.seq = hmd_seq[i][static_cast<std::size_t>(ChannelKind::kAnnotation)]++;
          msg.timestamp_us = t;
          msg.payload = encode_annotation(event);
          deliver_to_trainee(hmd, std::move(msg));
        });
      }
    }
  }

  events.run_all();

  result.sender = sender.stats();
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    result.instructors[i].receiver = receivers[i].stats();
  }
  result.trace = net.trace();
  result.links = net.link_stats();
  return result;
}

LatencySummary summarize(std::span<const std::uint64_t> latencies_us) {
  LatencySummary s;
  s.count = latencies_us.size();
  if (s.count == 0) return s;
  std::vector<std::uint64_t> sorted(latencies_us.begin(), latencies_us.end());
  std::sort(sorted.begin(), sorted.end());
  // Nearest-rank percentiles.
  auto rank = [&sorted](double p) {
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    return static_cast<double>(sorted[std::clamp<std::size_t>(idx, 1, sorted.size()) - 1]);
  };
  s.mean_us = static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::uint64_t{0})) /
              static_cast<double>(s.count);
  s.min_us = static_cast<double>(sorted.front());
  s.p50_us = rank(0.50);
  s.p95_us = rank(0.95);
  s.p99_us = rank(0.99);
  s.max_us = static_cast<double>(sorted.back());
  return s;
}

std::vector<std::uint64_t> latencies(const SimResult& result, ChannelKind channel) {
  std::vector<std::uint64_t> out;
  for (const auto& sample : result.latencies) {
    if (sample.channel == channel) out.push_back(sample.latency_us());
  }
  return out;
}

LatencySummary pose_route_latency(const SimResult& result) {
  const auto values = latencies(result, ChannelKind::kPose);
  return summarize(values);
}

}  // namespace vdepth::session
