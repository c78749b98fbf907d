#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdepth/netsim.hpp"
#include "vdepth/scene_synth.hpp"
#include "vdepth/transport.hpp"

namespace vdepth::session {

enum class NodeRole : std::uint8_t {
  kCameraComputer = 0,
  kLocalTraineeHmd = 1,
  kRemoteInstructorHmd = 2,
  kRemoteComputer = 3,
};

std::string_view to_string(NodeRole role);
NodeRole role_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Pose and annotation payloads

enum class PoseKind : std::uint8_t { kHand = 0, kHead = 1 };

struct Joint {
  std::array<float, 3> position{};                  // meters
  std::array<float, 4> rotation{1.0f, 0, 0, 0};     // unit quaternion w, x, y, z
  bool operator==(const Joint&) const = default;
};

struct PoseSample {
  NodeRole node = NodeRole::kRemoteInstructorHmd;
  PoseKind kind = PoseKind::kHead;
  std::uint8_t frame_id = 0;  // coordinate frame label; no transform solving
  std::uint64_t timestamp_us = 0;
  std::vector<Joint> joints;

  bool operator==(const PoseSample&) const = default;
};

// Payload: u8 node, u8 kind, u8 frame_id, u8 joint_count, then per joint
// 3 f32 position and 4 f32 rotation, little-endian. The timestamp rides in
// the wire header.
std::vector<std::uint8_t> encode_pose(const PoseSample& sample);
PoseSample decode_pose(std::span<const std::uint8_t> payload, std::uint64_t timestamp_us);

enum class AnnotationOp : std::uint8_t { kCreate = 0, kUpdate = 1, kDelete = 2 };
enum class ShapeKind : std::uint8_t { kCuboid = 0, kCylinder = 1, kTool = 2 };

struct AnnotationEvent {
  std::uint32_t object_id = 0;
  AnnotationOp op = AnnotationOp::kCreate;
  ShapeKind shape = ShapeKind::kCuboid;
  std::uint16_t mesh_id = 0;                  // only meaningful for kTool
  std::array<float, 7> pose{0, 0, 0, 1, 0, 0, 0};  // position xyz, quaternion wxyz
  std::array<float, 3> scale{1, 1, 1};
  std::uint64_t timestamp_us = 0;

  bool operator==(const AnnotationEvent&) const = default;
};

// Payload: u32 object_id, u8 op, u8 shape, u16 mesh_id, 7 f32 pose,
// 3 f32 scale; 48 bytes.
inline constexpr std::size_t kAnnotationPayloadBytes = 48;
std::vector<std::uint8_t> encode_annotation(const AnnotationEvent& event);
AnnotationEvent decode_annotation(std::span<const std::uint8_t> payload,
                                  std::uint64_t timestamp_us);

struct SceneObject {
  ShapeKind shape = ShapeKind::kCuboid;
  std::uint16_t mesh_id = 0;
  std::array<float, 7> pose{};
  std::array<float, 3> scale{};
  bool operator==(const SceneObject&) const = default;
};

using ObjectTable = std::map<std::uint32_t, SceneObject>;

enum class AnnotationStatus { kApplied, kUnknownObject, kDuplicateObject };

// Applies one event. Rejected events leave the table untouched.
AnnotationStatus apply_annotation(ObjectTable& table, const AnnotationEvent& event);

// Folds a log over an empty table, skipping rejected events.
ObjectTable replay(std::span<const AnnotationEvent> log);

// ---------------------------------------------------------------------------
// Topology

struct NodeSpec {
  std::string name;
  NodeRole role = NodeRole::kCameraComputer;
  std::string link;  // outbound link for everything this node sends
};

struct PoseConfig {
  double rate_hz = 30.0;
  int hands = 2;
  int joints_per_hand = 26;
  bool head = true;
};

struct AnnotationConfig {
  double rate_hz = 2.0;
};

struct SessionSpec {
  std::vector<NodeSpec> nodes;
  std::map<std::string, netsim::LinkConfig> links;
  double duration_s = 10.0;
  synth::SceneParams scene;
  std::optional<synth::NoiseModel> noise;
  transport::SenderConfig sender;
  PoseConfig pose;
  AnnotationConfig annotation;
};

// Built-in session: one instructor pair, a shared 100 Mbps / 5 ms local
// network, a 10% change scene and 30 FPS depth plus 1.9 Mbps color.
SessionSpec default_session(int instructors = 1);

// JSON session file. Keys missing from the file keep their defaults.
SessionSpec load_session(const std::filesystem::path& path);
SessionSpec parse_session(std::string_view json_text);

struct Route {
  wire::ChannelKind channel;
  std::size_t src;  // node index
  std::size_t dst;
  bool bidirectional = false;

  bool operator==(const Route&) const = default;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::size_t camera = 0;
  std::size_t trainee = 0;
  // instructor HMD and remote computer of each instructor-side pair
  std::vector<std::pair<std::size_t, std::size_t>> instructor_pairs;
  std::vector<Route> routes;

  std::size_t fan_out(wire::ChannelKind channel, std::size_t src) const;
};

// Routes: DEPTH and COLOR from the camera computer to each remote computer,
// CONTROL between them (both ways), POSE and ANNOTATION from each instructor
// HMD to the trainee HMD. Throws TopologyError on bad role multiplicity or
// unknown links.
Topology build_topology(const SessionSpec& spec);

// ---------------------------------------------------------------------------
// Simulation

struct LatencySample {
  wire::ChannelKind channel;
  std::string dst;
  std::uint64_t sent_timestamp_us = 0;
  std::uint64_t receive_us = 0;
  std::size_t bytes = 0;

  std::uint64_t latency_us() const { return receive_us - sent_timestamp_us; }
};

struct InstructorResult {
  std::string remote_computer;
  transport::ReceiverStats receiver;
  std::vector<wire::WireMessage> recorded_depth;  // ".vds" content
  std::optional<DepthFrame> last_frame;
};

struct SimResult {
  double duration_s = 0.0;
  int fps = 0;
  Topology topology;
  transport::SenderStats sender;
  std::vector<InstructorResult> instructors;
  std::vector<LatencySample> latencies;
  std::vector<netsim::TraceRecord> trace;
  std::map<std::string, netsim::LinkStats> links;
  ObjectTable trainee_objects;
  ObjectTable instructor_objects;  // union of what the instructors authored
  std::uint32_t annotation_rejects = 0;
  std::uint32_t poses_received = 0;
};

SimResult run(const SessionSpec& spec);

struct LatencySummary {
  std::size_t count = 0;
  double mean_us = 0.0;
  double min_us = 0.0;
  double p50_us = 0.0;
  double p95_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
};

LatencySummary summarize(std::span<const std::uint64_t> latencies_us);
std::vector<std::uint64_t> latencies(const SimResult& result, wire::ChannelKind channel);
LatencySummary pose_route_latency(const SimResult& result);

}  // namespace vdepth::session
