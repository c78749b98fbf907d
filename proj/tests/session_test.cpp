#include "vdepth/session.hpp"

#include <gtest/gtest.h>

#include <random>

#include "vdepth/errors.hpp"

namespace {

using namespace vdepth;
using session::AnnotationEvent;
using session::AnnotationOp;
using session::AnnotationStatus;
using wire::ChannelKind;

// Head pose only, no color or annotations, on one link configuration.
session::SessionSpec pose_only(double latency_ms, double loss, double duration_s = 2.0) {
  auto spec = session::default_session();
  for (auto& [name, link] : spec.links) {
    link.latency_ms = latency_ms;
    link.loss_prob = loss;
    link.seed = 31;
  }
  spec.duration_s = duration_s;
  spec.pose.hands = 0;
  spec.annotation.rate_hz = 0.0;
  spec.sender.color.enabled = false;
  return spec;
}

TEST(TopologyTest, DefaultSessionRoutes) {
  const auto topo = session::build_topology(session::default_session());
  ASSERT_EQ(topo.nodes.size(), 4u);
  EXPECT_EQ(topo.routes.size(), 5u);
  EXPECT_EQ(topo.fan_out(ChannelKind::kDepth, topo.camera), 1u);
  const auto [hmd, computer] = topo.instructor_pairs.at(0);
  EXPECT_EQ(topo.fan_out(ChannelKind::kPose, hmd), 1u);
  EXPECT_EQ(topo.fan_out(ChannelKind::kControl, computer), 1u);
  EXPECT_EQ(topo.fan_out(ChannelKind::kPose, topo.camera), 0u);
}

TEST(TopologyTest, DepthFansOutToEveryRemoteComputer) {
  const auto topo = session::build_topology(session::default_session(3));
  EXPECT_EQ(topo.instructor_pairs.size(), 3u);
  EXPECT_EQ(topo.fan_out(ChannelKind::kDepth, topo.camera), 3u);
  EXPECT_EQ(topo.fan_out(ChannelKind::kColor, topo.camera), 3u);
  EXPECT_EQ(topo.routes.size(), 15u);
}

TEST(TopologyTest, RejectsBadRoleCounts) {
  auto two_trainees = session::default_session();
  two_trainees.nodes.push_back({"extra", session::NodeRole::kLocalTraineeHmd,
                                two_trainees.nodes[1].link});
  EXPECT_THROW(session::build_topology(two_trainees), TopologyError);

  auto unpaired = session::default_session();
  unpaired.nodes.pop_back();
  EXPECT_THROW(session::build_topology(unpaired), TopologyError);

  auto bad_link = session::default_session();
  bad_link.nodes[0].link = "nowhere";
  EXPECT_THROW(session::build_topology(bad_link), TopologyError);
}

TEST(TopologyTest, RoleNamesRoundTrip) {
  for (auto role : {session::NodeRole::kCameraComputer, session::NodeRole::kLocalTraineeHmd,
                    session::NodeRole::kRemoteInstructorHmd, session::NodeRole::kRemoteComputer}) {
    EXPECT_EQ(session::role_from_string(session::to_string(role)), role);
  }
  EXPECT_EQ(session::to_string(session::NodeRole::kCameraComputer), "CAMERA_COMPUTER");
  EXPECT_THROW(session::role_from_string("PROJECTOR"), TopologyError);
}

TEST(PayloadTest, PoseRoundTrip) {
  session::PoseSample sample;
  sample.kind = session::PoseKind::kHand;
  sample.frame_id = 1;
  sample.timestamp_us = 777;
  for (int k = 0; k < 26; ++k) {
    session::Joint j;
    j.position = {0.1f * k, -0.5f, 2.0f};
    j.rotation = {0.5f, 0.5f, 0.5f, 0.5f};
    sample.joints.push_back(j);
  }
  const auto bytes = session::encode_pose(sample);
  EXPECT_EQ(bytes.size(), 4u + 26u * 28u);
  EXPECT_EQ(session::decode_pose(bytes, 777), sample);
  EXPECT_THROW(session::decode_pose(std::span(bytes).first(bytes.size() - 1), 0), FormatError);
}

TEST(PayloadTest, AnnotationRoundTrip) {
  AnnotationEvent e{.object_id = 42, .op = AnnotationOp::kUpdate,
                    .shape = session::ShapeKind::kTool, .mesh_id = 3, .timestamp_us = 9};
  const auto bytes = session::encode_annotation(e);
  EXPECT_EQ(bytes.size(), 48u);
  EXPECT_EQ(session::decode_annotation(bytes, 9), e);
  EXPECT_THROW(session::decode_annotation(std::span(bytes).first(47), 0), FormatError);
}

TEST(AnnotationTest, CreateThenDeleteLeavesEmptyTable) {
  session::ObjectTable table;
  EXPECT_EQ(session::apply_annotation(table, {.object_id = 1, .op = AnnotationOp::kCreate}),
            AnnotationStatus::kApplied);
  EXPECT_EQ(table.size(), 1u);
  EXPECT_EQ(session::apply_annotation(table, {.object_id = 1, .op = AnnotationOp::kDelete}),
            AnnotationStatus::kApplied);
  EXPECT_TRUE(table.empty());
}

TEST(AnnotationTest, RejectsUnknownAndDuplicateObjects) {
  session::ObjectTable table;
  EXPECT_EQ(session::apply_annotation(table, {.object_id = 5, .op = AnnotationOp::kUpdate}),
            AnnotationStatus::kUnknownObject);
  EXPECT_EQ(session::apply_annotation(table, {.object_id = 5, .op = AnnotationOp::kDelete}),
            AnnotationStatus::kUnknownObject);
  session::apply_annotation(table, {.object_id = 5, .op = AnnotationOp::kCreate});
  const auto before = table;
  EXPECT_EQ(session::apply_annotation(table, {.object_id = 5, .op = AnnotationOp::kCreate,
                                              .shape = session::ShapeKind::kCylinder}),
            AnnotationStatus::kDuplicateObject);
  EXPECT_EQ(table, before);
}

TEST(AnnotationTest, UpdateReplacesPose) {
  session::ObjectTable table;
  session::apply_annotation(table, {.object_id = 2, .op = AnnotationOp::kCreate});
  AnnotationEvent move{.object_id = 2, .op = AnnotationOp::kUpdate};
  move.pose = {1, 2, 3, 1, 0, 0, 0};
  session::apply_annotation(table, move);
  EXPECT_EQ(table.at(2).pose, move.pose);
}

TEST(AnnotationTest, ReplayIsDeterministic) {
  std::mt19937_64 rng(41);
  std::vector<AnnotationEvent> log;
  for (int i = 0; i < 500; ++i) {
    AnnotationEvent e;
    e.object_id = static_cast<std::uint32_t>(rng() % 20);
    e.op = static_cast<AnnotationOp>(rng() % 3);
    e.pose[0] = static_cast<float>(rng() % 100);
    log.push_back(e);
  }
  const auto a = session::replay(log);
  EXPECT_EQ(a, session::replay(log));
  // Step-by-step application with rejects ignored gives the same table.
  session::ObjectTable manual;
  for (const auto& e : log) session::apply_annotation(manual, e);
  EXPECT_EQ(a, manual);
}

TEST(SessionTest, ParsesSessionJson) {
  const auto spec = session::parse_session(R"({
    "duration_s": 3,
    "links": [{"name": "lan", "bandwidth_bps": 5000000, "latency_ms": 12}],
    "nodes": [
      {"name": "cam", "role": "CAMERA_COMPUTER", "link": "lan"},
      {"name": "trainee", "role": "LOCAL_TRAINEE_HMD", "link": "lan"},
      {"name": "hmd", "role": "REMOTE_INSTRUCTOR_HMD", "link": "lan"},
      {"name": "pc", "role": "REMOTE_COMPUTER", "link": "lan"}
    ],
    "scene": {"change_fraction": 0.05, "seed": 4},
    "noise": {"enabled": false},
    "policy": {"threshold_mm": 3}
  })");
  EXPECT_EQ(spec.duration_s, 3.0);
  EXPECT_EQ(spec.links.at("lan").bandwidth_bps, 5'000'000u);
  EXPECT_EQ(spec.links.at("lan").latency_ms, 12.0);
  EXPECT_EQ(spec.nodes.size(), 4u);
  EXPECT_EQ(spec.scene.target_change_fraction, 0.05);
  EXPECT_FALSE(spec.noise.has_value());
  EXPECT_EQ(spec.sender.policy.threshold_mm, 3);
  EXPECT_THROW(session::parse_session("{"), FormatError);
}

TEST(SessionTest, DefaultSessionDeliversEveryFrame) {
  const auto result = session::run(session::default_session());
  ASSERT_EQ(result.instructors.size(), 1u);
  const auto& rx = result.instructors[0].receiver;
  EXPECT_EQ(result.sender.depth_messages, 300u);
  EXPECT_EQ(rx.frames_decoded, 300u);
  EXPECT_EQ(rx.desyncs, 0u);
  EXPECT_EQ(rx.requests_sent, 0u);
  EXPECT_EQ(result.instructors[0].recorded_depth.size(), 300u);
  EXPECT_EQ(result.annotation_rejects, 0u);
  EXPECT_EQ(result.trainee_objects, result.instructor_objects);
  // Head plus two hands at 30 Hz for 10 s.
  EXPECT_EQ(result.poses_received, 900u);
}

TEST(SessionTest, PoseLatencyOnIdealLinkIsSerializationOnly) {
  const auto result = session::run(pose_only(0.0, 0.0));
  const auto values = session::latencies(result, ChannelKind::kPose);
  ASSERT_EQ(values.size(), 60u);
  // 22 + 4 + 28 bytes at 100 Mbps is 4.32 us, rounded up.
  for (auto v : values) EXPECT_EQ(v, 5u);
}

TEST(SessionTest, PoseLatencyMatchesLinkLatency) {
  const auto result = session::run(pose_only(40.0, 0.0));
  const auto summary = session::pose_route_latency(result);
  EXPECT_EQ(summary.count, 60u);
  EXPECT_NEAR(summary.min_us, 40'000.0, 1'000.0);
  EXPECT_NEAR(summary.max_us, 40'000.0, 1'000.0);
  EXPECT_EQ(summary.max_us, 40'005.0);
}

TEST(SessionTest, LossShowsUpAsRoundTripSpikes) {
  const auto result = session::run(pose_only(20.0, 0.1, 20.0));
  const auto values = session::latencies(result, ChannelKind::kPose);
  ASSERT_EQ(values.size(), 600u);
  const std::uint64_t base = 20'005;
  std::size_t at_base = 0;
  std::size_t one_rtt = 0;
  for (auto v : values) {
    EXPECT_GE(v, base);
    at_base += v == base;
    one_rtt += v == base + 40'000;
  }
  // About 90% of first attempts succeed; a message behind a retransmitted
  // one can also wait, so allow some slack below 0.9.
  EXPECT_GT(at_base, 450u);
  EXPECT_LT(at_base, 580u);
  EXPECT_GT(one_rtt, 10u);
  const auto summary = session::summarize(values);
  EXPECT_GE(summary.max_us, base + 40'000.0);
}

TEST(SessionTest, ExtraInstructorsDoNotChangeFirstReconstruction) {
  const auto one = session::run(session::default_session(1));
  const auto three = session::run(session::default_session(3));
  ASSERT_EQ(three.instructors.size(), 3u);
  EXPECT_EQ(one.instructors[0].recorded_depth, three.instructors[0].recorded_depth);
  ASSERT_TRUE(one.instructors[0].last_frame.has_value());
  EXPECT_EQ(one.instructors[0].last_frame, three.instructors[0].last_frame);
  for (const auto& inst : three.instructors) EXPECT_EQ(inst.receiver.frames_decoded, 300u);
  EXPECT_EQ(three.trainee_objects, three.instructor_objects);
  EXPECT_FALSE(three.trainee_objects.empty());
}

TEST(SessionTest, ZeroDurationIsEmpty) {
  auto spec = session::default_session();
  spec.duration_s = 0.0;
  const auto result = session::run(spec);
  EXPECT_TRUE(result.trace.empty());
  EXPECT_EQ(result.sender.depth_messages, 0u);
}

TEST(LatencySummaryTest, NearestRankPercentiles) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 1; i <= 100; ++i) v.push_back(i);
  const auto s = session::summarize(v);
  EXPECT_EQ(s.count, 100u);
  EXPECT_EQ(s.p50_us, 50.0);
  EXPECT_EQ(s.p95_us, 95.0);
  EXPECT_EQ(s.p99_us, 99.0);
  EXPECT_EQ(s.mean_us, 50.5);
  EXPECT_EQ(session::summarize({}).count, 0u);
}

}  // namespace
