#include "vdepth/netsim.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "vdepth/errors.hpp"
#include "vdepth/metrics.hpp"
#include "vdepth/transport.hpp"

namespace {

using namespace vdepth;

TEST(LinkTest, SerializationTimeIsExact) {
  EXPECT_EQ(netsim::serialization_us(12500, 1'000'000), 100'000u);
  EXPECT_EQ(netsim::serialization_us(0, 1'000'000), 0u);
  EXPECT_EQ(netsim::serialization_us(1, 3'000'000), 3u);  // 2.67 rounds up
  EXPECT_EQ(netsim::serialization_us(125, 1'000'000'000), 1u);
}

TEST(LinkTest, ArrivalIsLatencyPlusSerialization) {
  netsim::Link link("a", {.bandwidth_bps = 1'000'000, .latency_ms = 40.0});
  const auto t = link.transmit(5'000, 12500);
  EXPECT_EQ(t.start_us, 5'000u);
  EXPECT_EQ(t.complete_us, 105'000u);
  EXPECT_EQ(t.arrival_us, 145'000u);
  EXPECT_EQ(t.retransmits, 0u);
  EXPECT_EQ(t.queue_wait_us(), 0u);
}

TEST(LinkTest, BackToBackMessagesQueue) {
  netsim::Link link("a", {.bandwidth_bps = 1'000'000, .latency_ms = 10.0});
  const auto first = link.transmit(0, 12500);
  const auto second = link.transmit(50'000, 12500);
  EXPECT_EQ(second.start_us, first.complete_us);
  EXPECT_EQ(second.queue_wait_us(), 50'000u);
  EXPECT_EQ(second.arrival_us, 210'000u);
}

TEST(LinkTest, LossReplaysFromSeed) {
  // Independent replay of the documented draw rule.
  const std::uint64_t seed = 99;
  const double loss = 0.5;
  std::mt19937_64 oracle(seed);
  netsim::Link link("a", {.bandwidth_bps = 1'000'000'000, .latency_ms = 20.0,
                          .loss_prob = loss, .seed = seed});
  std::uint64_t now = 0;
  std::uint32_t total = 0;
  for (int i = 0; i < 2000; ++i) {
    std::uint32_t expected = 0;
    while (static_cast<double>(oracle() >> 11) * 0x1.0p-53 < loss) ++expected;
    const auto t = link.transmit(now, 125);
    ASSERT_EQ(t.retransmits, expected) << "message " << i;
    EXPECT_GE(t.arrival_us, t.complete_us + 20'000 + 40'000ull * expected);
    total += expected;
    now += 1'000'000;  // far apart, so arrivals are never reordered
  }
  // Geometric with p = 0.5 averages one retransmit per message.
  EXPECT_NEAR(total / 2000.0, 1.0, 0.1);
}

TEST(LinkTest, RejectsBadConfig) {
  EXPECT_THROW(netsim::Link("a", {.bandwidth_bps = 0}), ParameterError);
  EXPECT_THROW(netsim::Link("a", {.loss_prob = 1.0}), ParameterError);
  EXPECT_THROW(netsim::Link("a", {.latency_ms = -1.0}), ParameterError);
}

TEST(LinkTest, JitterNeverReordersArrivals) {
  netsim::Link link("a", {.bandwidth_bps = 10'000'000, .latency_ms = 30.0,
                          .jitter_ms_stddev = 20.0, .seed = 3});
  std::uint64_t last = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = link.transmit(static_cast<std::uint64_t>(i) * 1000, 500);
    EXPECT_GE(t.arrival_us, last);
    EXPECT_GE(t.arrival_us, t.complete_us);
    last = t.arrival_us;
  }
}

TEST(EventQueueTest, RunsInTimeThenScheduleOrder) {
  netsim::EventQueue q;
  std::vector<int> order;
  q.schedule(20, [&] { order.push_back(3); });
  q.schedule(10, [&] { order.push_back(1); });
  q.schedule(10, [&] { order.push_back(2); });
  q.schedule(30, [&] { order.push_back(4); });
  EXPECT_EQ(q.run_until(20), 3u);
  EXPECT_EQ(q.now_us(), 20u);
  EXPECT_EQ(q.run_all(), 1u);
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_TRUE(q.empty());
}

std::vector<std::uint64_t> run_burst(netsim::Network& net, int count) {
  std::vector<std::uint64_t> arrivals;
  for (int i = 0; i < count; ++i) {
    net.events().schedule(static_cast<std::uint64_t>(i) * 500, [&net, &arrivals, i] {
      net.send({"up", "pose", static_cast<std::uint32_t>(i), 300, "a", "b"},
               [&arrivals, i](std::uint64_t) { arrivals.push_back(static_cast<std::uint64_t>(i)); });
    });
  }
  net.events().run_all();
  return arrivals;
}

TEST(NetworkTest, DeliversEveryMessageOnceInOrder) {
  netsim::Network net;
  net.add_link("up", {.bandwidth_bps = 2'000'000, .latency_ms = 15.0,
                      .jitter_ms_stddev = 5.0, .loss_prob = 0.2, .seed = 17});
  const auto arrivals = run_burst(net, 400);
  ASSERT_EQ(arrivals.size(), 400u);
  for (std::uint64_t i = 0; i < arrivals.size(); ++i) EXPECT_EQ(arrivals[i], i);

  std::size_t sends = 0;
  std::size_t arrives = 0;
  std::size_t retransmits = 0;
  for (const auto& r : net.trace()) {
    sends += r.event == netsim::Action::kSend;
    arrives += r.event == netsim::Action::kArrive;
    retransmits += r.event == netsim::Action::kRetransmit;
  }
  EXPECT_EQ(sends, 400u);
  EXPECT_EQ(arrives, 400u);
  const auto& stats = net.link_stats().at("up");
  EXPECT_EQ(retransmits, stats.retransmits);
  EXPECT_GT(stats.retransmits, 0u);
  EXPECT_EQ(stats.bytes, 400u * 300u);
}

TEST(NetworkTest, SameSeedsSameTrace) {
  auto once = [] {
    netsim::Network net;
    net.add_link("up", {.bandwidth_bps = 1'000'000, .latency_ms = 25.0,
                        .jitter_ms_stddev = 3.0, .loss_prob = 0.1, .seed = 5});
    run_burst(net, 200);
    return net.trace();
  };
  const auto a = once();
  EXPECT_EQ(a, once());
  std::stringstream io;
  netsim::write_ndjson(a, io);
  EXPECT_EQ(netsim::read_ndjson(io), a);
}

TEST(NetworkTest, EmptyNetworkHasEmptyTrace) {
  netsim::Network net;
  net.add_link("up", {});
  EXPECT_EQ(net.events().run_all(), 0u);
  EXPECT_TRUE(net.trace().empty());
  EXPECT_THROW(net.add_link("up", {}), ParameterError);
  EXPECT_THROW(net.link("down"), ParameterError);
}

TEST(NetworkTest, MalformedTraceLineRejected) {
  std::istringstream in("{\"time_us\": 1}\n");
  EXPECT_THROW(netsim::read_ndjson(in), FormatError);
}

TEST(NetworkTest, DepthStreamFitsColorBandwidthLink) {
  // A 10% change depth stream on a link sized to the color bitrate does not
  // build a standing queue.
  const auto stream =
      synth::generate(synth::calibrate({.target_change_fraction = 0.10, .seed = 6}), 300);
  const auto messages = transport::encode_stream(stream, {});
  netsim::Network net;
  net.add_link("up", {.bandwidth_bps = 1'900'000, .latency_ms = 20.0});
  for (const auto& m : messages) {
    net.events().schedule(m.timestamp_us, [&net, &m] {
      net.send({"up", "depth", m.seq, m.wire_size(), "cam", "viewer"}, {});
    });
  }
  net.events().run_all();
  const auto& stats = net.link_stats().at("up");
  EXPECT_EQ(stats.messages, 300u);
  EXPECT_FALSE(metrics::queue_growth(stats));
  EXPECT_LT(stats.max_queue_wait_us, 33'333u);
}

TEST(NetworkTest, OverloadedLinkShowsQueueGrowth) {
  netsim::Network net;
  net.add_link("up", {.bandwidth_bps = 100'000});
  for (int i = 0; i < 300; ++i) {
    net.events().schedule(static_cast<std::uint64_t>(i) * 33'333, [&net, i] {
      net.send({"up", "depth", static_cast<std::uint32_t>(i), 2000, "cam", "viewer"}, {});
    });
  }
  net.events().run_all();
  EXPECT_TRUE(metrics::queue_growth(net.link_stats().at("up")));
}

}  // namespace
