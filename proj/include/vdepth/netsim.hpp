#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace vdepth::netsim {

struct LinkConfig {
  std::uint64_t bandwidth_bps = 100'000'000;
  double latency_ms = 0.0;          // one-way propagation
  double jitter_ms_stddev = 0.0;
  double loss_prob = 0.0;           // per transmission attempt
  std::uint64_t seed = 0;

  bool operator==(const LinkConfig&) const = default;
};

// Throws ParameterError unless bandwidth > 0, 0 <= loss < 1 and the delays
// are non-negative.
void validate(const LinkConfig& config);

// Serialization time of bytes at bandwidth_bps, rounded up to whole us.
std::uint64_t serialization_us(std::size_t bytes, std::uint64_t bandwidth_bps);

struct Transmission {
  std::uint64_t enqueue_us = 0;   // handed to the link
  std::uint64_t start_us = 0;     // first bit on the wire
  std::uint64_t complete_us = 0;  // last bit on the wire
  std::uint64_t arrival_us = 0;
  std::uint32_t retransmits = 0;

  std::uint64_t queue_wait_us() const { return start_us - enqueue_us; }
};

// One outbound queue with a bandwidth cap. Messages serialize back to back;
// arrival = completion + latency + jitter + one RTT per lost attempt, then
// clamped so arrivals stay in send order.
//
// Loss draws come from std::mt19937_64(seed): an attempt is lost iff
// (engine() >> 11) * 2^-53 < loss_prob, drawn until an attempt succeeds.
// Jitter draws use a separate engine, so the loss sequence is replayable on
// its own.
class Link {
 public:
  Link(std::string name, LinkConfig config);

  Transmission transmit(std::uint64_t now_us, std::size_t bytes);

  const std::string& name() const { return name_; }
  const LinkConfig& config() const { return config_; }
  std::uint64_t busy_until_us() const { return busy_until_us_; }

 private:
  std::string name_;
  LinkConfig config_;
  std::mt19937_64 loss_rng_;
  std::mt19937_64 jitter_rng_;
  std::uint64_t busy_until_us_ = 0;
  std::uint64_t last_arrival_us_ = 0;
};

enum class Action { kSend, kRetransmit, kArrive };

struct TraceRecord {
  std::uint64_t time_us = 0;
  std::string link;
  std::string channel;
  std::uint32_t seq = 0;
  std::size_t bytes = 0;
  Action event = Action::kSend;
  std::string src;
  std::string dst;

  bool operator==(const TraceRecord&) const = default;
};

std::string_view to_string(Action action);

// One JSON object per line with keys in a fixed order.
void write_ndjson(const std::vector<TraceRecord>& trace, std::ostream& out);
std::vector<TraceRecord> read_ndjson(std::istream& in);

// Deterministic event loop: events run in (time_us, ordinal) order, where
// the ordinal is the scheduling order.
class EventQueue {
 public:
  void schedule(std::uint64_t time_us, std::function<void()> action);
  // Runs events with time <= until_us. Returns the number run.
  std::size_t run_until(std::uint64_t until_us);
  std::size_t run_all();

  std::uint64_t now_us() const { return now_us_; }
  bool empty() const { return queue_.empty(); }

 private:
  struct Event {
    std::uint64_t time_us;
    std::uint64_t ordinal;
    std::function<void()> action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time_us != b.time_us ? a.time_us > b.time_us : a.ordinal > b.ordinal;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_ordinal_ = 0;
  std::uint64_t now_us_ = 0;
};

struct LinkStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t retransmits = 0;
  std::uint64_t max_queue_wait_us = 0;
  // (enqueue time, queue wait) for every message, for growth analysis.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> waits;
};

// Links plus the event queue plus the trace. Delivery is reliable and
// ordered per link: every sent message arrives exactly once, in send order.
class Network {
 public:
  void add_link(const std::string& name, const LinkConfig& config);
  bool has_link(const std::string& name) const { return links_.contains(name); }
  Link& link(const std::string& name);

  struct Envelope {
    std::string link;
    std::string channel;
    std::uint32_t seq = 0;
    std::size_t bytes = 0;
    std::string src;
    std::string dst;
  };

  // Hands a message to the link at the queue's current time and schedules
  // on_arrive at its arrival time.
  Transmission send(const Envelope& envelope, std::function<void(std::uint64_t)> on_arrive);

  EventQueue& events() { return events_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const std::map<std::string, LinkStats>& link_stats() const { return stats_; }

 private:
  std::map<std::string, Link> links_;
  std::map<std::string, LinkStats> stats_;
  EventQueue events_;
  std::vector<TraceRecord> trace_;
};

}  // namespace vdepth::netsim
