#include "vdepth/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "vdepth/errors.hpp"

namespace vdepth::netsim {
namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t ms_to_us(double ms) { return std::llround(ms * 1000.0); }

Action action_from(const std::string& s) {
  if (s == "send") return Action::kSend;
  if (s == "retransmit") return Action::kRetransmit;
  if (s == "arrive") return Action::kArrive;
  throw FormatError("trace: unknown event '" + s + "'");
}

}  // namespace

void validate(const LinkConfig& config) {
  if (config.bandwidth_bps == 0) throw ParameterError("link bandwidth must be positive");
  if (!(config.loss_prob >= 0.0 && config.loss_prob < 1.0)) {
    throw ParameterError("link loss probability must be in [0, 1)");
  }
  if (!(config.latency_ms >= 0.0) || !(config.jitter_ms_stddev >= 0.0)) {
    throw ParameterError("link latency and jitter must be non-negative");
  }
}

std::uint64_t serialization_us(std::size_t bytes, std::uint64_t bandwidth_bps) {
  const auto bits_us = static_cast<unsigned __int128>(bytes) * 8u * 1'000'000u;
  return static_cast<std::uint64_t>((bits_us + bandwidth_bps - 1) / bandwidth_bps);
}

Link::Link(std::string name, LinkConfig config)
    : name_(std::move(name)), config_(config), loss_rng_(config.seed),
      jitter_rng_(config.seed ^ 0x5bd1e9955bd1e995ull) {
  validate(config_);
}

Transmission Link::transmit(std::uint64_t now_us, std::size_t bytes) {
  Transmission t;
  t.enqueue_us = now_us;
  t.start_us = std::max(now_us, busy_until_us_);
  t.complete_us = t.start_us + serialization_us(bytes, config_.bandwidth_bps);
  busy_until_us_ = t.complete_us;

  while (unit_draw(loss_rng_) < config_.loss_prob) ++t.retransmits;

  const std::int64_t latency = ms_to_us(config_.latency_ms);
  std::int64_t propagation = latency;
  if (config_.jitter_ms_stddev > 0.0) {
    const double u1 = 1.0 - unit_draw(jitter_rng_);
    const double u2 = unit_draw(jitter_rng_);
    const double gauss =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    propagation = std::max<std::int64_t>(0, latency + ms_to_us(gauss * config_.jitter_ms_stddev));
  }
  t.arrival_us = t.complete_us + static_cast<std::uint64_t>(propagation) +
                 static_cast<std::uint64_t>(t.retransmits) * 2u * static_cast<std::uint64_t>(latency);
  t.arrival_us = std::max(t.arrival_us, last_arrival_us_);
  last_arrival_us_ = t.arrival_us;
  return t;
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::kSend: return "send";
    case Action::kRetransmit: return "retransmit";
    case Action::kArrive: return "arrive";
  }
  return "unknown";
}

void write_ndjson(const std::vector<TraceRecord>& trace, std::ostream& out) {
  for (const auto& r : trace) {
    nlohmann::ordered_json j;
    j["time_us"] = r.time_us;
    j["link"] = r.link;
    j["channel"] = r.channel;
    j["seq"] = r.seq;
    j["bytes"] = r.bytes;
    j["event"] = to_string(r.event);
    j["src"] = r.src;
    j["dst"] = r.dst;
    out << j.dump() << '\n';
  }
}

std::vector<TraceRecord> read_ndjson(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TraceRecord r;
      r.time_us = j.at("time_us").get<std::uint64_t>();
      r.link = j.at("link").get<std::string>();
      r.channel = j.at("channel").get<std::string>();
      r.seq = j.at("seq").get<std::uint32_t>();
      r.bytes = j.at("bytes").get<std::size_t>();
      r.event = action_from(j.at("event").get<std::string>());
      r.src = j.value("src", "");
      r.dst = j.value("dst", "");
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void EventQueue::schedule(std::uint64_t time_us, std::function<void()> action) {
  queue_.push({std::max(time_us, now_us_), next_ordinal_++, std::move(action)});
}

std::size_t EventQueue::run_until(std::uint64_t until_us) {
  std::size_t ran = 0;
  while (!queue_.empty() && queue_.top().time_us <= until_us) {
    auto event = queue_.top();
    queue_.pop();
    now_us_ = event.time_us;
    event.action();
    ++ran;
  }
  return ran;
}

std::size_t EventQueue::run_all() {
  return run_until(std::numeric_limits<std::uint64_t>::max());
}

void Network::add_link(const std::string& name, const LinkConfig& config) {
  if (links_.contains(name)) throw ParameterError("duplicate link '" + name + "'");
  links_.emplace(name, Link(name, config));
  stats_[name];
}

Link& Network::link(const std::string& name) {
  auto it = links_.find(name);
  if (it == links_.end()) throw ParameterError("unknown link '" + name + "'");
  return it->second;
}

Transmission Network::send(const Envelope& envelope,
                           std::function<void(std::uint64_t)> on_arrive) {
  Link& l = link(envelope.link);
  const std::uint64_t now = events_.now_us();
  const Transmission t = l.transmit(now, envelope.bytes);

  auto& s = stats_[envelope.link];
  ++s.messages;
  s.bytes += envelope.bytes;
  s.retransmits += t.retransmits;
  s.max_queue_wait_us = std::max(s.max_queue_wait_us, t.queue_wait_us());
  s.waits.emplace_back(now, t.queue_wait_us());

  TraceRecord record{now, envelope.link, envelope.channel, envelope.seq, envelope.bytes,
                     Action::kSend, envelope.src, envelope.dst};
  trace_.push_back(record);

  const auto rtt = 2u * static_cast<std::uint64_t>(ms_to_us(l.config().latency_ms));
  for (std::uint32_t i = 1; i <= t.retransmits; ++i) {
    events_.schedule(t.complete_us + i * rtt, [this, record]() mutable {
      record.time_us = events_.now_us();
      record.event = Action::kRetransmit;
      trace_.push_back(record);
    });
  }
  events_.schedule(t.arrival_us, [this, record, cb = std::move(on_arrive)]() mutable {
    record.time_us = events_.now_us();
    record.event = Action::kArrive;
    trace_.push_back(record);
    if (cb) cb(record.time_us);
  });
  return t;
}

}  // namespace vdepth::netsim
