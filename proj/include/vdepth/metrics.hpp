#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "vdepth/depth_codec.hpp"
#include "vdepth/netsim.hpp"
#include "vdepth/scene_synth.hpp"
#include "vdepth/session.hpp"
#include "vdepth/wire.hpp"

namespace vdepth::metrics {

inline constexpr std::uint64_t kWindowUs = 1'000'000;
inline constexpr std::uint64_t kStepUs = 100'000;

// Bytes attributed to a point in time; headers included.
struct ByteSample {
  std::uint64_t time_us = 0;
  std::size_t bytes = 0;
};

struct WindowRate {
  std::uint64_t start_us = 0;
  double bps = 0.0;
};

// Messages on one channel, stamped with their own timestamp_us.
std::vector<ByteSample> samples_from_messages(std::span<const wire::WireMessage> messages,
                                              std::optional<wire::ChannelKind> channel = {});

// Trace records of one event kind on one channel (by name, e.g. "depth").
// When dst is given, only that destination counts, so fan-out is not summed.
std::vector<ByteSample> samples_from_trace(std::span<const netsim::TraceRecord> trace,
                                           const std::string& channel,
                                           netsim::Action event = netsim::Action::kSend,
                                           std::optional<std::string> dst = {});

// Windows [k * step, k * step + width) from t = 0 through the last window that
// fits before the final sample (always at least one). Each window's rate is
// exactly 8 * bytes / width. Samples need not be sorted.
std::vector<WindowRate> bitrate_windows(std::vector<ByteSample> samples,
                                        std::uint64_t width_us = kWindowUs,
                                        std::uint64_t step_us = kStepUs);

double max_bps(std::span<const WindowRate> windows);
std::uint64_t total_bytes(std::span<const ByteSample> samples);

struct FrameTiming {
  double encode_us = 0.0;
  double decode_us = 0.0;
  bool keyframe = false;
  std::size_t wire_bytes = 0;
};

struct BenchSummary {
  std::size_t frames = 0;
  double mean_encode_us = 0.0;
  double max_encode_us = 0.0;
  double mean_decode_us = 0.0;
  double max_decode_us = 0.0;
  double mean_total_us() const { return mean_encode_us + mean_decode_us; }
};

// Wall-clock encode and decode time per frame, through the full
// encode -> wire -> decode path. Throws if decoding does not round-trip.
std::vector<FrameTiming> encode_bench(const synth::DepthStream& stream,
                                      const codec::ChangePolicy& policy);
BenchSummary summarize(std::span<const FrameTiming> timings);

// Whether a link's queue wait keeps growing rather than staying bounded: the
// least-squares slope of wait against send time exceeds 10 ms per second and
// the worst wait in the final second exceeds 100 ms.
bool queue_growth(const netsim::LinkStats& stats);

// Simulation report. Contains no wall-clock values, so identical seeds give
// identical reports.
nlohmann::ordered_json simulation_report(const session::SimResult& result);

void write_windows_csv(std::span<const WindowRate> windows, std::ostream& out);
nlohmann::ordered_json windows_json(std::span<const WindowRate> windows);

}  // namespace vdepth::metrics
