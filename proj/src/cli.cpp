#include "vdepth/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vdepth/errors.hpp"
#include "vdepth/metrics.hpp"
#include "vdepth/scene_synth.hpp"
#include "vdepth/session.hpp"
#include "vdepth/transport.hpp"

namespace vdepth::cli {
namespace {

struct GenOptions {
  std::uint32_t frames = 300;
  double change = 0.10;
  std::uint64_t seed = 0;
  int width = kDefaultWidth;
  int height = kDefaultHeight;
  int fps = kDefaultFps;
  bool noise = false;
  double jitter_mm = 0.0;
  std::string out;
};

struct PolicyOptions {
  std::uint16_t threshold_mm = 0;
  std::uint32_t keyframe_interval = 30;

  codec::ChangePolicy policy() const { return {threshold_mm, keyframe_interval}; }
};

struct CodecOptions {
  std::string in;
  std::string out;
  PolicyOptions policy;
  int width = kDefaultWidth;
  int height = kDefaultHeight;
  int fps = kDefaultFps;
};

struct SimulateOptions {
  std::string session;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint16_t> threshold_mm;
  std::optional<std::uint32_t> keyframe_interval;
  std::string trace;
  std::string report;
  std::string csv;
};

struct BenchOptions {
  std::string in;
  std::uint32_t frames = 300;
  double change = 0.10;
  std::uint64_t seed = 0;
  PolicyOptions policy;
  std::string report;
};

struct StatsOptions {
  std::string in;
  std::string channel = "depth";
  std::string dst;
  std::string csv;
  std::string json;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  return out;
}

synth::SceneParams scene_from(const GenOptions& o) {
  synth::SceneParams p;
  p.geometry = {o.width, o.height};
  p.fps = o.fps;
  p.target_change_fraction = o.change;
  p.seed = o.seed;
  return p;
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
  auto stream = synth::generate(scene_from(o), o.frames);
  if (o.noise || o.jitter_mm > 0.0) {
    synth::NoiseModel model;
    model.jitter_stddev_mm = o.jitter_mm;
    model.seed = o.seed;
    for (auto& frame : stream.frames) frame = synth::apply_noise(frame, model);
  }
  synth::write_raw(stream, o.out);
  double change = 0.0;
  for (std::size_t k = 1; k < stream.frames.size(); ++k) {
    change += codec::change_mask(stream.frames[k - 1], stream.frames[k], 0).change_fraction;
  }
  if (stream.frames.size() > 1) change /= static_cast<double>(stream.frames.size() - 1);
  out << "wrote " << o.out << ": " << stream.frames.size() << " frames "
      << stream.geometry.width << "x" << stream.geometry.height << " @" << stream.fps
      << " fps, mean change fraction " << change << '\n';
  return kOk;
}

int cmd_encode(const CodecOptions& o, std::ostream& out) {
  const auto stream = synth::read_raw(o.in);
  const auto messages = transport::encode_stream(stream, o.policy.policy());
  wire::write_vds(o.out, messages);
  std::uint64_t bytes = 0;
  std::uint32_t keyframes = 0;
  for (const auto& m : messages) {
    bytes += m.wire_size();
    if (m.msg_type == wire::msg_type::kKeyframe) ++keyframes;
  }
  out << "wrote " << o.out << ": " << messages.size() << " messages, " << keyframes
      << " keyframes, " << bytes << " bytes\n";
  return kOk;
}

int cmd_decode(const CodecOptions& o, std::ostream& out) {
  const auto messages = wire::read_vds(o.in);
  const auto stream = transport::decode_stream(messages, {o.width, o.height}, o.fps);
  synth::write_raw(stream, o.out);
  out << "wrote " << o.out << ": " << stream.frames.size() << " frames\n";
  return kOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  session::SessionSpec spec =
      o.session.empty() ? session::default_session() : session::load_session(o.session);
  if (o.duration) spec.duration_s = *o.duration;
  if (o.threshold_mm) spec.sender.policy.threshold_mm = *o.threshold_mm;
  if (o.keyframe_interval) spec.sender.policy.keyframe_interval_frames = *o.keyframe_interval;
  if (o.seed) {
    spec.scene.seed = *o.seed;
    spec.sender.color.seed = *o.seed;
    if (spec.noise) spec.noise->seed = *o.seed;
    std::uint64_t offset = 0;
    for (auto& [name, link] : spec.links) link.seed = *o.seed + offset++;
  }

  const auto result = session::run(spec);
  const auto report = metrics::simulation_report(result);
  if (!o.trace.empty()) {
    auto f = open_out(o.trace);
    netsim::write_ndjson(result.trace, f);
  }
  if (!o.report.empty()) {
    auto f = open_out(o.report);
    f << report.dump(2) << '\n';
  }
  if (!o.csv.empty() && !result.instructors.empty()) {
    auto f = open_out(o.csv);
    metrics::write_windows_csv(
        metrics::bitrate_windows(metrics::samples_from_messages(result.instructors[0].recorded_depth)),
        f);
  }
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  synth::DepthStream stream;
  if (!o.in.empty()) {
    stream = synth::read_raw(o.in);
  } else {
    GenOptions g;
    g.frames = o.frames;
    g.change = o.change;
    g.seed = o.seed;
    auto params = scene_from(g);
    stream = synth::generate(params, o.frames);
    for (auto& frame : stream.frames) frame = synth::apply_noise(frame, synth::NoiseModel{});
  }
  const auto timings = metrics::encode_bench(stream, o.policy.policy());
  const auto s = metrics::summarize(timings);
  nlohmann::ordered_json j;
  j["frames"] = s.frames;
  j["mean_encode_us"] = s.mean_encode_us;
  j["max_encode_us"] = s.max_encode_us;
  j["mean_decode_us"] = s.mean_decode_us;
  j["max_decode_us"] = s.max_decode_us;
  j["mean_total_us"] = s.mean_total_us();
  j["realtime_budget_us"] = 1e6 / stream.fps;
  if (!o.report.empty()) {
    auto f = open_out(o.report);
    f << j.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_stats(const StatsOptions& o, std::ostream& out) {
  std::vector<metrics::ByteSample> samples;
  const bool is_trace = o.in.ends_with(".ndjson") || o.in.ends_with(".jsonl");
  if (is_trace) {
    std::ifstream in(o.in);
    if (!in) throw FormatError("cannot open " + o.in);
    const auto trace = netsim::read_ndjson(in);
    samples = metrics::samples_from_trace(
        trace, o.channel, netsim::Action::kSend,
        o.dst.empty() ? std::nullopt : std::optional<std::string>(o.dst));
  } else {
    const auto messages = wire::read_vds(o.in);
    samples = metrics::samples_from_messages(messages);
  }
  const auto windows = metrics::bitrate_windows(samples);
  if (!o.csv.empty()) {
    auto f = open_out(o.csv);
    metrics::write_windows_csv(windows, f);
  }
  nlohmann::ordered_json j;
  j["input"] = o.in;
  j["samples"] = samples.size();
  j["total_bytes"] = metrics::total_bytes(samples);
  j["windows"] = windows.size();
  j["max_window_bps"] = metrics::max_bps(windows);
  if (!o.json.empty()) {
    auto f = open_out(o.json);
    auto full = j;
    full["series"] = metrics::windows_json(windows);
    f << full.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-stream codec, transport and network simulation toolkit", "vdepth"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic .d16 depth stream");
  gen_cmd->add_option("--frames", gen.frames, "Frame count")->capture_default_str();
  gen_cmd->add_option("--change", gen.change, "Target per-frame change fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Scene and noise seed")->capture_default_str();
  gen_cmd->add_option("--width", gen.width)->check(CLI::Range(1, 65535))->capture_default_str();
  gen_cmd->add_option("--height", gen.height)->check(CLI::Range(1, 65535))->capture_default_str();
  gen_cmd->add_option("--fps", gen.fps)->check(CLI::Range(1, 65535))->capture_default_str();
  gen_cmd->add_flag("--noise", gen.noise, "Apply the systematic sensor error model");
  gen_cmd->add_option("--jitter-mm", gen.jitter_mm, "Per-frame jitter stddev (implies --noise)")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--out", gen.out, "Output .d16 path")->required();

  CodecOptions enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode a .d16 stream into a .vds file");
  enc_cmd->add_option("--in", enc.in)->required();
  enc_cmd->add_option("--out", enc.out)->required();
  enc_cmd->add_option("--threshold-mm", enc.policy.threshold_mm)->capture_default_str();
  enc_cmd->add_option("--keyframe-interval", enc.policy.keyframe_interval)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CodecOptions dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode a .vds file into a .d16 stream");
  dec_cmd->add_option("--in", dec.in)->required();
  dec_cmd->add_option("--out", dec.out)->required();
  dec_cmd->add_option("--width", dec.width)->check(CLI::Range(1, 65535))->capture_default_str();
  dec_cmd->add_option("--height", dec.height)->check(CLI::Range(1, 65535))->capture_default_str();
  dec_cmd->add_option("--fps", dec.fps)->check(CLI::Range(1, 65535))->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a session through the network simulator");
  sim_cmd->add_option("--session", sim.session, "Session JSON (default: built-in session)");
  sim_cmd->add_option("--duration", sim.duration, "Seconds")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim.seed, "Overrides scene, noise, color and link seeds");
  sim_cmd->add_option("--threshold-mm", sim.threshold_mm);
  sim_cmd->add_option("--keyframe-interval", sim.keyframe_interval)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--trace", sim.trace, "NDJSON trace output path");
  sim_cmd->add_option("--report", sim.report, "JSON report output path");
  sim_cmd->add_option("--csv", sim.csv, "Depth bitrate windows CSV output path");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time encode and decode per frame");
  bench_cmd->add_option("--in", bench.in, ".d16 input (default: generated scene)");
  bench_cmd->add_option("--frames", bench.frames)->capture_default_str();
  bench_cmd->add_option("--change", bench.change)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--threshold-mm", bench.policy.threshold_mm)->capture_default_str();
  bench_cmd->add_option("--keyframe-interval", bench.policy.keyframe_interval)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--report", bench.report, "JSON output path");

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Sliding-window bitrate of a .vds file or trace");
  stats_cmd->add_option("--in", stats.in, ".vds file or .ndjson trace")->required();
  stats_cmd->add_option("--channel", stats.channel, "Trace channel name")->capture_default_str();
  stats_cmd->add_option("--dst", stats.dst, "Only count trace records to this node");
  stats_cmd->add_option("--csv", stats.csv, "Window series CSV output path");
  stats_cmd->add_option("--json", stats.json, "JSON output path");

  std::vector<std::string> argv_storage = {"vdepth"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*enc_cmd) return cmd_encode(enc, out);
    if (*dec_cmd) return cmd_decode(dec, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*stats_cmd) return cmd_stats(stats, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kFormatError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kFormatError;
  } catch (const DesyncError& e) {
    err << "error: " << e.what() << '\n';
    return kFormatError;
  } catch (const SequencingError& e) {
    err << "error: " << e.what() << '\n';
    return kFormatError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationError;
  }
  return kUsageError;
}

}  // namespace vdepth::cli
