#include "shuttlesim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "shuttlesim/calibration.hpp"
#include "shuttlesim/params_io.hpp"
#include "shuttlesim/protocol.hpp"

namespace shuttlesim {

namespace {

using Logger = spdlog::logger;

std::shared_ptr<Logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto log = std::make_shared<Logger>("shuttlesim", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::info);
  if (const char* env = std::getenv("SHUTTLESIM_LOG")) {
    const std::string v(env);
    if (v == "error") {
      log->set_level(spdlog::level::err);
    } else if (v == "debug") {
      log->set_level(spdlog::level::debug);
    } else if (v != "info") {
      log->warn("SHUTTLESIM_LOG={} not recognized (error, info, debug); using info", v);
    }
  }
  return log;
}

PlayerId alternate_server(std::size_t rally_index) {
  return rally_index % 2 == 0 ? PlayerId::A : PlayerId::B;
}

AgentRegistry make_agents(const SimulationConfig& config, const MetaParams& params) {
  AgentRegistry reg;
  reg.add(PlayerId::A, make_policy(config.agent_a, params, config.engine.court));
  reg.add(PlayerId::B, make_policy(config.agent_b, params, config.engine.court));
  return reg;
}

struct ShardResult {
  SimulationSummary summary;
  VectorSink records;
};

void tally(SimulationSummary& s, const RallyOutcome& outcome) {
  ++s.rallies;
  s.strokes += static_cast<std::size_t>(outcome.strokes);
  ++s.wins[outcome.winner == PlayerId::A ? 0 : 1];
  ++s.reasons[outcome.reason];
}

// Independent rallies [begin, end) of one shard.
void run_shard(const SimulationConfig& config, const MetaParams& params, std::uint64_t shard,
               std::size_t begin, std::size_t end, RecordSink* sink, const EngineOptions& engine,
               SimulationSummary& summary) {
  const AgentRegistry agents = make_agents(config, params);
  std::optional<MatchRecorder> recorder;
  if (sink != nullptr) recorder.emplace(*sink, params);
  for (std::size_t g = begin; g < end; ++g) {
    const RallySetup setup{alternate_server(g), rally_seed(config.seed, shard, g - begin), {}};
    if (recorder) recorder->begin_rally(std::to_string(g + 1), reset(setup.server, params, setup.seed));
    const RallyOutcome outcome =
        play_rally(agents, setup, params, engine, [&](const StepResult& step, const RallyState&) {
          if (recorder) recorder->observe(step);
        });
    tally(summary, outcome);
  }
}

void run_match(const SimulationConfig& config, const MetaParams& params, RecordSink* sink,
               const EngineOptions& engine, SimulationSummary& summary) {
  const AgentRegistry agents = make_agents(config, params);
  std::optional<MatchRecorder> recorder;
  if (sink != nullptr) recorder.emplace(*sink, params);
  std::uint64_t rally = 0;
  PlayerId server = PlayerId::A;
  for (int game = 0; game < config.rallies; ++game) {
    Score score;
    for (;;) {
      const RallySetup setup{server, rally_seed(config.seed, 0, rally), score};
      if (recorder) recorder->begin_rally(std::to_string(rally + 1), reset(server, params, setup.seed, score));
      const RallyOutcome outcome =
          play_rally(agents, setup, params, engine, [&](const StepResult& step, const RallyState&) {
            if (recorder) recorder->observe(step);
          });
      tally(summary, outcome);
      ++rally;
      const ScoreUpdate next = update_score(score, outcome);
      score = next.score;
      server = next.next_server;
      if (next.match_done) break;
    }
    summary.final_scores.push_back(score);
  }
}

std::string describe(const SimulationSummary& s) {
  std::ostringstream os;
  os << s.rallies << " rallies, " << s.strokes << " strokes, A " << s.wins[0] << " - B "
     << s.wins[1];
  for (const auto& [reason, n] : s.reasons) os << ", " << to_string(reason) << "=" << n;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

class FrameWriter {
 public:
  FrameWriter(std::filesystem::path dir, View view, int stride)
      : dir_(std::move(dir)), view_(view), stride_(static_cast<std::uint64_t>(stride)) {
    std::filesystem::create_directories(dir_);
  }

  void tick(const RallyState& state) {
    if (ticks_++ % stride_ == 0) write_ppm(render_frame(state, view_), frame_path(dir_, frames_++));
  }
  std::uint64_t frames() const { return frames_; }

 private:
  std::filesystem::path dir_;
  View view_;
  std::uint64_t stride_;
  std::uint64_t ticks_ = 0;
  std::uint64_t frames_ = 0;
};

// Re-fly each recorded stroke up to the next recorded hit (or the end of
// the flight) with players held at their recorded positions.
void replay_frames(const RecordFile& file, const MetaParams& params, FrameWriter& frames) {
  const auto& recs = file.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const StrokeRecord& r = recs[i];
    const Vec3 hit(r.row.hit.x(), r.row.hit.y(), r.hit_z);
    const auto launch = solve_recorded(hit, r.row.landing, r.row.shot, params);
    if (!launch) continue;
    RallyState st;
    st.player(r.row.player).pos = r.row.hitter_pos;
    st.player(opponent(r.row.player)).pos = r.row.opponent_pos;
    st.shuttle = {hit, *launch};
    const bool has_next = !r.reason && i + 1 < recs.size() && recs[i + 1].row.rally == r.row.rally;
    FlightOptions fo;
    fo.record_trajectory = false;
    fo.check_net = !has_next;
    const auto n = has_next ? std::llround((recs[i + 1].row.time - r.row.time) / params.dt) : -1;
    // The flight callback cannot stop early, so ticks past the next hit are
    // simply not rendered.
    fo.on_tick = [&](const ShuttleState& s, std::size_t k) {
      if (n >= 0 && static_cast<long long>(k) > n) return;
      st.shuttle = s;
      frames.tick(st);
    };
    simulate_until(st.shuttle, params, {}, fo);
  }
}

int cmd_simulate(const SimulationConfig& base, const std::optional<std::filesystem::path>& params_path,
                 const std::optional<std::filesystem::path>& record,
                 const std::optional<std::filesystem::path>& frames_dir, const std::string& view_name,
                 int stride, Logger& log) {
  if (base.rallies < 1) throw ValidationError("--rallies must be >= 1");
  if (base.jobs < 1) throw ValidationError("--jobs must be >= 1");
  if (base.jobs > 1 && base.match) throw ValidationError("--jobs cannot be combined with --match");
  if (base.jobs > 1 && frames_dir) throw ValidationError("--frames requires a single job");
  if (stride < 1) throw ValidationError("--frame-stride must be >= 1");
  const auto view = parse_view(view_name);
  if (!view) throw ValidationError("--view must be top or side");

  const MetaParams params = resolve_params(params_path);
  std::optional<FrameWriter> frames;
  if (frames_dir) frames.emplace(*frames_dir, *view, stride);

  std::ofstream out;
  std::optional<CsvSink> sink;
  if (record) {
    out = open_out(*record, std::ios::out | std::ios::binary);
    sink.emplace(out, params_hash(params));
  }
  std::function<void(const RallyState&)> on_tick;
  if (frames) on_tick = [&](const RallyState& st) { frames->tick(st); };

  const SimulationSummary s = run_simulation(base, params, sink ? &*sink : nullptr, on_tick);
  if (record) {
    out.flush();
    if (!out) throw IoError("failed writing " + record->string());
    log.info("wrote {}", record->string());
  }
  if (frames) log.info("wrote {} frames to {}", frames->frames(), frames_dir->string());
  log.info("{}", describe(s));
  for (std::size_t g = 0; g < s.final_scores.size(); ++g) {
    log.info("game {}: {}-{}", g + 1, s.final_scores[g].a, s.final_scores[g].b);
  }
  return kExitOk;
}

int cmd_replay(const std::filesystem::path& record,
               const std::optional<std::filesystem::path>& params_path,
               const std::optional<std::filesystem::path>& frames_dir, const std::string& view_name,
               int stride, const std::optional<std::filesystem::path>& report_path, Logger& log) {
  if (stride < 1) throw ValidationError("--frame-stride must be >= 1");
  const auto view = parse_view(view_name);
  if (!view) throw ValidationError("--view must be top or side");
  const MetaParams params = resolve_params(params_path);
  std::ifstream in = open_in(record);
  const RecordFile file = deserialize(in);

  const ReplayReport rep = replay(file, params);
  if (!rep.exact) log.warn("params hash differs from the recording; non-exact mode (tolerance {} m)", rep.tolerance);
  log.info("replayed {} strokes in {} rallies: max landing deviation {:.3e} m, max path deviation {:.3e} m, {} mismatches",
           rep.strokes, rep.rallies, rep.max_landing_deviation, rep.max_path_deviation, rep.mismatches);
  if (frames_dir) {
    FrameWriter frames(*frames_dir, *view, stride);
    replay_frames(file, params, frames);
    log.info("wrote {} frames to {}", frames.frames(), frames_dir->string());
  }
  if (report_path) {
    const nlohmann::json j = {{"exact", rep.exact},
                              {"strokes", rep.strokes},
                              {"rallies", rep.rallies},
                              {"max_landing_deviation", rep.max_landing_deviation},
                              {"max_path_deviation", rep.max_path_deviation},
                              {"worst_stroke", rep.worst_stroke},
                              {"mismatches", rep.mismatches},
                              {"tolerance", rep.tolerance},
                              {"pass", rep.pass}};
    std::ofstream out = open_out(*report_path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + report_path->string());
  }
  if (!rep.pass) {
    log.error("replay deviation exceeds {} m (worst stroke index {})", rep.tolerance, rep.worst_stroke);
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_calibrate(const std::filesystem::path& input, const std::filesystem::path& out_path,
                  const std::optional<std::filesystem::path>& params_path, Logger& log) {
  const MetaParams defaults = resolve_params(params_path);
  std::ifstream in = open_in(input);
  const std::vector<BlsrRow> rows = parse_dataset(in);
  const CalibrationResult res = estimate_params(rows, defaults);
  for (const std::string& note : res.notes) log.warn("{}", note);
  save_params(res.params, out_path);
  log.info("calibrated from {} rows: player_speed {:.4f}, defense_radius {:.4f}; wrote {}",
           rows.size(), res.params.player_speed, res.params.defense_radius, out_path.string());
  return kExitOk;
}

}  // namespace

std::uint64_t rally_seed(std::uint64_t seed, std::uint64_t shard, std::uint64_t index) {
  return derive_seed(seed + shard, index);
}

SimulationSummary run_simulation(const SimulationConfig& config, const MetaParams& params,
                                 RecordSink* sink,
                                 const std::function<void(const RallyState&)>& on_tick) {
  if (config.rallies < 1) throw ValidationError("rally count must be >= 1");
  if (config.jobs < 1) throw ValidationError("job count must be >= 1");
  if (config.jobs > 1 && (config.match || on_tick)) {
    throw ValidationError("sharded runs support neither match mode nor tick callbacks");
  }
  params.validate();
  EngineOptions engine = config.engine;
  if (on_tick) engine.on_tick = on_tick;

  SimulationSummary summary;
  if (config.match) {
    run_match(config, params, sink, engine, summary);
    return summary;
  }
  const auto n = static_cast<std::size_t>(config.rallies);
  const auto jobs = std::min(static_cast<std::size_t>(config.jobs), n);
  if (jobs == 1) {
    run_shard(config, params, 0, 0, n, sink, engine, summary);
    return summary;
  }

  // Shards run concurrently into private buffers and merge in shard order.
  // Policies are created per shard, so make_policy errors surface here first.
  make_agents(config, params);
  std::vector<ShardResult> shards(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < jobs; ++k) {
      workers.emplace_back([&, k] {
        try {
          run_shard(config, params, k, k * n / jobs, (k + 1) * n / jobs,
                    sink ? &shards[k].records : nullptr, engine, shards[k].summary);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (ShardResult& shard : shards) {
    if (sink) {
      for (const StrokeRecord& r : shard.records.records) sink->write(r);
    }
    summary.rallies += shard.summary.rallies;
    summary.strokes += shard.summary.strokes;
    summary.wins[0] += shard.summary.wins[0];
    summary.wins[1] += shard.summary.wins[1];
    for (const auto& [reason, count] : shard.summary.reasons) summary.reasons[reason] += count;
  }
  return summary;
}

MetaParams resolve_params(const std::optional<std::filesystem::path>& path) {
  if (!path) return MetaParams::defaults();
  if (!std::filesystem::exists(*path)) {
    if (const auto log = spdlog::get("shuttlesim")) {
      log->info("{} not found; using built-in defaults", path->string());
    }
    return MetaParams::defaults();
  }
  return load_params(*path);
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  const auto log = make_logger(err);
  spdlog::drop("shuttlesim");
  spdlog::register_logger(log);

  CLI::App app{"shuttlesim: turn-based badminton rally simulator", "shuttlesim"};
  app.require_subcommand(1);

  SimulationConfig sim;
  std::optional<std::filesystem::path> params_path;
  std::optional<std::filesystem::path> record_out;
  std::optional<std::filesystem::path> frames_dir;
  std::string view = "top";
  int stride = kDefaultFrameStride;
  auto* simulate = app.add_subcommand("simulate", "play rallies between two agents");
  simulate->add_option("--rallies", sim.rallies, "rallies to play (games with --match)")->required();
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--params", params_path, "params.json (defaults when absent)");
  simulate->add_option("--agent-a", sim.agent_a, "scripted or random");
  simulate->add_option("--agent-b", sim.agent_b, "scripted or random");
  simulate->add_option("--record", record_out, "write a match record CSV");
  simulate->add_option("--frames", frames_dir, "write PPM frames into this directory");
  simulate->add_option("--view", view, "top or side");
  simulate->add_option("--frame-stride", stride, "render every K-th tick");
  simulate->add_flag("--match", sim.match, "play full scored games instead of independent rallies");
  simulate->add_option("--jobs", sim.jobs, "worker threads for independent rallies");

  std::filesystem::path record_in;
  std::optional<std::filesystem::path> report_path;
  auto* replay_cmd = app.add_subcommand("replay", "verify a match record by re-simulation");
  replay_cmd->add_option("--record", record_in, "match record CSV")->required();
  replay_cmd->add_option("--params", params_path, "params.json (defaults when absent)");
  replay_cmd->add_option("--frames", frames_dir, "write PPM frames into this directory");
  replay_cmd->add_option("--view", view, "top or side");
  replay_cmd->add_option("--frame-stride", stride, "render every K-th tick");
  replay_cmd->add_option("--report", report_path, "write the replay report as JSON");

  std::filesystem::path input;
  std::filesystem::path params_out;
  auto* calibrate = app.add_subcommand("calibrate", "estimate params.json from a stroke dataset");
  calibrate->add_option("--input", input, "dataset CSV")->required();
  calibrate->add_option("--out", params_out, "output params.json")->required();
  calibrate->add_option("--params", params_path, "defaults for quantities without enough data");

  bool stdio = false;
  std::uint64_t serve_seed = 0;
  auto* serve_cmd = app.add_subcommand("serve", "JSON-lines environment server");
  serve_cmd->add_flag("--stdio", stdio, "serve on stdin/stdout");
  serve_cmd->add_option("--params", params_path, "params.json (defaults when absent)");
  serve_cmd->add_option("--seed", serve_seed, "seed for resets that carry none");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(sim, params_path, record_out, frames_dir, view, stride, *log);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay(record_in, params_path, frames_dir, view, stride, report_path, *log);
    }
    if (calibrate->parsed()) return cmd_calibrate(input, params_out, params_path, *log);
    if (serve_cmd->parsed()) {
      if (!stdio) throw ValidationError("serve requires --stdio");
      serve(in, out, resolve_params(params_path), serve_seed);
      return kExitOk;
    }
  } catch (const IoError& e) {
    log->error("{}", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    log->error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace shuttlesim
