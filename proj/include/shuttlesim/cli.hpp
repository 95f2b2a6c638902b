#ifndef SHUTTLESIM_CLI_HPP
#define SHUTTLESIM_CLI_HPP

// Command-line front end. The executable is a thin wrapper over run_cli so
// tests can drive every subcommand in-process.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shuttlesim/recorder.hpp"
#include "shuttlesim/renderer.hpp"

namespace shuttlesim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct SimulationConfig {
  int rallies = 1;  ///< games when `match` is set
  std::uint64_t seed = 0;
  std::string agent_a = "scripted";
  std::string agent_b = "scripted";
  bool match = false;
  int jobs = 1;
  EngineOptions engine;
};

struct SimulationSummary {
  std::size_t rallies = 0;
  std::size_t strokes = 0;
  std::array<std::size_t, 2> wins{0, 0};
  std::map<OutcomeReason, std::size_t> reasons;
  std::vector<Score> final_scores;  ///< one per game in match mode
};

/// Seed of rally `index` (0-based) within shard `shard`.
std::uint64_t rally_seed(std::uint64_t seed, std::uint64_t shard, std::uint64_t index);

/// Play the configured rallies (or games), streaming records to `sink` in
/// rally order. `on_tick` sees every engine tick of shard 0; it is only
/// allowed with a single job.
SimulationSummary run_simulation(const SimulationConfig& config, const MetaParams& params,
                                 RecordSink* sink,
                                 const std::function<void(const RallyState&)>& on_tick = {});

/// Resolve --params: defaults (with a logged notice) when the path is unset
/// or missing, otherwise the strictly validated file.
MetaParams resolve_params(const std::optional<std::filesystem::path>& path);

/// Entry point. `args` excludes the program name. Protocol traffic uses
/// `in`/`out`; logs go to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_CLI_HPP
