#ifndef SHUTTLESIM_AGENTS_HPP
#define SHUTTLESIM_AGENTS_HPP

// Agent-facing contract: canonical observations, the Policy interface, the
// two built-in baselines, the agent registry and a rally driver.
//
// Agents work in their own canonical frame (self on the x < 0 half).
// Observations are produced in that frame and policy decisions are returned
// in it; to_world() maps them back before they reach the engine.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "shuttlesim/rally.hpp"

namespace shuttlesim {

struct Observation {
  PlayerId self = PlayerId::A;
  Vec2 own_pos = Vec2::Zero();
  Vec2 opp_pos = Vec2::Zero();
  ShuttleState shuttle;
  RallyPhase phase;
  int ball_round = 1;
  Score score;
  std::optional<ShotType> last_shot;
};

Observation observe(const RallyState& state, PlayerId agent);

/// Map a decision from the agent's canonical frame to the world frame (and
/// back; the reflection is an involution).
Decision to_world(const Decision& decision, PlayerId agent);

class Policy {
 public:
  virtual ~Policy() = default;
  /// Must return a decision of the required kind, deterministic given rng.
  virtual Decision act(const Observation& obs, DecisionKind kind, Rng& rng) = 0;
};

/// Samples shot types from a frequency table and landing targets from the
/// calibrated per-type normals.
class ScriptedPolicy final : public Policy {
 public:
  /// Relative shot frequencies, indexed by ShotType. Services are drawn
  /// only for the serve and never during a rally.
  using ShotWeights = std::array<double, kShotTypeCount>;

  explicit ScriptedPolicy(MetaParams params, CourtSpec court = {},
                          ShotWeights weights = uniform_weights());

  Decision act(const Observation& obs, DecisionKind kind, Rng& rng) override;

  static ShotWeights uniform_weights();
  /// Canonical own-half base position.
  static Vec2 base_position() { return {-3.0, 0.0}; }

  ShotType sample_shot(bool serving, Rng& rng) const;
  /// Landing target in the hitter's canonical frame, clamped into the
  /// opponent's half.
  Vec2 sample_target(ShotType shot, Rng& rng) const;
  /// Where the receiver expects the shuttle: frequency-weighted mean landing
  /// point of the opponent's rally shots.
  Vec2 expected_arrival() const;

 private:
  MetaParams params_;
  CourtSpec court_;
  ShotWeights weights_;
};

/// Fuzzing baseline: uniform shot type, landing targets uniform over the
/// opponent's half inflated by 20%, uniform positions over the own half.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(CourtSpec court = {});
  Decision act(const Observation& obs, DecisionKind kind, Rng& rng) override;

  /// Canonical-frame rectangle targets are drawn from: x in [0, 1.2 L],
  /// |y| <= 1.2 W_singles.
  Vec2 target_max() const;

 private:
  CourtSpec court_;
};

/// Policy factory for CLI names: "scripted" or "random". "external" is
/// reserved for the stdio protocol and rejected here.
std::unique_ptr<Policy> make_policy(std::string_view name, const MetaParams& params,
                                    const CourtSpec& court = {});

/// Up to four agents keyed by id.
class AgentRegistry {
 public:
  void add(PlayerId id, std::unique_ptr<Policy> policy);
  Policy& at(PlayerId id) const;
  bool contains(PlayerId id) const;
  std::size_t size() const;

 private:
  std::array<std::unique_ptr<Policy>, kMaxAgents> slots_{};
};

/// Per-agent policy rng stream for a rally seed.
std::uint64_t policy_seed(std::uint64_t rally_seed, PlayerId agent);

struct RallySetup {
  PlayerId server = PlayerId::A;
  std::uint64_t seed = 0;
  Score score{};
};

/// Play one singles rally between registry agents A and B until terminal.
/// `on_step` sees every StepResult with the state after it.
RallyOutcome play_rally(const AgentRegistry& agents, const RallySetup& setup,
                        const MetaParams& params, const EngineOptions& options = {},
                        const std::function<void(const StepResult&, const RallyState&)>& on_step = {});

}  // namespace shuttlesim

#endif  // SHUTTLESIM_AGENTS_HPP
