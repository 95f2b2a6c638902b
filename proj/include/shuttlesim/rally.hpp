#ifndef SHUTTLESIM_RALLY_HPP
#define SHUTTLESIM_RALLY_HPP

// Turn-based rally engine.
//
// A stroke cycle has two decision points. When a stroke is due, the hitter
// picks a landing target, a shot type and a defense position while the
// receiver picks where to move. The engine then launches the shuttle and
// ticks flight and player movement together until the shuttle enters the
// receiver's defense region, where it pauses for the receiver's return
// stroke decision. Simulation resumes until the receiver can intercept
// (within reach and inside the return shot's receive height window), at
// which point the roles swap and the return is launched. Any landing, net
// contact, infeasible aim or flight timeout ends the rally.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "shuttlesim/core.hpp"
#include "shuttlesim/physics.hpp"
#include "shuttlesim/rng.hpp"

namespace shuttlesim {

enum class PhaseKind : std::uint8_t { await_stroke, in_flight, await_return, terminal };

enum class OutcomeReason : std::uint8_t { landed_in, out, net_fault, not_reached, timeout_fault };

std::string_view to_string(PhaseKind k);
std::string_view to_string(OutcomeReason r);
std::optional<OutcomeReason> parse_outcome_reason(std::string_view s);

/// `actor` is the hitter (await_stroke, in_flight), the receiver
/// (await_return) or the winner (terminal).
struct RallyPhase {
  PhaseKind kind = PhaseKind::await_stroke;
  PlayerId actor = PlayerId::A;
  OutcomeReason reason = OutcomeReason::landed_in;  ///< terminal only

  friend bool operator==(const RallyPhase&, const RallyPhase&) = default;
};

/// True for the transitions the engine may take.
bool is_legal_transition(PhaseKind from, PhaseKind to);

// ---------------------------------------------------------------------------
// Decisions (world frame)

struct StrokeDecision {
  Vec2 landing_target = Vec2::Zero();
  ShotType shot = ShotType::clear;
  Vec2 defense_pos = Vec2::Zero();

  friend bool operator==(const StrokeDecision& a, const StrokeDecision& b) {
    return a.landing_target == b.landing_target && a.shot == b.shot &&
           a.defense_pos == b.defense_pos;
  }
};

struct MoveDecision {
  Vec2 target_pos = Vec2::Zero();

  friend bool operator==(const MoveDecision& a, const MoveDecision& b) {
    return a.target_pos == b.target_pos;
  }
};

using Decision = std::variant<StrokeDecision, MoveDecision>;

enum class DecisionKind : std::uint8_t { stroke, move };

std::string_view to_string(DecisionKind k);

struct DecisionPoint {
  PlayerId player;
  DecisionKind kind;
  friend bool operator==(const DecisionPoint&, const DecisionPoint&) = default;
};

using Decisions = std::map<PlayerId, Decision>;

// ---------------------------------------------------------------------------
// State

struct PlayerState {
  Vec2 pos = Vec2::Zero();
  Vec2 move_target = Vec2::Zero();
  std::optional<StrokeDecision> pending_stroke;

  friend bool operator==(const PlayerState& a, const PlayerState& b) {
    return a.pos == b.pos && a.move_target == b.move_target &&
           a.pending_stroke == b.pending_stroke;
  }
};

struct Score {
  int a = 0;
  int b = 0;

  int of(PlayerId p) const { return p == PlayerId::A ? a : b; }
  friend bool operator==(const Score&, const Score&) = default;
};

struct RallyState {
  ShuttleState shuttle;
  std::array<PlayerState, 2> players{};  ///< indexed by PlayerId (A, B)
  RallyPhase phase;
  int ball_round = 1;
  PlayerId server = PlayerId::A;
  Score score;
  std::uint64_t tick = 0;          ///< integration steps since reset
  std::uint64_t flight_ticks = 0;  ///< steps since the current launch
  bool defense_entered = false;    ///< current flight already paused once
  std::optional<ShotType> last_shot;
  Rng rng;

  PlayerState& player(PlayerId p) { return players[static_cast<std::size_t>(p)]; }
  const PlayerState& player(PlayerId p) const { return players[static_cast<std::size_t>(p)]; }
  double time(const MetaParams& params) const { return static_cast<double>(tick) * params.dt; }

  /// Bitwise state equality (all doubles compared exactly).
  friend bool operator==(const RallyState&, const RallyState&) = default;
};

struct RallyOutcome {
  PlayerId winner = PlayerId::A;
  OutcomeReason reason = OutcomeReason::landed_in;
  int strokes = 0;

  friend bool operator==(const RallyOutcome&, const RallyOutcome&) = default;
};

// ---------------------------------------------------------------------------
// Events emitted by apply_decisions

/// A stroke was executed (or attempted, when the aim was infeasible). Values
/// are those the recorder writes; positions are quantized to the record
/// resolution so a replay sees exactly what the engine used.
struct StrokeEvent {
  int ball_round = 1;
  std::uint64_t tick = 0;
  PlayerId hitter = PlayerId::A;
  ShotType shot = ShotType::clear;
  Vec3 hit = Vec3::Zero();
  Vec2 aim = Vec2::Zero();  ///< effective landing target
  Vec2 hitter_pos = Vec2::Zero();
  Vec2 opponent_pos = Vec2::Zero();
  std::optional<Vec3> launch;  ///< nullopt when infeasible
};

struct DefenseEntryEvent {
  PlayerId receiver;
  std::uint64_t tick;
};

struct InterceptEvent {
  PlayerId receiver;
  std::uint64_t tick;
  Vec3 position;
};

struct TerminalEvent {
  RallyOutcome outcome;
  std::optional<FlightEvent> flight;  ///< final flight event, if any
};

using RallyEvent = std::variant<StrokeEvent, DefenseEntryEvent, InterceptEvent, TerminalEvent>;

struct StepResult {
  std::vector<RallyEvent> events;
  std::array<double, 2> rewards{0.0, 0.0};
  std::optional<RallyOutcome> outcome;
};

struct EngineOptions {
  CourtSpec court{};
  int max_strokes = 200;
  /// Called after every integration tick with the engine state.
  std::function<void(const RallyState&)> on_tick;
  /// Optional per-step shaping term added to each agent's reward.
  std::function<double(const RallyState&, PlayerId)> reward_shaping;
};

inline Vec2 ready_position(PlayerId p) { return {3.0 * side_sign(p), 0.0}; }

/// Fresh rally: players at (-3, 0) and (3, 0), shuttle held at the server's
/// position at a sampled service height.
RallyState reset(PlayerId server, const MetaParams& params, std::uint64_t seed,
                 Score score = {});

/// Hitter's stroke first, then the receiver's move. Throws
/// ContractViolation for terminal states.
std::vector<DecisionPoint> decision_points(const RallyState& state);

/// Advance to the next decision point or to the end of the rally.
StepResult apply_decisions(RallyState& state, const Decisions& decisions,
                           const MetaParams& params, const EngineOptions& options = {});

bool defense_entry_check(const ShuttleState& shuttle, const PlayerState& receiver,
                         const MetaParams& params);

bool intercept_check(const ShuttleState& shuttle, const PlayerState& receiver,
                     ShotType return_shot, const MetaParams& params);

struct ScoreUpdate {
  Score score;
  bool match_done = false;
  PlayerId next_server = PlayerId::A;
};

/// Rally-point scoring: game to 21, win by 2, capped at 30.
ScoreUpdate update_score(Score score, const RallyOutcome& outcome);
bool game_over(const Score& score);

double reward(const RallyOutcome& outcome, PlayerId agent);

// ---------------------------------------------------------------------------
// Record-resolution helpers shared with the recorder/replay.

/// Round to the 1e-6 grid used by recorded files.
double quantize(double v);
Vec2 quantize(const Vec2& v);
Vec3 quantize(const Vec3& v);

/// Seed of the aim solver's speed draw; a pure function of recorded values
/// so replay can reproduce launches.
std::uint64_t aim_seed(const Vec3& hit, const Vec2& aim, ShotType shot);

/// Launch for a recorded (hit, aim, shot): one solver call seeded by
/// aim_seed. This is the launch the engine used for the recorded aim.
std::optional<Vec3> solve_recorded(const Vec3& hit, const Vec2& aim, ShotType shot,
                                   const MetaParams& params);

struct AimResult {
  std::optional<Vec3> launch;
  Vec2 aim = Vec2::Zero();
};

/// Engine-side aiming: solve toward `aim`; if the solver only reached the
/// target within its tolerance, re-aim at the reachable landing point so the
/// recorded aim is hit to record precision.
AimResult aim_stroke(const Vec3& hit, const Vec2& aim, ShotType shot, const MetaParams& params);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_RALLY_HPP
