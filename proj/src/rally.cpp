#include "shuttlesim/rally.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shuttlesim {

namespace {

constexpr double kRecordScale = 1e6;
constexpr double kMinAimDistance = 0.1;
// Solver landings within this distance of the aim need no re-aim.
constexpr double kAimExact = 5e-7;

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

Vec2 horizontal(const Vec3& v) { return v.head<2>(); }

void move_toward(PlayerState& p, double max_step) {
  const Vec2 delta = p.move_target - p.pos;
  const double dist = delta.norm();
  if (dist <= max_step) {
    p.pos = p.move_target;
  } else {
    p.pos += delta * (max_step / dist);
  }
}

const StrokeDecision& expect_stroke(const Decisions& ds, PlayerId p) {
  const auto* d = std::get_if<StrokeDecision>(&ds.at(p));
  if (d == nullptr) {
    throw ContractViolation("player " + std::string(to_string(p)) + " must send a stroke decision");
  }
  if (!finite(d->landing_target) || !finite(d->defense_pos)) {
    throw ContractViolation("stroke decision coordinates must be finite");
  }
  return *d;
}

const MoveDecision& expect_move(const Decisions& ds, PlayerId p) {
  const auto* d = std::get_if<MoveDecision>(&ds.at(p));
  if (d == nullptr) {
    throw ContractViolation("player " + std::string(to_string(p)) + " must send a move decision");
  }
  if (!finite(d->target_pos)) throw ContractViolation("move target must be finite");
  return *d;
}

// Where a receiver committed to `shot` should run: the first point of the
// remaining flight that is on its half, inside the shot's receive window and
// reachable in time. Falls back to the least-late such point, then to the
// end of the flight.
Vec2 plan_intercept(const RallyState& st, PlayerId receiver, ShotType shot,
                    const MetaParams& params, const CourtSpec& court) {
  const Interval window = params.profile(shot).receive_height_window;
  const Vec2 from = st.player(receiver).pos;
  const double side = side_sign(receiver);

  FlightOptions fo;
  fo.court = court;
  fo.elapsed = static_cast<double>(st.flight_ticks) * params.dt;
  const FlightResult flight = simulate_until(st.shuttle, params, {}, fo);

  std::optional<Vec2> fallback;
  double least_late = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < flight.trajectory.size(); ++k) {
    const Vec3& p = flight.trajectory[k].pos;
    if (p.x() * side <= 0.0 || !window.contains(p.z())) continue;
    const double late = (horizontal(p) - from).norm() - params.reach_radius -
                        params.player_speed * static_cast<double>(k) * params.dt;
    if (late <= 0.0) return clamp_to_half(horizontal(p), court, receiver);
    if (late < least_late) {
      least_late = late;
      fallback = horizontal(p);
    }
  }
  if (fallback) return clamp_to_half(*fallback, court, receiver);
  return clamp_to_half(horizontal(flight.trajectory.back().pos), court, receiver);
}

class Engine {
 public:
  Engine(RallyState& st, const MetaParams& params, const EngineOptions& options, StepResult& out)
      : st_(st), params_(params), options_(options), out_(out) {}

  // Execute a stroke from the shuttle's current horizontal position. Returns
  // false when the rally ended because the aim was infeasible.
  bool launch(PlayerId hitter, const StrokeDecision& decision, double hit_z) {
    const PlayerId receiver = opponent(hitter);
    Vec2 aim = decision.landing_target;
    if (params_.execution_noise_std > 0.0) {
      aim.x() = st_.rng.normal(aim.x(), params_.execution_noise_std);
      aim.y() = st_.rng.normal(aim.y(), params_.execution_noise_std);
    }
    aim = quantize(aim);
    const Vec3 hit = quantize(Vec3(st_.shuttle.pos.x(), st_.shuttle.pos.y(), hit_z));
    const AimResult aimed = aim_stroke(hit, aim, decision.shot, params_);

    out_.events.push_back(StrokeEvent{st_.ball_round, st_.tick, hitter, decision.shot, hit,
                                      aimed.aim, st_.player(hitter).pos,
                                      st_.player(receiver).pos, aimed.launch});

    PlayerState& me = st_.player(hitter);
    me.pending_stroke.reset();
    me.move_target = clamp_to_half(decision.defense_pos, options_.court, hitter);
    st_.last_shot = decision.shot;
    st_.shuttle.pos = hit;

    if (!aimed.launch) {
      finish(receiver, OutcomeReason::timeout_fault, std::nullopt);
      return false;
    }
    st_.shuttle.vel = *aimed.launch;
    st_.flight_ticks = 0;
    st_.defense_entered = false;
    st_.phase = RallyPhase{PhaseKind::in_flight, hitter};
    return true;
  }

  // Tick flight and players until a decision point or the end of the rally.
  void run() {
    while (st_.phase.kind == PhaseKind::in_flight) {
      const PlayerId hitter = st_.phase.actor;
      const PlayerId receiver = opponent(hitter);
      const double side = side_sign(receiver);

      std::vector<Watcher> watchers;
      if (!st_.defense_entered) {
        watchers.push_back({FlightEventKind::defense_entry, [&](const ShuttleState& s) {
                              return s.vel.x() * side > 0.0 &&
                                     defense_entry_check(s, st_.player(receiver), params_);
                            }});
      }
      if (const auto& ret = st_.player(receiver).pending_stroke) {
        const ShotType shot = ret->shot;
        watchers.push_back({FlightEventKind::intercept_window, [&, shot](const ShuttleState& s) {
                              return s.pos.x() * side > 0.0 &&
                                     intercept_check(s, st_.player(receiver), shot, params_);
                            }});
      }

      FlightOptions fo;
      fo.court = options_.court;
      fo.record_trajectory = false;
      fo.elapsed = static_cast<double>(st_.flight_ticks) * params_.dt;
      fo.on_tick = [&](const ShuttleState& s, std::size_t) {
        st_.shuttle = s;
        const double max_step = params_.player_speed * params_.dt;
        for (PlayerState& p : st_.players) move_toward(p, max_step);
        ++st_.tick;
        ++st_.flight_ticks;
        if (options_.on_tick) options_.on_tick(st_);
      };

      const FlightResult flight = simulate_until(st_.shuttle, params_, watchers, fo);
      st_.shuttle = flight.event.state;

      switch (flight.event.kind) {
        case FlightEventKind::defense_entry:
          st_.defense_entered = true;
          st_.phase = RallyPhase{PhaseKind::await_return, receiver};
          out_.events.push_back(DefenseEntryEvent{receiver, st_.tick});
          return;
        case FlightEventKind::intercept_window: {
          out_.events.push_back(InterceptEvent{receiver, st_.tick, st_.shuttle.pos});
          if (st_.ball_round >= options_.max_strokes) {
            finish(hitter, OutcomeReason::timeout_fault, flight.event);
            return;
          }
          const StrokeDecision ret = *st_.player(receiver).pending_stroke;
          ++st_.ball_round;
          const double hit_z = sample_hit_height(ret.shot, params_, st_.rng);
          if (!launch(receiver, ret, hit_z)) return;
          break;
        }
        case FlightEventKind::landed:
          if (in_bounds(flight.event.state.pos, options_.court, receiver)) {
            finish(hitter,
                   st_.defense_entered ? OutcomeReason::not_reached : OutcomeReason::landed_in,
                   flight.event);
          } else {
            finish(receiver, OutcomeReason::out, flight.event);
          }
          return;
        case FlightEventKind::net_fault:
          finish(receiver, OutcomeReason::net_fault, flight.event);
          return;
        case FlightEventKind::timeout:
          finish(receiver, OutcomeReason::timeout_fault, flight.event);
          return;
      }
    }
  }

 private:
  void finish(PlayerId winner, OutcomeReason reason, std::optional<FlightEvent> flight) {
    st_.phase = RallyPhase{PhaseKind::terminal, winner, reason};
    const RallyOutcome outcome{winner, reason, st_.ball_round};
    out_.outcome = outcome;
    out_.rewards = {reward(outcome, PlayerId::A), reward(outcome, PlayerId::B)};
    out_.events.push_back(TerminalEvent{outcome, flight});
  }

  RallyState& st_;
  const MetaParams& params_;
  const EngineOptions& options_;
  StepResult& out_;
};

}  // namespace

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::await_stroke: return "await_stroke";
    case PhaseKind::in_flight: return "in_flight";
    case PhaseKind::await_return: return "await_return";
    case PhaseKind::terminal: return "terminal";
  }
  return "?";
}

std::string_view to_string(OutcomeReason r) {
  switch (r) {
    case OutcomeReason::landed_in: return "landed_in";
    case OutcomeReason::out: return "out";
    case OutcomeReason::net_fault: return "net_fault";
    case OutcomeReason::not_reached: return "not_reached";
    case OutcomeReason::timeout_fault: return "timeout_fault";
  }
  return "?";
}

std::optional<OutcomeReason> parse_outcome_reason(std::string_view s) {
  for (auto r : {OutcomeReason::landed_in, OutcomeReason::out, OutcomeReason::net_fault,
                 OutcomeReason::not_reached, OutcomeReason::timeout_fault}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view to_string(DecisionKind k) { return k == DecisionKind::stroke ? "stroke" : "move"; }

bool is_legal_transition(PhaseKind from, PhaseKind to) {
  switch (from) {
    case PhaseKind::await_stroke:
      // Straight to terminal only when the serve cannot be aimed.
      return to == PhaseKind::in_flight || to == PhaseKind::terminal;
    case PhaseKind::in_flight:
      return to == PhaseKind::await_return || to == PhaseKind::terminal ||
             to == PhaseKind::in_flight;
    case PhaseKind::await_return:
      return to == PhaseKind::in_flight || to == PhaseKind::terminal;
    case PhaseKind::terminal:
      return false;
  }
  return false;
}

RallyState reset(PlayerId server, const MetaParams& params, std::uint64_t seed, Score score) {
  if (server != PlayerId::A && server != PlayerId::B) {
    throw ContractViolation("singles rallies are served by A or B");
  }
  RallyState st;
  st.rng = Rng(seed);
  st.server = server;
  st.score = score;
  st.phase = RallyPhase{PhaseKind::await_stroke, server};
  for (PlayerId p : {PlayerId::A, PlayerId::B}) {
    st.player(p).pos = ready_position(p);
    st.player(p).move_target = ready_position(p);
  }
  const Vec2 at = ready_position(server);
  const double z = sample_hit_height(ShotType::short_service, params, st.rng);
  st.shuttle = ShuttleState{Vec3(at.x(), at.y(), z), Vec3::Zero()};
  return st;
}

std::vector<DecisionPoint> decision_points(const RallyState& state) {
  const PlayerId actor = state.phase.actor;
  switch (state.phase.kind) {
    case PhaseKind::await_stroke:
      return {{actor, DecisionKind::stroke}, {opponent(actor), DecisionKind::move}};
    case PhaseKind::await_return:
      return {{actor, DecisionKind::stroke}};
    case PhaseKind::in_flight:
      return {};
    case PhaseKind::terminal:
      break;
  }
  throw ContractViolation("no decisions are pending in a terminal rally");
}

StepResult apply_decisions(RallyState& st, const Decisions& decisions, const MetaParams& params,
                           const EngineOptions& options) {
  const std::vector<DecisionPoint> points = decision_points(st);
  if (points.empty()) throw ContractViolation("rally is in flight; nothing to decide");
  if (decisions.size() != points.size()) {
    throw ContractViolation("expected " + std::to_string(points.size()) + " decision(s), got " +
                            std::to_string(decisions.size()));
  }
  for (const DecisionPoint& dp : points) {
    if (!decisions.contains(dp.player)) {
      throw ContractViolation("missing decision for player " + std::string(to_string(dp.player)));
    }
  }

  StepResult out;
  Engine engine(st, params, options, out);
  if (st.phase.kind == PhaseKind::await_stroke) {
    const PlayerId hitter = st.phase.actor;
    const PlayerId receiver = opponent(hitter);
    const StrokeDecision& stroke = expect_stroke(decisions, hitter);
    const MoveDecision& move = expect_move(decisions, receiver);
    st.player(receiver).move_target = clamp_to_half(move.target_pos, options.court, receiver);
    if (engine.launch(hitter, stroke, st.shuttle.pos.z())) engine.run();
  } else {
    const PlayerId receiver = st.phase.actor;
    StrokeDecision stroke = expect_stroke(decisions, receiver);
    stroke.defense_pos = clamp_to_half(stroke.defense_pos, options.court, receiver);
    st.player(receiver).pending_stroke = stroke;
    st.player(receiver).move_target = plan_intercept(st, receiver, stroke.shot, params, options.court);
    st.phase = RallyPhase{PhaseKind::in_flight, opponent(receiver)};
    engine.run();
  }

  if (options.reward_shaping) {
    out.rewards[0] += options.reward_shaping(st, PlayerId::A);
    out.rewards[1] += options.reward_shaping(st, PlayerId::B);
  }
  return out;
}

bool defense_entry_check(const ShuttleState& shuttle, const PlayerState& receiver,
                         const MetaParams& params) {
  return (horizontal(shuttle.pos) - receiver.pos).norm() <= params.defense_radius;
}

bool intercept_check(const ShuttleState& shuttle, const PlayerState& receiver,
                     ShotType return_shot, const MetaParams& params) {
  return (horizontal(shuttle.pos) - receiver.pos).norm() <= params.reach_radius &&
         params.profile(return_shot).receive_height_window.contains(shuttle.pos.z());
}

bool game_over(const Score& s) {
  const int hi = std::max(s.a, s.b);
  return hi >= 30 || (hi >= 21 && std::abs(s.a - s.b) >= 2);
}

ScoreUpdate update_score(Score score, const RallyOutcome& outcome) {
  if (score.a < 0 || score.b < 0 || game_over(score)) {
    throw ContractViolation("score " + std::to_string(score.a) + "-" + std::to_string(score.b) +
                            " is not a game in progress");
  }
  if (outcome.winner == PlayerId::A) {
    ++score.a;
  } else {
    ++score.b;
  }
  return {score, game_over(score), outcome.winner};
}

double reward(const RallyOutcome& outcome, PlayerId agent) {
  return outcome.winner == agent ? 1.0 : -1.0;
}

// Adding +0.0 folds -0.0 into 0.0 so files never show "-0.000000".
double quantize(double v) { return std::round(v * kRecordScale) / kRecordScale + 0.0; }
Vec2 quantize(const Vec2& v) { return {quantize(v.x()), quantize(v.y())}; }
Vec3 quantize(const Vec3& v) { return {quantize(v.x()), quantize(v.y()), quantize(v.z())}; }

std::uint64_t aim_seed(const Vec3& hit, const Vec2& aim, ShotType shot) {
  std::uint64_t h = mix_seed(index_of(shot));
  for (double v : {hit.x(), hit.y(), hit.z(), aim.x(), aim.y()}) {
    h = mix_seed(h ^ static_cast<std::uint64_t>(std::llround(v * kRecordScale)));
  }
  return h;
}

std::optional<Vec3> solve_recorded(const Vec3& hit, const Vec2& aim, ShotType shot,
                                   const MetaParams& params) {
  if (!(hit.z() > 0.0) || !((aim - horizontal(hit)).norm() >= kMinAimDistance)) {
    return std::nullopt;
  }
  Rng rng(aim_seed(hit, aim, shot));
  return solve_launch(hit, Vec3(aim.x(), aim.y(), 0.0), shot, params, rng);
}

AimResult aim_stroke(const Vec3& hit, const Vec2& aim, ShotType shot, const MetaParams& params) {
  const std::optional<Vec3> launch = solve_recorded(hit, aim, shot, params);
  if (!launch) return {std::nullopt, aim};
  const std::optional<Vec3> land = landing_point({hit, *launch}, params);
  const double miss = land ? (horizontal(*land) - aim).norm() : 0.0;
  if (!land || miss <= kAimExact) return {launch, aim};

  // The solver settled for a branch end. Aim at where that launch lands.
  const Vec2 reachable = quantize(horizontal(*land));
  if (const auto relaunch = solve_recorded(hit, reachable, shot, params)) {
    const auto reland = landing_point({hit, *relaunch}, params);
    if (reland && (horizontal(*reland) - reachable).norm() < miss) return {relaunch, reachable};
  }
  return {launch, aim};
}

}  // namespace shuttlesim
