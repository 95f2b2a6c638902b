#include "shuttlesim/agents.hpp"

#include <algorithm>
#include <numeric>

namespace shuttlesim {

namespace {

constexpr double kNetClearance = 0.01;  // keep canonical targets strictly off the net plane
constexpr double kRandomInflation = 1.2;

}  // namespace

Observation observe(const RallyState& state, PlayerId agent) {
  Observation obs;
  obs.self = agent;
  obs.own_pos = canonicalize(state.player(agent).pos, agent);
  obs.opp_pos = canonicalize(state.player(opponent(agent)).pos, agent);
  obs.shuttle.pos = canonicalize(state.shuttle.pos, agent);
  obs.shuttle.vel = canonicalize(state.shuttle.vel, agent);
  obs.phase = state.phase;
  obs.ball_round = state.ball_round;
  obs.score = state.score;
  obs.last_shot = state.last_shot;
  return obs;
}

Decision to_world(const Decision& decision, PlayerId agent) {
  if (const auto* s = std::get_if<StrokeDecision>(&decision)) {
    return StrokeDecision{canonicalize(s->landing_target, agent), s->shot,
                          canonicalize(s->defense_pos, agent)};
  }
  return MoveDecision{canonicalize(std::get<MoveDecision>(decision).target_pos, agent)};
}

// ---------------------------------------------------------------------------

ScriptedPolicy::ScriptedPolicy(MetaParams params, CourtSpec court, ShotWeights weights)
    : params_(std::move(params)), court_(court), weights_(weights) {
  auto sum = [&](bool services) {
    double s = 0.0;
    for (ShotType t : kAllShotTypes) {
      if (is_service(t) == services) s += weights_[index_of(t)];
    }
    return s;
  };
  if (std::any_of(weights_.begin(), weights_.end(), [](double w) { return !(w >= 0.0); }) ||
      sum(true) <= 0.0 || sum(false) <= 0.0) {
    throw ValidationError("shot weights must be >= 0 with positive service and rally mass");
  }
}

ScriptedPolicy::ShotWeights ScriptedPolicy::uniform_weights() {
  ShotWeights w;
  w.fill(1.0);
  return w;
}

ShotType ScriptedPolicy::sample_shot(bool serving, Rng& rng) const {
  double total = 0.0;
  for (ShotType t : kAllShotTypes) {
    if (is_service(t) == serving) total += weights_[index_of(t)];
  }
  double u = rng.uniform() * total;
  ShotType last = serving ? ShotType::long_service : ShotType::defensive_shot;
  for (ShotType t : kAllShotTypes) {
    if (is_service(t) != serving || weights_[index_of(t)] <= 0.0) continue;
    last = t;
    u -= weights_[index_of(t)];
    if (u < 0.0) return t;
  }
  return last;
}

Vec2 ScriptedPolicy::sample_target(ShotType shot, Rng& rng) const {
  const LandingDist& dist = params_.landing(shot);
  // Receiver frame: receiver on x < 0.
  Vec2 p(rng.normal(dist.mean.x(), dist.std.x()), rng.normal(dist.mean.y(), dist.std.y()));
  p.x() = std::clamp(p.x(), -court_.half_length, -kNetClearance);
  p.y() = std::clamp(p.y(), -court_.half_width_singles, court_.half_width_singles);
  // The hitter's and receiver's canonical frames differ by a point reflection.
  return -p;
}

Vec2 ScriptedPolicy::expected_arrival() const {
  Vec2 sum = Vec2::Zero();
  double total = 0.0;
  for (ShotType t : kAllShotTypes) {
    if (is_service(t)) continue;
    sum += weights_[index_of(t)] * params_.landing(t).mean;
    total += weights_[index_of(t)];
  }
  return sum / total;
}

Decision ScriptedPolicy::act(const Observation& obs, DecisionKind kind, Rng& rng) {
  if (kind == DecisionKind::move) return MoveDecision{expected_arrival()};
  const bool serving = obs.phase.kind == PhaseKind::await_stroke && obs.ball_round == 1;
  const ShotType shot = sample_shot(serving, rng);
  return StrokeDecision{sample_target(shot, rng), shot, base_position()};
}

// ---------------------------------------------------------------------------

RandomPolicy::RandomPolicy(CourtSpec court) : court_(court) {}

Vec2 RandomPolicy::target_max() const {
  return {kRandomInflation * court_.half_length, kRandomInflation * court_.half_width_singles};
}

Decision RandomPolicy::act(const Observation&, DecisionKind kind, Rng& rng) {
  auto own_half = [&] {
    return Vec2(rng.uniform(-court_.half_length, 0.0),
                rng.uniform(-court_.half_width_singles, court_.half_width_singles));
  };
  if (kind == DecisionKind::move) return MoveDecision{own_half()};
  const auto shot = static_cast<ShotType>(rng.index(kShotTypeCount));
  const Vec2 hi = target_max();
  const Vec2 target(rng.uniform(0.0, hi.x()), rng.uniform(-hi.y(), hi.y()));
  return StrokeDecision{target, shot, own_half()};
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(std::string_view name, const MetaParams& params,
                                    const CourtSpec& court) {
  if (name == "scripted") return std::make_unique<ScriptedPolicy>(params, court);
  if (name == "random") return std::make_unique<RandomPolicy>(court);
  if (name == "external") {
    throw ValidationError("external agents are driven through 'serve --stdio'");
  }
  throw ValidationError("unknown agent '" + std::string(name) +
                        "' (expected scripted, random or external)");
}

void AgentRegistry::add(PlayerId id, std::unique_ptr<Policy> policy) {
  if (!policy) throw ContractViolation("null policy");
  auto& slot = slots_[static_cast<std::size_t>(id)];
  if (slot) throw ContractViolation("agent " + std::string(to_string(id)) + " registered twice");
  slot = std::move(policy);
}

Policy& AgentRegistry::at(PlayerId id) const {
  const auto& slot = slots_[static_cast<std::size_t>(id)];
  if (!slot) throw ContractViolation("no agent registered as " + std::string(to_string(id)));
  return *slot;
}

bool AgentRegistry::contains(PlayerId id) const {
  return slots_[static_cast<std::size_t>(id)] != nullptr;
}

std::size_t AgentRegistry::size() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s != nullptr; }));
}

std::uint64_t policy_seed(std::uint64_t rally_seed, PlayerId agent) {
  return derive_seed(rally_seed, 1 + static_cast<std::uint64_t>(agent));
}

RallyOutcome play_rally(const AgentRegistry& agents, const RallySetup& setup,
                        const MetaParams& params, const EngineOptions& options,
                        const std::function<void(const StepResult&, const RallyState&)>& on_step) {
  RallyState state = reset(setup.server, params, setup.seed, setup.score);
  std::array<Rng, 2> rngs{Rng(policy_seed(setup.seed, PlayerId::A)),
                          Rng(policy_seed(setup.seed, PlayerId::B))};
  for (;;) {
    Decisions decisions;
    for (const DecisionPoint& dp : decision_points(state)) {
      Rng& rng = rngs[static_cast<std::size_t>(dp.player)];
      Decision d = agents.at(dp.player).act(observe(state, dp.player), dp.kind, rng);
      const bool is_stroke = std::holds_alternative<StrokeDecision>(d);
      if (is_stroke != (dp.kind == DecisionKind::stroke)) {
        throw ContractViolation("policy returned the wrong decision kind");
      }
      decisions.emplace(dp.player, to_world(d, dp.player));
    }
    StepResult step = apply_decisions(state, decisions, params, options);
    if (on_step) on_step(step, state);
    if (step.outcome) return *step.outcome;
  }
}

}  // namespace shuttlesim
