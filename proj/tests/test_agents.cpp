#include <doctest.h>

#include <cmath>

#include "shuttlesim/agents.hpp"

using namespace shuttlesim;

namespace {

AgentRegistry pair(const MetaParams& p, std::string_view a, std::string_view b) {
  AgentRegistry agents;
  agents.add(PlayerId::A, make_policy(a, p));
  agents.add(PlayerId::B, make_policy(b, p));
  return agents;
}

Observation stroke_obs(int ball_round) {
  Observation obs;
  obs.phase = {PhaseKind::await_stroke, PlayerId::A};
  obs.ball_round = ball_round;
  return obs;
}

}  // namespace

TEST_CASE("zero-std landing distributions aim at the mean") {
  MetaParams p = MetaParams::defaults();
  for (LandingDist& d : p.landing_dist) d.std = Vec2::Zero();
  const ScriptedPolicy policy(p);
  Rng rng(1);
  for (ShotType s : kAllShotTypes) {
    CHECK(policy.sample_target(s, rng) == -p.landing(s).mean);
  }
  for (int i = 0; i < 200; ++i) {
    const auto d = std::get<StrokeDecision>(ScriptedPolicy(p).act(stroke_obs(3), DecisionKind::stroke, rng));
    CHECK(d.landing_target == -p.landing(d.shot).mean);
    CHECK(d.defense_pos == Vec2(-3, 0));
    CHECK_FALSE(is_service(d.shot));
  }
}

TEST_CASE("sampled clear targets match the configured normal") {
  const MetaParams p = MetaParams::defaults();
  const ScriptedPolicy policy(p);
  const LandingDist& d = p.landing(ShotType::clear);
  Rng rng(2);
  const int n = 10000;
  Vec2 sum = Vec2::Zero();
  for (int i = 0; i < n; ++i) sum += -policy.sample_target(ShotType::clear, rng);
  const Vec2 mean = sum / n;
  CHECK(std::abs(mean.x() - d.mean.x()) <= 3 * d.std.x() / std::sqrt(n));
  CHECK(std::abs(mean.y() - d.mean.y()) <= 3 * d.std.y() / std::sqrt(n));
}

TEST_CASE("scripted targets stay in the opponent half") {
  const MetaParams p = MetaParams::defaults();
  const ScriptedPolicy policy(p);
  Rng rng(3);
  for (ShotType s : kAllShotTypes) {
    for (int i = 0; i < 2000; ++i) {
      const Vec2 t = policy.sample_target(s, rng);
      CHECK(t.x() > 0.0);
      CHECK(t.x() <= 6.7);
      CHECK(std::abs(t.y()) <= 2.59);
    }
  }
}

TEST_CASE("services only on the serve") {
  const MetaParams p = MetaParams::defaults();
  ScriptedPolicy policy(p);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    CHECK(is_service(std::get<StrokeDecision>(policy.act(stroke_obs(1), DecisionKind::stroke, rng)).shot));
    CHECK_FALSE(is_service(policy.sample_shot(false, rng)));
  }
  auto w = ScriptedPolicy::uniform_weights();
  w[index_of(ShotType::short_service)] = 0;
  w[index_of(ShotType::long_service)] = 0;
  CHECK_THROWS_AS(ScriptedPolicy(p, {}, w), ValidationError);
  w = ScriptedPolicy::uniform_weights();
  w.fill(0.0);
  w[index_of(ShotType::short_service)] = 1;
  w[index_of(ShotType::smash)] = 1;
  const ScriptedPolicy only(p, {}, w);
  for (int i = 0; i < 100; ++i) {
    CHECK(only.sample_shot(true, rng) == ShotType::short_service);
    CHECK(only.sample_shot(false, rng) == ShotType::smash);
  }
}

TEST_CASE("scripted matchups are deterministic") {
  const MetaParams p = MetaParams::defaults();
  const auto run = [&] {
    const AgentRegistry agents = pair(p, "scripted", "scripted");
    std::vector<RallyOutcome> out;
    for (std::uint64_t i = 0; i < 100; ++i) {
      out.push_back(play_rally(agents, {i % 2 ? PlayerId::B : PlayerId::A, derive_seed(7, i)}, p));
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("random targets stay inside the inflated rectangle") {
  RandomPolicy policy;
  const Vec2 hi = policy.target_max();
  CHECK(hi.x() == doctest::Approx(1.2 * 6.7));
  CHECK(hi.y() == doctest::Approx(1.2 * 2.59));
  Rng rng(5);
  Observation obs = stroke_obs(2);
  for (int i = 0; i < 10000; ++i) {
    const auto d = std::get<StrokeDecision>(policy.act(obs, DecisionKind::stroke, rng));
    CHECK(d.landing_target.x() >= 0.0);
    CHECK(d.landing_target.x() <= hi.x());
    CHECK(std::abs(d.landing_target.y()) <= hi.y());
    CHECK(d.defense_pos.x() <= 0.0);
    CHECK(std::holds_alternative<MoveDecision>(policy.act(obs, DecisionKind::move, rng)));
  }
}

TEST_CASE("random loses most rallies against scripted") {
  const MetaParams p = MetaParams::defaults();
  const AgentRegistry agents = pair(p, "random", "scripted");
  int random_wins = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto out = play_rally(agents, {i % 2 ? PlayerId::B : PlayerId::A, derive_seed(11, i)}, p);
    random_wins += out.winner == PlayerId::A;
  }
  MESSAGE("random won " << random_wins << " of " << n);
  CHECK(n - random_wins > 0.6 * n);
}

TEST_CASE("observations of A and B are reflections of each other") {
  const MetaParams p = MetaParams::defaults();
  const AgentRegistry agents = pair(p, "scripted", "scripted");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EngineOptions opts;
    opts.on_tick = [](const RallyState& s) {
      const Observation a = observe(s, PlayerId::A);
      const Observation b = observe(s, PlayerId::B);
      CHECK(a.own_pos == s.player(PlayerId::A).pos);
      CHECK(b.own_pos == canonicalize(a.opp_pos, PlayerId::B));
      CHECK(b.opp_pos == canonicalize(a.own_pos, PlayerId::B));
      CHECK(b.shuttle.pos == canonicalize(a.shuttle.pos, PlayerId::B));
      CHECK(b.shuttle.vel == canonicalize(a.shuttle.vel, PlayerId::B));
      CHECK(a.phase == b.phase);
      CHECK(a.score == b.score);
    };
    play_rally(agents, {PlayerId::B, seed}, p, opts);
  }
}

TEST_CASE("to_world is an involution") {
  const Decision s = StrokeDecision{{1, 2}, ShotType::lob, {-3, 0.5}};
  CHECK(to_world(to_world(s, PlayerId::B), PlayerId::B) == s);
  CHECK(to_world(s, PlayerId::A) == s);
  CHECK(std::get<MoveDecision>(to_world(MoveDecision{{-2, 1}}, PlayerId::B)).target_pos == Vec2(2, -1));
}

TEST_CASE("policy factory and registry") {
  const MetaParams p = MetaParams::defaults();
  CHECK_THROWS_AS(make_policy("external", p), ValidationError);
  CHECK_THROWS_AS(make_policy("greedy", p), ValidationError);
  AgentRegistry r;
  r.add(PlayerId::C, make_policy("random", p));
  CHECK(r.size() == 1);
  CHECK(r.contains(PlayerId::C));
  CHECK_THROWS_AS(r.add(PlayerId::C, make_policy("random", p)), ContractViolation);
  CHECK_THROWS_AS(r.at(PlayerId::A), ContractViolation);
}
