#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aim_oracle.hpp"
#include "shuttlesim/physics.hpp"

using namespace shuttlesim;

namespace {

MetaParams no_drag() {
  MetaParams p = MetaParams::defaults();
  p.terminal_velocity = 1e9;
  return p;
}

double energy(const ShuttleState& s, double g) { return 0.5 * s.vel.squaredNorm() + g * s.pos.z(); }

}  // namespace

TEST_CASE("accel examples") {
  const MetaParams p = MetaParams::defaults();
  CHECK(accel({Vec3(0, 0, 1), Vec3::Zero()}, p) == Vec3(0, 0, -9.81));
  const Vec3 eq = accel({Vec3(0, 0, 1), Vec3(0, 0, -6.86)}, p);
  CHECK(eq.norm() <= 1e-12);
  const Vec3 a = accel({Vec3(0, 0, 1), Vec3(10, 0, 0)}, p);
  CHECK(std::abs(a.x() + 20.85) <= 0.01);
  CHECK(a.y() == 0.0);
  CHECK(a.z() == -9.81);
}

TEST_CASE("drag-free step matches the parabola") {
  const MetaParams p = no_drag();
  const ShuttleState s{Vec3(0, 0, 1), Vec3(5, 0, 5)};
  const ShuttleState n = step(s, p);
  const double t = p.dt;
  CHECK(std::abs(n.pos.x() - 5 * t) <= 1e-9);
  CHECK(std::abs(n.pos.z() - (1 + 5 * t - 0.5 * 9.81 * t * t)) <= 1e-9);
  CHECK(std::abs(n.vel.z() - (5 - 9.81 * t)) <= 1e-9);
}

TEST_CASE("one step from rest") {
  const MetaParams p = MetaParams::defaults();
  const ShuttleState n = step({Vec3(0, 0, 3), Vec3::Zero()}, p);
  CHECK(std::abs(n.vel.z() + 9.81 * p.dt) <= 1e-4);
}

TEST_CASE("two half steps agree with one full step") {
  MetaParams full = MetaParams::defaults();
  MetaParams half = full;
  half.dt = full.dt / 2;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const ShuttleState s{Vec3(-3, 0, 1.5),
                         Vec3(rng.uniform(-30, 30), rng.uniform(-10, 10), rng.uniform(-20, 20))};
    const ShuttleState a = step(s, full);
    const ShuttleState b = step(step(s, half), half);
    CHECK((a.pos - b.pos).norm() < 1e-6);
  }
}

TEST_CASE("free fall lands after the drag-free time") {
  const MetaParams p = MetaParams::defaults();
  const FlightResult r = simulate_until({Vec3(0.5, 0, 3), Vec3::Zero()}, p);
  CHECK(r.event.kind == FlightEventKind::landed);
  CHECK(r.event.time >= std::sqrt(2 * 3 / 9.81));
  CHECK(std::abs(r.event.state.pos.z()) <= 1e-3);
  CHECK(r.event.state.pos.x() == 0.5);
  CHECK(r.trajectory.front().pos == Vec3(0.5, 0, 3));
  CHECK(r.trajectory.back() == r.event.state);
}

TEST_CASE("low crossing of the net plane is a net fault") {
  const MetaParams p = MetaParams::defaults();
  const FlightResult r = simulate_until({Vec3(-3, 0, 1.0), Vec3(30, 0, 0)}, p);
  REQUIRE(r.event.kind == FlightEventKind::net_fault);
  CHECK(std::abs(r.event.state.pos.x()) <= 1e-9);
  CHECK(r.event.state.pos.z() < 1.55);

  FlightOptions opts;
  opts.check_net = false;
  CHECK(simulate_until({Vec3(-3, 0, 1.0), Vec3(30, 0, 0)}, p, {}, opts).event.kind ==
        FlightEventKind::landed);
  // Clearing the net is not a fault.
  CHECK(simulate_until({Vec3(-3, 0, 2.5), Vec3(15, 0, 5)}, p).event.kind == FlightEventKind::landed);
}

TEST_CASE("watchers stop the flight") {
  const MetaParams p = MetaParams::defaults();
  const Watcher w{FlightEventKind::defense_entry, [](const ShuttleState& s) { return s.pos.x() > 1.0; }};
  const FlightResult r = simulate_until({Vec3(-3, 0, 2), Vec3(15, 0, 8)}, p, std::span(&w, 1));
  CHECK(r.event.kind == FlightEventKind::defense_entry);
  CHECK(r.event.state.pos.x() > 1.0);
  CHECK(r.ticks == r.trajectory.size() - 1);
}

TEST_CASE("no launch hovers until the timeout") {
  const MetaParams p = MetaParams::defaults();
  FlightOptions opts;
  opts.check_net = false;
  opts.record_trajectory = false;
  for (double z : {0.1, 1.5, 3.0}) {
    for (int i = 0; i <= 20; ++i) {
      const double speed = 1.0 + (p.max_launch_speed() - 1.0) * i / 20;
      for (int j = 0; j <= 30; ++j) {
        const double e = -std::numbers::pi / 2 + std::numbers::pi * j / 30;
        const FlightResult r =
            simulate_until({Vec3(-3, 0, z), launch_velocity(speed, e, {1, 0})}, p, {}, opts);
        CHECK(r.event.kind == FlightEventKind::landed);
        CHECK(r.event.time < 4.0 + z);
      }
    }
  }
}

TEST_CASE("speed approaches terminal velocity monotonically") {
  const MetaParams p = MetaParams::defaults();
  ShuttleState s{Vec3(0, 0, 1000), Vec3::Zero()};
  double prev = 0.0;
  const int steps = static_cast<int>(std::lround(5.0 / p.dt));
  for (int i = 0; i < steps; ++i) {
    s = step(s, p);
    const double v = s.vel.norm();
    CHECK(v > prev);
    CHECK(v <= p.terminal_velocity);
    prev = v;
  }
  CHECK(p.terminal_velocity - prev < 0.01 * p.terminal_velocity);
}

TEST_CASE("mechanical energy never increases and azimuth is preserved") {
  const MetaParams p = MetaParams::defaults();
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const double az = rng.uniform(-3, 3);
    ShuttleState s{Vec3(-3, 0, 1.2),
                   launch_velocity(rng.uniform(5, 60), rng.uniform(-1, 1.4), {std::cos(az), std::sin(az)})};
    const double azimuth = std::atan2(s.vel.y(), s.vel.x());
    double e = energy(s, p.gravity);
    while (s.pos.z() > 0) {
      s = step(s, p);
      const double e2 = energy(s, p.gravity);
      CHECK(e2 <= e + 1e-9 * std::abs(e));
      CHECK(std::abs(std::atan2(s.vel.y(), s.vel.x()) - azimuth) <= 1e-9);
      e = e2;
    }
  }
}

TEST_CASE("drag-free range matches the closed form") {
  const MetaParams p = no_drag();
  const auto land = landing_point({Vec3::Zero(), launch_velocity(10, std::numbers::pi / 4, {1, 0})}, p);
  REQUIRE(land);
  CHECK(std::abs(land->x() - 100 / 9.81) <= 1e-3);
}

TEST_CASE("returned launches land on target") {
  const MetaParams p = MetaParams::defaults();
  Rng cases(21);
  Rng solver(22);
  for (ShotType shot : kAllShotTypes) {
    int solved = 0;
    int total = 0;
    while (total < 50) {
      const auto c = testing::feasible_case(shot, p, cases);
      if (!c) continue;
      ++total;
      const auto v = solve_launch(c->hit, c->target, shot, p, solver);
      if (!v) continue;
      ++solved;
      const auto land = landing_point({c->hit, *v}, p);
      REQUIRE(land);
      CHECK((land->head<2>() - c->target.head<2>()).norm() <= kAimTolerance);
      CHECK(v->norm() >= p.profile(shot).launch_speed.lo - 1e-9);
      CHECK(v->norm() <= p.profile(shot).launch_speed.hi + 1e-9);
    }
    CHECK_MESSAGE(solved >= 49, to_string(shot));
  }
}

TEST_CASE("targets beyond maximum range are infeasible") {
  const MetaParams p = MetaParams::defaults();
  Rng rng(1);
  const Vec3 hit(-3, 0, 2.4);
  const Vec3 target(22, 0, 0);
  CHECK_FALSE(solve_launch(hit, target, ShotType::smash, p, rng).has_value());
  CHECK_FALSE(testing::grid_finds_solution(hit, target, ShotType::smash, p));
}

TEST_CASE("solver contract violations") {
  const MetaParams p = MetaParams::defaults();
  Rng rng(1);
  CHECK_THROWS_AS(solve_launch({0, 0, 1}, {0.05, 0, 0}, ShotType::clear, p, rng), ContractViolation);
  CHECK_THROWS_AS(solve_launch({0, 0, 0}, {3, 0, 0}, ShotType::clear, p, rng), ContractViolation);
}

TEST_CASE("mirrored aims give reflected launches") {
  const MetaParams p = MetaParams::defaults();
  for (ShotType shot : kAllShotTypes) {
    Rng r1(99), r2(99);
    const auto a = solve_launch({-3, 0, 1.7}, {3, 0, 0}, shot, p, r1);
    const auto b = solve_launch({3, 0, 1.7}, {-3, 0, 0}, shot, p, r2);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK((canonicalize(*a, PlayerId::B) - *b).norm() <= 1e-12);
  }
}

TEST_CASE("hit height model") {
  MetaParams p = MetaParams::defaults();
  ShotProfile& prof = p.profile(ShotType::drive);
  prof.hit_height_mean = 1.0;
  prof.hit_height_std = 0.0;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_hit_height(ShotType::drive, p, rng) == 1.0);

  prof.hit_height_mean = 1.2;
  prof.hit_height_std = 0.3;
  prof.hit_height_clamp = {0.0, 10.0};
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_hit_height(ShotType::drive, p, rng);
  CHECK(std::abs(sum / n - 1.2) <= 0.003);

  const MetaParams d = MetaParams::defaults();
  for (ShotType s : kAllShotTypes) {
    for (int i = 0; i < 2000; ++i) CHECK(d.profile(s).hit_height_clamp.contains(sample_hit_height(s, d, rng)));
  }
}
