#include "shuttlesim/physics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace shuttlesim {

namespace {

constexpr double kRefineTolerance = 1e-7;
constexpr int kMaxRootIterations = 64;
constexpr int kApexBits = 14;
constexpr double kMinAimDistance = 0.1;

ShuttleState lerp(const ShuttleState& a, const ShuttleState& b, double f) {
  return {a.pos + f * (b.pos - a.pos), a.vel + f * (b.vel - a.vel)};
}

}  // namespace

Vec3 accel(const ShuttleState& state, const MetaParams& params) {
  return drag_accel<double>(state.vel, params.gravity, params.terminal_velocity);
}

ShuttleState step(const ShuttleState& state, const MetaParams& params) {
  return rk4_step<double>(state, params.dt, params.gravity, params.terminal_velocity);
}

std::string_view to_string(FlightEventKind k) {
  switch (k) {
    case FlightEventKind::landed: return "landed";
    case FlightEventKind::net_fault: return "net_fault";
    case FlightEventKind::defense_entry: return "defense_entry";
    case FlightEventKind::intercept_window: return "intercept_window";
    case FlightEventKind::timeout: return "timeout";
  }
  return "?";
}

FlightResult simulate_until(const ShuttleState& start, const MetaParams& params,
                            std::span<const Watcher> watchers, const FlightOptions& options) {
  FlightResult result;
  if (options.record_trajectory) result.trajectory.push_back(start);

  const double dt = params.dt;
  ShuttleState prev = start;
  for (std::size_t n = 1;; ++n) {
    const ShuttleState cur = step(prev, params);
    const double t_prev = options.elapsed + static_cast<double>(n - 1) * dt;
    if (options.on_tick) options.on_tick(cur, n);

    // Fractions of the step at which built-in events happen.
    double f_land = std::numeric_limits<double>::infinity();
    double f_net = std::numeric_limits<double>::infinity();
    if (prev.pos.z() > 0.0 && cur.pos.z() <= 0.0) {
      f_land = prev.pos.z() / (prev.pos.z() - cur.pos.z());
    }
    if (options.check_net && ((prev.pos.x() < 0.0 && cur.pos.x() >= 0.0) ||
                              (prev.pos.x() > 0.0 && cur.pos.x() <= 0.0))) {
      const double f = prev.pos.x() / (prev.pos.x() - cur.pos.x());
      const double z = prev.pos.z() + f * (cur.pos.z() - prev.pos.z());
      if (z < options.court.net_height && f <= f_land) f_net = f;
    }

    std::optional<FlightEvent> event;
    if (f_net <= f_land && std::isfinite(f_net)) {
      ShuttleState s = lerp(prev, cur, f_net);
      s.pos.x() = 0.0;
      event = FlightEvent{FlightEventKind::net_fault, t_prev + f_net * dt, s};
    } else if (std::isfinite(f_land)) {
      ShuttleState s = lerp(prev, cur, f_land);
      s.pos.z() = 0.0;
      event = FlightEvent{FlightEventKind::landed, t_prev + f_land * dt, s};
    } else {
      for (const Watcher& w : watchers) {
        if (w.fires(cur)) {
          event = FlightEvent{w.kind, t_prev + dt, cur};
          break;
        }
      }
      if (!event && t_prev + dt >= options.timeout) {
        event = FlightEvent{FlightEventKind::timeout, t_prev + dt, cur};
      }
    }

    if (event) {
      if (options.record_trajectory) result.trajectory.push_back(event->state);
      result.event = *event;
      result.ticks = n;
      return result;
    }
    if (options.record_trajectory) result.trajectory.push_back(cur);
    prev = cur;
  }
}

std::optional<Vec3> landing_point(const ShuttleState& start, const MetaParams& params) {
  const auto max_steps = static_cast<std::size_t>(std::ceil(kFlightTimeout / params.dt));
  ShuttleState prev = start;
  for (std::size_t n = 0; n < max_steps; ++n) {
    const ShuttleState cur = step(prev, params);
    if (prev.pos.z() > 0.0 && cur.pos.z() <= 0.0) {
      const double f = prev.pos.z() / (prev.pos.z() - cur.pos.z());
      Vec3 p = prev.pos + f * (cur.pos - prev.pos);
      p.z() = 0.0;
      return p;
    }
    prev = cur;
  }
  return std::nullopt;
}

Vec3 launch_velocity(double speed, double elevation, const Vec2& heading) {
  const double h = speed * std::cos(elevation);
  return {h * heading.x(), h * heading.y(), speed * std::sin(elevation)};
}

double carry_distance(const Vec3& hit, const Vec2& heading, double speed, double elevation,
                      const MetaParams& params) {
  const auto land = landing_point({hit, launch_velocity(speed, elevation, heading)}, params);
  if (!land) return -1.0;
  return (land->head<2>() - hit.head<2>()).norm();
}

double apex_elevation(const Vec3& hit, const Vec2& heading, double speed,
                      const MetaParams& params) {
  const auto [angle, carry] = boost::math::tools::brent_find_minima(
      [&](double e) { return -carry_distance(hit, heading, speed, e, params); }, kMinLaunchAngle,
      kMaxLaunchAngle, kApexBits);
  return angle;
}

namespace {

struct BranchAttempt {
  std::optional<double> elevation;  // set when the carry is within tolerance
  double miss = std::numeric_limits<double>::infinity();
  bool too_long = false;  // target beyond the apex carry
};

// Solve for the elevation within one arc branch at a fixed speed. The branch runs
// from its edge angle (shortest carry) to the apex (longest carry), so the
// residual is <= 0 at the edge and >= 0 at the apex whenever the distance is
// reachable.
BranchAttempt solve_branch(const Vec3& hit, const Vec2& heading, double distance, double speed,
                           ArcClass arc, const MetaParams& params) {
  const double apex = apex_elevation(hit, heading, speed, params);
  const double edge = arc == ArcClass::low ? kMinLaunchAngle : kMaxLaunchAngle;
  const double r_apex = carry_distance(hit, heading, speed, apex, params) - distance;
  const double r_edge = carry_distance(hit, heading, speed, edge, params) - distance;

  BranchAttempt out;
  if (r_apex < 0.0) {
    out.too_long = true;
    out.miss = -r_apex;
    if (out.miss <= kAimTolerance) out.elevation = apex;
    return out;
  }
  if (r_edge > 0.0) {
    out.miss = r_edge;
    if (out.miss <= kAimTolerance) out.elevation = edge;
    return out;
  }

  // Illinois regula falsi: the residual is smooth and monotone in the branch.
  double lo = edge;  // residual <= 0
  double hi = apex;  // residual >= 0
  double r_lo = r_edge;
  double r_hi = r_apex;
  double best = std::abs(r_edge) < std::abs(r_apex) ? edge : apex;
  double best_miss = std::min(std::abs(r_edge), std::abs(r_apex));
  int side = 0;
  for (int i = 0; i < kMaxRootIterations && best_miss > kRefineTolerance; ++i) {
    double mid = r_hi - r_lo > 0.0 ? lo - r_lo * (hi - lo) / (r_hi - r_lo) : 0.5 * (lo + hi);
    if (!(mid > std::min(lo, hi) && mid < std::max(lo, hi))) mid = 0.5 * (lo + hi);
    const double r = carry_distance(hit, heading, speed, mid, params) - distance;
    if (std::abs(r) < best_miss) {
      best_miss = std::abs(r);
      best = mid;
    }
    if (r < 0.0) {
      lo = mid;
      r_lo = r;
      if (side == -1) r_hi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      r_hi = r;
      if (side == 1) r_lo *= 0.5;
      side = 1;
    }
  }
  out.miss = best_miss;
  if (best_miss <= kAimTolerance) out.elevation = best;
  return out;
}

}  // namespace

std::optional<Vec3> solve_launch(const Vec3& hit, const Vec3& target, ShotType shot,
                                 const MetaParams& params, Rng& rng) {
  const Vec2 delta = target.head<2>() - hit.head<2>();
  const double distance = delta.norm();
  if (!(distance >= kMinAimDistance)) {
    throw ContractViolation("solve_launch: target closer than 0.1 m to the hit point");
  }
  if (!(hit.z() > 0.0)) throw ContractViolation("solve_launch: hit height must be > 0");

  const ShotProfile& profile = params.profile(shot);
  const Vec2 heading = delta / distance;
  const double speed = rng.uniform(profile.launch_speed.lo, profile.launch_speed.hi);

  BranchAttempt first = solve_branch(hit, heading, distance, speed, profile.arc_class, params);
  if (first.elevation) return launch_velocity(speed, *first.elevation, heading);

  // Out of reach: a faster launch carries further, a slower one shorter.
  const double retry = first.too_long ? profile.launch_speed.hi : profile.launch_speed.lo;
  if (retry == speed) return std::nullopt;
  BranchAttempt second = solve_branch(hit, heading, distance, retry, profile.arc_class, params);
  if (second.elevation) return launch_velocity(retry, *second.elevation, heading);
  return std::nullopt;
}

double sample_hit_height(ShotType shot, const MetaParams& params, Rng& rng) {
  const ShotProfile& p = params.profile(shot);
  return p.hit_height_clamp.clamp(rng.normal(p.hit_height_mean, p.hit_height_std));
}

}  // namespace shuttlesim
