#ifndef SHUTTLESIM_PHYSICS_HPP
#define SHUTTLESIM_PHYSICS_HPP

// Shuttlecock flight: gravity plus quadratic drag parameterized by terminal
// velocity, a fixed-step RK4 integrator, event-driven flight simulation and
// the inverse aim solver.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shuttlesim/core.hpp"
#include "shuttlesim/rng.hpp"

namespace shuttlesim {

template <typename Scalar>
struct ShuttleStateT {
  Vector3<Scalar> pos = Vector3<Scalar>::Zero();
  Vector3<Scalar> vel = Vector3<Scalar>::Zero();

  friend bool operator==(const ShuttleStateT& a, const ShuttleStateT& b) {
    return a.pos == b.pos && a.vel == b.vel;
  }
};

using ShuttleState = ShuttleStateT<double>;

/// a = -g z^ - (g / vt^2) |v| v
template <typename Scalar>
Vector3<Scalar> drag_accel(const Vector3<Scalar>& vel, Scalar gravity, Scalar terminal_velocity) {
  const Scalar k = gravity / (terminal_velocity * terminal_velocity);
  Vector3<Scalar> a = -(k * vel.norm()) * vel;
  a.z() -= gravity;
  return a;
}

/// One classical RK4 step of (pos, vel).
template <typename Scalar>
ShuttleStateT<Scalar> rk4_step(const ShuttleStateT<Scalar>& s, Scalar dt, Scalar gravity,
                               Scalar terminal_velocity) {
  const Scalar half = dt / Scalar(2);
  const auto acc = [&](const Vector3<Scalar>& v) {
    return drag_accel<Scalar>(v, gravity, terminal_velocity);
  };

  const Vector3<Scalar> k1v = s.vel;
  const Vector3<Scalar> k1a = acc(s.vel);
  const Vector3<Scalar> k2v = s.vel + half * k1a;
  const Vector3<Scalar> k2a = acc(k2v);
  const Vector3<Scalar> k3v = s.vel + half * k2a;
  const Vector3<Scalar> k3a = acc(k3v);
  const Vector3<Scalar> k4v = s.vel + dt * k3a;
  const Vector3<Scalar> k4a = acc(k4v);

  const Scalar sixth = dt / Scalar(6);
  ShuttleStateT<Scalar> out;
  out.pos = s.pos + sixth * (k1v + Scalar(2) * k2v + Scalar(2) * k3v + k4v);
  out.vel = s.vel + sixth * (k1a + Scalar(2) * k2a + Scalar(2) * k3a + k4a);
  return out;
}

Vec3 accel(const ShuttleState& state, const MetaParams& params);

/// Advance one params.dt step.
ShuttleState step(const ShuttleState& state, const MetaParams& params);

// ---------------------------------------------------------------------------
// Event-driven flight

enum class FlightEventKind { landed, net_fault, defense_entry, intercept_window, timeout };

std::string_view to_string(FlightEventKind k);

struct FlightEvent {
  FlightEventKind kind = FlightEventKind::timeout;
  double time = 0.0;  ///< seconds since launch
  ShuttleState state;
};

/// Extra stopping condition, evaluated on the state at the end of each tick.
struct Watcher {
  FlightEventKind kind;
  std::function<bool(const ShuttleState&)> fires;
};

inline constexpr double kFlightTimeout = 10.0;

struct FlightOptions {
  CourtSpec court{};
  bool check_net = true;
  bool record_trajectory = true;
  /// Seconds already flown before `start` (resumed flights).
  double elapsed = 0.0;
  double timeout = kFlightTimeout;
  /// Called after every integration step with the new state and the number
  /// of ticks taken so far in this call, before watchers are evaluated.
  std::function<void(const ShuttleState&, std::size_t tick)> on_tick;
};

struct FlightResult {
  std::vector<ShuttleState> trajectory;  ///< start state ... event state
  FlightEvent event;
  std::size_t ticks = 0;  ///< integration steps taken
};

/// Integrate until the first event. Landing (z crossing 0), net contact and
/// the timeout are always armed; landing and net events are localized by
/// linear interpolation within the step. Ties within a step go to the earlier
/// interpolated time, and built-in events precede watchers.
FlightResult simulate_until(const ShuttleState& start, const MetaParams& params,
                            std::span<const Watcher> watchers = {},
                            const FlightOptions& options = {});

/// Landing point of an untouched flight (net ignored), or nullopt on timeout.
std::optional<Vec3> landing_point(const ShuttleState& start, const MetaParams& params);

// ---------------------------------------------------------------------------
// Aim solver

inline constexpr double kAimTolerance = 0.05;
inline constexpr double kMinLaunchAngle = -60.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kMaxLaunchAngle = 85.0 * 3.14159265358979323846 / 180.0;

/// Launch velocity in world frame for a given speed, elevation and
/// horizontal heading.
Vec3 launch_velocity(double speed, double elevation, const Vec2& heading);

/// Horizontal carry of a launch from `hit` (negative when it times out).
double carry_distance(const Vec3& hit, const Vec2& heading, double speed, double elevation,
                      const MetaParams& params);

/// Range-maximizing elevation at this speed (golden-section search).
double apex_elevation(const Vec3& hit, const Vec2& heading, double speed,
                      const MetaParams& params);

/// Inverse ballistics. Samples a launch speed from the shot's range, then
/// bisects on elevation inside the shot's arc branch until the simulated
/// carry matches the target distance. If the target is out of reach at the
/// sampled speed the solver retries once at the bound of the speed range
/// that moves the reachable interval toward the target. Returns nullopt when
/// no launch lands within kAimTolerance.
///
/// Requires a horizontal hit-target distance of at least 0.1 m and
/// hit.z() > 0 (ContractViolation otherwise).
std::optional<Vec3> solve_launch(const Vec3& hit, const Vec3& target, ShotType shot,
                                 const MetaParams& params, Rng& rng);

/// Normal(mean, std) clamped to the shot's hit_height_clamp.
double sample_hit_height(ShotType shot, const MetaParams& params, Rng& rng);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_PHYSICS_HPP
