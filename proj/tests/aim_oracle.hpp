#ifndef SHUTTLESIM_TESTS_AIM_ORACLE_HPP
#define SHUTTLESIM_TESTS_AIM_ORACLE_HPP

// Independent checks for the aim solver: cases built by forward simulation
// (so a solution is known to exist) and a brute-force grid over
// (speed, elevation) to confirm Infeasible verdicts.

#include <cmath>
#include <optional>

#include "shuttlesim/physics.hpp"

namespace shuttlesim::testing {

struct AimCase {
  Vec3 hit;
  Vec3 target;
};

/// Elevation interval of the shot's arc branch at `speed`.
inline std::pair<double, double> branch_bounds(const Vec3& hit, const Vec2& heading, double speed,
                                               ArcClass arc, const MetaParams& params) {
  const double apex = apex_elevation(hit, heading, speed, params);
  return arc == ArcClass::low ? std::pair{kMinLaunchAngle, apex} : std::pair{apex, kMaxLaunchAngle};
}

/// A hit on A's half and a target reached by some launch inside the shot's
/// speed range and arc branch.
inline std::optional<AimCase> feasible_case(ShotType shot, const MetaParams& params, Rng& rng) {
  const ShotProfile& prof = params.profile(shot);
  const Vec3 hit(rng.uniform(-6.5, -0.5), rng.uniform(-2.5, 2.5), sample_hit_height(shot, params, rng));
  const double azimuth = rng.uniform(-1.0, 1.0);
  const Vec2 heading(std::cos(azimuth), std::sin(azimuth));
  const double speed = rng.uniform(prof.launch_speed.lo, prof.launch_speed.hi);
  const auto [lo, hi] = branch_bounds(hit, heading, speed, prof.arc_class, params);
  const double elevation = rng.uniform(lo, hi);
  const auto land = landing_point({hit, launch_velocity(speed, elevation, heading)}, params);
  if (!land) return std::nullopt;
  const Vec3 target(land->x(), land->y(), 0.0);
  if ((target - hit).head<2>().norm() < 0.2) return std::nullopt;
  return AimCase{hit, target};
}

/// True when some (speed, elevation) on an n x n grid over the speed range
/// and arc branch lands within `tolerance` of the target.
inline bool grid_finds_solution(const Vec3& hit, const Vec3& target, ShotType shot,
                                const MetaParams& params, int n = 50,
                                double tolerance = kAimTolerance) {
  const ShotProfile& prof = params.profile(shot);
  const Vec2 delta = (target - hit).head<2>();
  const Vec2 heading = delta.normalized();
  for (int i = 0; i < n; ++i) {
    const double speed =
        prof.launch_speed.lo + (prof.launch_speed.hi - prof.launch_speed.lo) * i / (n - 1);
    const auto [lo, hi] = branch_bounds(hit, heading, speed, prof.arc_class, params);
    for (int j = 0; j < n; ++j) {
      const double e = lo + (hi - lo) * j / (n - 1);
      const auto land = landing_point({hit, launch_velocity(speed, e, heading)}, params);
      if (land && (land->head<2>() - target.head<2>()).norm() <= tolerance) return true;
    }
  }
  return false;
}

}  // namespace shuttlesim::testing

#endif  // SHUTTLESIM_TESTS_AIM_ORACLE_HPP
