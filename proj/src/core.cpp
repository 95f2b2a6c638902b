#include "shuttlesim/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shuttlesim {

namespace {

constexpr std::array<std::string_view, kShotTypeCount> kShotNames = {
    "short_service", "long_service", "clear", "drop",  "smash",
    "net_shot",      "lob",          "drive", "push",  "defensive_shot",
};

constexpr std::array<std::string_view, kMaxAgents> kPlayerNames = {"A", "B", "C", "D"};

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

std::string_view to_string(PlayerId p) { return kPlayerNames[static_cast<std::size_t>(p)]; }

std::optional<PlayerId> parse_player(std::string_view s) {
  for (std::size_t i = 0; i < kPlayerNames.size(); ++i) {
    if (kPlayerNames[i] == s) return static_cast<PlayerId>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ShotType s) { return kShotNames[index_of(s)]; }

std::optional<ShotType> parse_shot_type(std::string_view s) {
  for (std::size_t i = 0; i < kShotNames.size(); ++i) {
    if (kShotNames[i] == s) return static_cast<ShotType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ArcClass a) { return a == ArcClass::low ? "low" : "high"; }

std::optional<ArcClass> parse_arc_class(std::string_view s) {
  if (s == "low") return ArcClass::low;
  if (s == "high") return ArcClass::high;
  return std::nullopt;
}

void CourtSpec::validate() const {
  require(half_length > 0 && half_width_doubles > 0 && half_width_singles > 0 && net_height > 0,
          "court lengths must be positive");
  require(half_width_singles < half_width_doubles, "singles width must be below doubles width");
  require(net_height < 3.0, "net height must be below 3 m");
}

bool in_bounds(const Vec3& landing, const CourtSpec& court, PlayerId target_half) {
  const double x = landing.x() * side_sign(target_half);
  return x > 0.0 && x <= court.half_length && std::abs(landing.y()) <= court.half_width_singles;
}

Vec2 clamp_to_half(const Vec2& pos, const CourtSpec& court, PlayerId owner) {
  const double s = side_sign(owner);
  const double own_x = std::clamp(pos.x() * s, 0.0, court.half_length);
  const double y = std::clamp(pos.y(), -court.half_width_doubles, court.half_width_doubles);
  return {own_x * s, y};
}

double MetaParams::max_launch_speed() const {
  double v = 0.0;
  for (const auto& p : profiles) v = std::max(v, p.launch_speed.hi);
  return v;
}

void MetaParams::validate() const {
  require(std::isfinite(player_speed) && player_speed > 0, "player_speed must be > 0");
  require(std::isfinite(reach_radius) && reach_radius > 0, "reach_radius must be > 0");
  require(std::isfinite(defense_radius) && defense_radius >= reach_radius,
          "defense_radius must be >= reach_radius");
  require(std::isfinite(dt) && dt > 0, "dt must be > 0");
  require(std::isfinite(terminal_velocity) && terminal_velocity > 0,
          "terminal_velocity must be > 0");
  require(std::isfinite(gravity) && gravity > 0, "gravity must be > 0");
  require(std::isfinite(execution_noise_std) && execution_noise_std >= 0,
          "execution_noise_std must be >= 0");
  for (ShotType s : kAllShotTypes) {
    const std::string name(to_string(s));
    const ShotProfile& p = profile(s);
    require(std::isfinite(p.hit_height_mean) && std::isfinite(p.hit_height_std) &&
                p.hit_height_std >= 0,
            name + ": hit height mean/std invalid");
    require(p.hit_height_clamp.lo >= 0 && p.hit_height_clamp.lo <= p.hit_height_clamp.hi,
            name + ": hit_height_clamp must be ordered and >= 0");
    require(p.launch_speed.lo > 0 && p.launch_speed.lo <= p.launch_speed.hi,
            name + ": launch_speed must be ordered and > 0");
    require(p.receive_height_window.lo <= p.receive_height_window.hi,
            name + ": receive_height_window must be ordered");
    const LandingDist& d = landing(s);
    require(finite(d.mean) && finite(d.std), name + ": landing distribution must be finite");
    require(d.std.x() >= 0 && d.std.y() >= 0, name + ": landing std must be >= 0");
  }
}

MetaParams MetaParams::defaults() {
  MetaParams m;
  auto set = [&m](ShotType s, double h_mean, double h_std, Interval clamp, Interval speed,
                  ArcClass arc, Interval window, Vec2 land_mean, Vec2 land_std) {
    m.profile(s) = ShotProfile{h_mean, h_std, clamp, speed, arc, window};
    m.landing(s) = LandingDist{land_mean, land_std};
  };
  using enum ShotType;
  using enum ArcClass;
  // Hit heights stay below the net for everything except the smash.
  set(short_service, 1.00, 0.05, {0.80, 1.15}, {10.8, 11.6}, low, {0.30, 2.60},
      {-2.20, 0.0}, {0.15, 0.40});
  set(long_service, 1.00, 0.05, {0.80, 1.15}, {30.0, 50.0}, high, {0.30, 3.40},
      {-5.90, 0.0}, {0.25, 0.70});
  set(clear, 1.45, 0.15, {0.90, 2.40}, {35.0, 60.0}, high, {0.60, 3.40},
      {-5.60, 0.0}, {0.35, 0.80});
  set(drop, 1.40, 0.15, {0.90, 2.40}, {8.0, 25.0}, high, {0.30, 3.00},
      {-2.30, 0.0}, {0.35, 0.80});
  set(smash, 2.40, 0.20, {1.80, 3.20}, {18.0, 30.0}, low, {1.00, 3.40},
      {-3.80, 0.0}, {0.60, 0.80});
  set(net_shot, 1.10, 0.15, {0.60, 1.50}, {4.0, 12.0}, low, {0.10, 1.80},
      {-1.20, 0.0}, {0.30, 0.80});
  set(lob, 0.80, 0.20, {0.20, 1.50}, {30.0, 55.0}, high, {0.05, 1.80},
      {-5.60, 0.0}, {0.35, 0.80});
  set(drive, 1.20, 0.15, {0.70, 1.80}, {10.0, 20.0}, low, {0.50, 2.40},
      {-4.00, 0.0}, {0.60, 0.80});
  set(push, 0.90, 0.15, {0.40, 1.40}, {6.0, 14.0}, low, {0.20, 2.00},
      {-3.00, 0.0}, {0.50, 0.80});
  set(defensive_shot, 0.60, 0.20, {0.10, 1.40}, {25.0, 50.0}, high, {0.05, 1.80},
      {-5.00, 0.0}, {0.60, 0.80});
  return m;
}

}  // namespace shuttlesim
