#ifndef SHUTTLESIM_CORE_HPP
#define SHUTTLESIM_CORE_HPP

// Court geometry, frame conventions, shot taxonomy and the meta-parameter
// container shared by every other module.
//
// World frame: x runs along the court length with the net at x = 0 and
// player B's half at x > 0; y runs across the court with 0 on the center
// line; z is height above the floor. All lengths are meters.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shuttlesim {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2 = Vector2<double>;
using Vec3 = Vector3<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented invariant (bad params, bad flags, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an API contract (e.g. wrong decision set for a phase).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Players

/// Agent identifiers. A and C start on the x < 0 half, B and D on x > 0.
/// Rally mechanics use A and B only; C and D exist for the agent registry.
enum class PlayerId : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::size_t kMaxAgents = 4;

/// Singles opponent.
constexpr PlayerId opponent(PlayerId p) {
  switch (p) {
    case PlayerId::A: return PlayerId::B;
    case PlayerId::B: return PlayerId::A;
    case PlayerId::C: return PlayerId::D;
    case PlayerId::D: return PlayerId::C;
  }
  return PlayerId::A;
}

/// -1 for the x < 0 half, +1 for the x > 0 half.
constexpr double side_sign(PlayerId p) {
  return (p == PlayerId::A || p == PlayerId::C) ? -1.0 : 1.0;
}

std::string_view to_string(PlayerId p);
std::optional<PlayerId> parse_player(std::string_view s);

// ---------------------------------------------------------------------------
// Court

enum class CourtMode { singles };

struct CourtSpec {
  double half_length = 6.70;
  double half_width_doubles = 3.05;
  double half_width_singles = 2.59;
  double net_height = 1.55;
  CourtMode mode = CourtMode::singles;

  /// Throws ValidationError when a geometric invariant does not hold.
  void validate() const;
};

/// Legality of a landing point for the half owned by `target_half`.
/// Lines count as in. Expects a landing event (|z| <= 0.01) but does not
/// check it; the function is total.
bool in_bounds(const Vec3& landing, const CourtSpec& court, PlayerId target_half);

/// Point reflection through the court center for B-side perspectives, so
/// every agent sees itself on the x < 0 half. An involution.
template <typename Scalar>
Vector3<Scalar> canonicalize(const Vector3<Scalar>& pos, PlayerId perspective) {
  if (side_sign(perspective) < 0) return pos;
  return {-pos.x(), -pos.y(), pos.z()};
}

template <typename Scalar>
Vector2<Scalar> canonicalize(const Vector2<Scalar>& pos, PlayerId perspective) {
  if (side_sign(perspective) < 0) return pos;
  return -pos;
}

/// Clamp a horizontal position into the player's own half (doubles width,
/// net plane inclusive).
Vec2 clamp_to_half(const Vec2& pos, const CourtSpec& court, PlayerId owner);

// ---------------------------------------------------------------------------
// Shots

enum class ShotType : std::uint8_t {
  short_service,
  long_service,
  clear,
  drop,
  smash,
  net_shot,
  lob,
  drive,
  push,
  defensive_shot,
};

inline constexpr std::size_t kShotTypeCount = 10;

inline constexpr std::array<ShotType, kShotTypeCount> kAllShotTypes = {
    ShotType::short_service, ShotType::long_service, ShotType::clear,
    ShotType::drop,          ShotType::smash,        ShotType::net_shot,
    ShotType::lob,           ShotType::drive,        ShotType::push,
    ShotType::defensive_shot,
};

constexpr std::size_t index_of(ShotType s) { return static_cast<std::size_t>(s); }
constexpr bool is_service(ShotType s) {
  return s == ShotType::short_service || s == ShotType::long_service;
}

std::string_view to_string(ShotType s);
std::optional<ShotType> parse_shot_type(std::string_view s);

enum class ArcClass : std::uint8_t { low, high };

std::string_view to_string(ArcClass a);
std::optional<ArcClass> parse_arc_class(std::string_view s);

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ShotProfile {
  double hit_height_mean = 1.0;
  double hit_height_std = 0.1;
  Interval hit_height_clamp{0.1, 3.0};
  Interval launch_speed{10.0, 20.0};
  ArcClass arc_class = ArcClass::low;
  /// Heights at which a receiver can play this shot.
  Interval receive_height_window{0.1, 3.0};

  friend bool operator==(const ShotProfile&, const ShotProfile&) = default;
};

/// Axis-aligned normal over landing points, expressed in the receiver's
/// canonical frame (receiver on the x < 0 half).
struct LandingDist {
  Vec2 mean = Vec2::Zero();
  Vec2 std = Vec2::Zero();

  friend bool operator==(const LandingDist& a, const LandingDist& b) {
    return a.mean == b.mean && a.std == b.std;
  }
};

struct MetaParams {
  double player_speed = 2.5;
  double defense_radius = 1.5;
  double reach_radius = 1.0;
  std::array<ShotProfile, kShotTypeCount> profiles{};
  std::array<LandingDist, kShotTypeCount> landing_dist{};
  double terminal_velocity = 6.86;
  double gravity = 9.81;
  double dt = 1.0 / 120.0;
  double execution_noise_std = 0.0;

  const ShotProfile& profile(ShotType s) const { return profiles[index_of(s)]; }
  ShotProfile& profile(ShotType s) { return profiles[index_of(s)]; }
  const LandingDist& landing(ShotType s) const { return landing_dist[index_of(s)]; }
  LandingDist& landing(ShotType s) { return landing_dist[index_of(s)]; }

  /// Largest launch speed over all profiles.
  double max_launch_speed() const;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  /// Built-in defaults used when no params file is supplied.
  static MetaParams defaults();

  friend bool operator==(const MetaParams&, const MetaParams&) = default;
};

}  // namespace shuttlesim

#endif  // SHUTTLESIM_CORE_HPP
