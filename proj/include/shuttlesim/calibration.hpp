#ifndef SHUTTLESIM_CALIBRATION_HPP
#define SHUTTLESIM_CALIBRATION_HPP

// Stroke-level dataset loader (BLSR-style CSV) and the meta-parameter
// estimator built on it.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "shuttlesim/core.hpp"

namespace shuttlesim {

/// One row per stroke, coordinates already in the world frame.
struct BlsrRow {
  std::string rally;
  int ball_round = 1;
  double time = 0.0;
  PlayerId player = PlayerId::A;
  ShotType shot = ShotType::clear;
  Vec2 hit = Vec2::Zero();
  Vec2 landing = Vec2::Zero();
  Vec2 hitter_pos = Vec2::Zero();
  Vec2 opponent_pos = Vec2::Zero();
  int score_a = 0;
  int score_b = 0;
  bool above_net = false;

  friend bool operator==(const BlsrRow& a, const BlsrRow& b) {
    return a.rally == b.rally && a.ball_round == b.ball_round && a.time == b.time &&
           a.player == b.player && a.shot == b.shot && a.hit == b.hit && a.landing == b.landing &&
           a.hitter_pos == b.hitter_pos && a.opponent_pos == b.opponent_pos &&
           a.score_a == b.score_a && a.score_b == b.score_b && a.above_net == b.above_net;
  }
};

inline constexpr std::string_view kBlsrHeader =
    "rally,ball_round,time,player,type,hit_x,hit_y,land_x,land_y,player_x,player_y,opponent_x,"
    "opponent_y,roundscore_A,roundscore_B,above_net";

/// Malformed CSV content. `line` is 1-based; `field` names the offending
/// column (empty for whole-row problems).
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Dataset coordinates to world coordinates:
///   p = swap_axes ? (y, x) : (x, y);  world = scale * (p - origin)
/// where `origin` is the court center in the (swapped) dataset axes.
struct FrameMapping {
  Vec2 origin = Vec2::Zero();
  double scale = 1.0;
  bool swap_axes = false;

  Vec2 apply(const Vec2& raw) const;
};

/// Parse and validate a dataset. Lines starting with '#' are skipped. Extra
/// trailing columns named hit_z or reason are accepted and ignored.
/// Throws ParseError for malformed rows and ValidationError (naming the
/// rally) for ball_round gaps or time going backwards.
std::vector<BlsrRow> parse_dataset(std::istream& in, const FrameMapping& frame = {});

struct CalibrationResult {
  MetaParams params;
  /// True when any quantity fell back to the defaults.
  bool warning = false;
  std::vector<std::string> notes;
};

/// Minimum samples behind each estimated quantity.
inline constexpr std::size_t kMinSamples = 30;

/// Linear-interpolation percentile (q in [0, 1]); `v` is sorted in place.
double percentile(std::vector<double>& v, double q);

CalibrationResult estimate_params(const std::vector<BlsrRow>& rows, const MetaParams& defaults);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_CALIBRATION_HPP
