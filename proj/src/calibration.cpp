#include "shuttlesim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "csv.hpp"

namespace shuttlesim {

namespace {

constexpr std::size_t kBlsrColumns = 16;
constexpr double kPercentile = 0.9;

std::string where(std::size_t line, const std::string& field, const std::string& what) {
  std::string msg = "line " + std::to_string(line);
  if (!field.empty()) msg += ", field '" + field + "'";
  return msg + ": " + what;
}

// Column names of the header line, or a ParseError.
std::vector<std::string> check_header(std::string_view line, std::size_t lineno) {
  const std::vector<std::string_view> got = csv::split(line);
  const std::vector<std::string_view> want = csv::split(kBlsrHeader);
  if (got.size() < want.size()) {
    throw ParseError(lineno, "", "header has " + std::to_string(got.size()) +
                                     " columns, expected " + std::to_string(want.size()));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (got[i] != want[i]) {
      throw ParseError(lineno, std::string(got[i]),
                       "header column " + std::to_string(i + 1) + " must be '" +
                           std::string(want[i]) + "'");
    }
  }
  std::set<std::string_view> extras;
  for (std::size_t i = want.size(); i < got.size(); ++i) {
    if ((got[i] != "hit_z" && got[i] != "reason") || !extras.insert(got[i]).second) {
      throw ParseError(lineno, std::string(got[i]), "unexpected header column");
    }
  }
  return {got.begin(), got.end()};
}

double sample_mean(std::vector<double>& v) {
  std::sort(v.begin(), v.end());  // fixed summation order
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::vector<double>& v, double mean) {
  std::sort(v.begin(), v.end());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string field, const std::string& what)
    : ValidationError(where(line, field, what)), line_(line), field_(std::move(field)) {}

Vec2 FrameMapping::apply(const Vec2& raw) const {
  const Vec2 p = swap_axes ? Vec2(raw.y(), raw.x()) : raw;
  return scale * (p - origin);
}

std::vector<BlsrRow> parse_dataset(std::istream& in, const FrameMapping& frame) {
  if (!(frame.scale > 0.0) || !std::isfinite(frame.scale)) {
    throw ValidationError("frame mapping scale must be > 0");
  }
  std::vector<BlsrRow> rows;
  std::vector<std::string> header;
  std::string raw;
  std::size_t lineno = 0;

  struct RallyCursor {
    int ball_round;
    double time;
  };
  std::map<std::string, RallyCursor> rallies;
  std::string current;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = csv::strip_cr(raw);
    if (line.starts_with('#')) continue;
    if (header.empty()) {
      header = check_header(line, lineno);
      continue;
    }
    if (line.empty()) continue;

    const std::vector<std::string_view> f = csv::split(line);
    if (f.size() != header.size()) {
      throw ParseError(lineno, "", "expected " + std::to_string(header.size()) +
                                       " fields, got " + std::to_string(f.size()));
    }
    auto num = [&](std::size_t i) { return csv::to_double(f[i], lineno, header[i]); };
    auto count = [&](std::size_t i) { return csv::to_int(f[i], lineno, header[i]); };

    BlsrRow r;
    r.rally = std::string(f[0]);
    if (r.rally.empty()) throw ParseError(lineno, "rally", "empty rally id");
    r.ball_round = count(1);
    if (r.ball_round < 1) throw ParseError(lineno, "ball_round", "must be >= 1");
    r.time = num(2);
    const auto player = parse_player(f[3]);
    if (!player) throw ParseError(lineno, "player", "unknown player '" + std::string(f[3]) + "'");
    r.player = *player;
    const auto shot = parse_shot_type(f[4]);
    if (!shot) throw ParseError(lineno, "type", "unknown shot type '" + std::string(f[4]) + "'");
    r.shot = *shot;
    r.hit = frame.apply({num(5), num(6)});
    r.landing = frame.apply({num(7), num(8)});
    r.hitter_pos = frame.apply({num(9), num(10)});
    r.opponent_pos = frame.apply({num(11), num(12)});
    r.score_a = count(13);
    r.score_b = count(14);
    if (r.score_a < 0 || r.score_b < 0) {
      throw ParseError(lineno, r.score_a < 0 ? "roundscore_A" : "roundscore_B", "must be >= 0");
    }
    if (f[15] != "0" && f[15] != "1") {
      throw ParseError(lineno, "above_net", "must be 0 or 1");
    }
    r.above_net = f[15] == "1";
    for (std::size_t i = kBlsrColumns; i < f.size(); ++i) {
      if (header[i] == "hit_z") num(i);  // validated, otherwise ignored
    }

    const std::string at = " (line " + std::to_string(lineno) + ")";
    auto it = rallies.find(r.rally);
    if (it == rallies.end()) {
      if (r.ball_round != 1) {
        throw ValidationError("rally '" + r.rally + "' starts at ball_round " +
                              std::to_string(r.ball_round) + at);
      }
      rallies.emplace(r.rally, RallyCursor{r.ball_round, r.time});
    } else {
      if (r.rally != current) {
        throw ValidationError("rally '" + r.rally + "' rows are not contiguous" + at);
      }
      if (r.ball_round != it->second.ball_round + 1) {
        throw ValidationError("rally '" + r.rally + "' ball_round jumps from " +
                              std::to_string(it->second.ball_round) + " to " +
                              std::to_string(r.ball_round) + at);
      }
      if (r.time < it->second.time) {
        throw ValidationError("rally '" + r.rally + "' time decreases" + at);
      }
      it->second = RallyCursor{r.ball_round, r.time};
    }
    current = r.rally;
    rows.push_back(std::move(r));
  }
  if (header.empty()) throw ParseError(lineno + 1, "", "missing header");
  return rows;
}

double percentile(std::vector<double>& v, double q) {
  if (v.empty()) throw ContractViolation("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

CalibrationResult estimate_params(const std::vector<BlsrRow>& rows, const MetaParams& defaults) {
  CalibrationResult out{defaults, false, {}};
  if (rows.empty()) {
    out.warning = true;
    out.notes.emplace_back("no rows; all parameters left at defaults");
    return out;
  }

  std::vector<double> speeds;
  std::vector<double> reaches;
  std::array<std::vector<double>, kShotTypeCount> land_x;
  std::array<std::vector<double>, kShotTypeCount> land_y;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BlsrRow& r = rows[i];
    const Vec2 land = canonicalize(r.landing, opponent(r.player));
    land_x[index_of(r.shot)].push_back(land.x());
    land_y[index_of(r.shot)].push_back(land.y());

    if (i + 1 < rows.size() && rows[i + 1].rally == r.rally) {
      reaches.push_back((r.opponent_pos - rows[i + 1].hit).norm());
    }
    // The same player's next stroke in this rally.
    for (std::size_t j = i + 1; j < rows.size() && rows[j].rally == r.rally; ++j) {
      if (rows[j].player != r.player) continue;
      const double gap = rows[j].time - r.time;
      if (gap > 0.0) speeds.push_back((rows[j].hitter_pos - r.hitter_pos).norm() / gap);
      break;
    }
  }

  auto fallback = [&](const std::string& what, std::size_t n) {
    out.warning = true;
    out.notes.push_back(what + ": " + std::to_string(n) + " samples (< " +
                        std::to_string(kMinSamples) + "), kept default");
  };

  const double speed = speeds.size() >= kMinSamples ? percentile(speeds, kPercentile) : 0.0;
  if (speed > 0.0) {
    out.params.player_speed = speed;
  } else {
    fallback("player_speed", speeds.size());
  }
  if (reaches.size() >= kMinSamples) {
    // The defense disc can never be smaller than the reach disc.
    out.params.defense_radius = std::max(percentile(reaches, kPercentile), defaults.reach_radius);
  } else {
    fallback("defense_radius", reaches.size());
  }
  for (ShotType s : kAllShotTypes) {
    auto& xs = land_x[index_of(s)];
    auto& ys = land_y[index_of(s)];
    if (xs.size() < kMinSamples) {
      fallback("landing_dist." + std::string(to_string(s)), xs.size());
      continue;
    }
    LandingDist& d = out.params.landing(s);
    d.mean = {sample_mean(xs), sample_mean(ys)};
    d.std = {sample_std(xs, d.mean.x()), sample_std(ys, d.mean.y())};
  }
  out.params.validate();
  return out;
}

}  // namespace shuttlesim
