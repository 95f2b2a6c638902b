#include "shuttlesim/recorder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "csv.hpp"
#include "shuttlesim/params_io.hpp"

namespace shuttlesim {

namespace {

constexpr std::string_view kHashPrefix = "# params_hash=";
constexpr std::size_t kRecordColumns = 18;

StrokeRecord make_record(const StrokeEvent& e, const std::string& rally, const Score& score,
                         const MetaParams& params, const CourtSpec& court) {
  StrokeRecord r;
  r.row.rally = rally;
  r.row.ball_round = e.ball_round;
  r.row.time = quantize(static_cast<double>(e.tick) * params.dt);
  r.row.player = e.hitter;
  r.row.shot = e.shot;
  r.row.hit = quantize(Vec2(e.hit.head<2>()));
  r.row.landing = quantize(e.aim);
  r.row.hitter_pos = quantize(e.hitter_pos);
  r.row.opponent_pos = quantize(e.opponent_pos);
  r.row.score_a = score.a;
  r.row.score_b = score.b;
  r.row.above_net = e.hit.z() > court.net_height;
  r.hit_z = quantize(e.hit.z());
  return r;
}

}  // namespace

std::string format_fixed(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  if (res.ec != std::errc()) throw ValidationError("cannot format value");
  return {buf, res.ptr};
}

std::string record_header() { return std::string(kBlsrHeader) + std::string(kRecordExtraColumns); }

std::string format_record(const StrokeRecord& rec) {
  const BlsrRow& r = rec.row;
  std::string s;
  s.reserve(160);
  auto add = [&s](std::string_view field) {
    if (!s.empty()) s += ',';
    s += field;
  };
  add(r.rally);
  add(std::to_string(r.ball_round));
  add(format_fixed(r.time));
  add(to_string(r.player));
  add(to_string(r.shot));
  for (const Vec2* v : {&r.hit, &r.landing, &r.hitter_pos, &r.opponent_pos}) {
    add(format_fixed(v->x()));
    add(format_fixed(v->y()));
  }
  add(std::to_string(r.score_a));
  add(std::to_string(r.score_b));
  add(r.above_net ? "1" : "0");
  add(format_fixed(rec.hit_z));
  s += ',';
  if (rec.reason) s += to_string(*rec.reason);
  return s;
}

CsvSink::CsvSink(std::ostream& out, const std::string& params_hash) : out_(out) {
  out_ << kHashPrefix << params_hash << '\n' << record_header() << '\n';
  if (!out_) throw IoError("record sink: cannot write header");
}

void CsvSink::write(const StrokeRecord& record) {
  out_ << format_record(record) << '\n';
  if (!out_) throw IoError("record sink: write failed at stroke " + std::to_string(written_));
  ++written_;
}

MatchRecorder::MatchRecorder(RecordSink& sink, const MetaParams& params)
    : sink_(sink), params_(params) {}

void MatchRecorder::begin_rally(std::string rally_id, const RallyState& state) {
  if (pending_) throw ContractViolation("previous rally has not ended");
  rally_ = std::move(rally_id);
  score_ = state.score;
}

void MatchRecorder::observe(const StepResult& step) {
  for (const RallyEvent& ev : step.events) {
    if (const auto* s = std::get_if<StrokeEvent>(&ev)) {
      if (pending_) emit();
      pending_ = make_record(*s, rally_, score_, params_, court_);
    } else if (const auto* t = std::get_if<TerminalEvent>(&ev)) {
      if (!pending_) throw ContractViolation("rally ended without a stroke");
      pending_->reason = t->outcome.reason;
      emit();
    }
  }
}

void MatchRecorder::emit() {
  sink_.write(*pending_);
  pending_.reset();
  ++strokes_;
}

std::string serialize(const RecordFile& file) {
  std::string out;
  if (!file.params_hash.empty()) out += std::string(kHashPrefix) + file.params_hash + "\n";
  out += record_header() + "\n";
  for (const StrokeRecord& r : file.records) out += format_record(r) + "\n";
  return out;
}

RecordFile deserialize(std::istream& in) {
  RecordFile file;
  std::string raw;
  std::size_t lineno = 0;
  bool have_header = false;
  const std::string header = record_header();
  const std::vector<std::string_view> names = csv::split(header);

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = csv::strip_cr(raw);
    if (line.starts_with('#')) {
      if (!have_header && line.starts_with(kHashPrefix)) {
        file.params_hash = std::string(line.substr(kHashPrefix.size()));
      }
      continue;
    }
    if (!have_header) {
      if (line != header) throw ParseError(lineno, "", "header mismatch");
      have_header = true;
      continue;
    }
    const std::vector<std::string_view> f = csv::split(line);
    if (f.size() != kRecordColumns) {
      throw ParseError(lineno, "", "expected " + std::to_string(kRecordColumns) +
                                       " fields, got " + std::to_string(f.size()));
    }
    auto num = [&](std::size_t i) { return csv::to_double(f[i], lineno, names[i]); };
    auto count = [&](std::size_t i) { return csv::to_int(f[i], lineno, names[i]); };

    StrokeRecord r;
    r.row.rally = std::string(f[0]);
    r.row.ball_round = count(1);
    r.row.time = num(2);
    const auto player = parse_player(f[3]);
    if (!player) throw ParseError(lineno, "player", "unknown player");
    r.row.player = *player;
    const auto shot = parse_shot_type(f[4]);
    if (!shot) throw ParseError(lineno, "type", "unknown shot type");
    r.row.shot = *shot;
    r.row.hit = {num(5), num(6)};
    r.row.landing = {num(7), num(8)};
    r.row.hitter_pos = {num(9), num(10)};
    r.row.opponent_pos = {num(11), num(12)};
    r.row.score_a = count(13);
    r.row.score_b = count(14);
    if (f[15] != "0" && f[15] != "1") throw ParseError(lineno, "above_net", "must be 0 or 1");
    r.row.above_net = f[15] == "1";
    r.hit_z = num(16);
    if (!f[17].empty()) {
      r.reason = parse_outcome_reason(f[17]);
      if (!r.reason) throw ParseError(lineno, "reason", "unknown outcome reason");
    }
    file.records.push_back(std::move(r));
  }
  if (!have_header) throw ParseError(lineno + 1, "", "missing header");
  return file;
}

ReplayReport replay(const RecordFile& file, const MetaParams& params, const CourtSpec& court) {
  ReplayReport rep;
  rep.exact = !file.params_hash.empty() && file.params_hash == params_hash(params);
  rep.tolerance = rep.exact ? kReplayExactTolerance : kAimTolerance;
  rep.strokes = file.records.size();

  const auto& recs = file.records;
  auto worst = [&rep](double dev, std::size_t i, double& slot) {
    if (dev > slot) {
      slot = dev;
      if (dev >= std::max(rep.max_landing_deviation, rep.max_path_deviation)) rep.worst_stroke = i;
    }
  };

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const StrokeRecord& rec = recs[i];
    if (rec.reason) ++rep.rallies;
    const Vec3 hit(rec.row.hit.x(), rec.row.hit.y(), rec.hit_z);
    const std::optional<Vec3> launch = solve_recorded(hit, rec.row.landing, rec.row.shot, params);
    if (!launch) {
      // The engine ends the rally on an infeasible aim.
      if (rec.reason != OutcomeReason::timeout_fault) ++rep.mismatches;
      continue;
    }
    const ShuttleState start{hit, *launch};
    const auto land = landing_point(start, params);
    if (!land) {
      ++rep.mismatches;
      continue;
    }
    worst((land->head<2>() - rec.row.landing).norm(), i, rep.max_landing_deviation);

    const bool has_next = i + 1 < recs.size() && !rec.reason && recs[i + 1].row.rally == rec.row.rally;
    if (has_next) {
      const StrokeRecord& next = recs[i + 1];
      const auto n = std::llround((next.row.time - rec.row.time) / params.dt);
      ShuttleState s = start;
      for (long long k = 0; k < n; ++k) s = step(s, params);
      worst((s.pos.head<2>() - next.row.hit).norm(), i, rep.max_path_deviation);
    } else if (rec.reason) {
      FlightOptions fo;
      fo.court = court;
      fo.record_trajectory = false;
      const FlightEvent ev = simulate_until(start, params, {}, fo).event;
      const PlayerId receiver = opponent(rec.row.player);
      bool consistent = true;
      switch (*rec.reason) {
        case OutcomeReason::net_fault:
          consistent = ev.kind == FlightEventKind::net_fault;
          break;
        case OutcomeReason::out:
          consistent = ev.kind == FlightEventKind::landed && !in_bounds(ev.state.pos, court, receiver);
          break;
        case OutcomeReason::landed_in:
        case OutcomeReason::not_reached:
          consistent = ev.kind == FlightEventKind::landed && in_bounds(ev.state.pos, court, receiver);
          break;
        case OutcomeReason::timeout_fault:
          break;  // stroke cap or flight timeout; nothing to compare
      }
      if (!consistent) ++rep.mismatches;
    } else {
      ++rep.mismatches;  // rally rows end without a reason
    }
  }

  if (rep.exact) {
    rep.pass = rep.max_landing_deviation <= rep.tolerance &&
               rep.max_path_deviation <= rep.tolerance && rep.mismatches == 0;
  } else {
    rep.pass = rep.max_landing_deviation <= rep.tolerance;
  }
  return rep;
}

}  // namespace shuttlesim
