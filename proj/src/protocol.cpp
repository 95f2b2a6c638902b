#include "shuttlesim/protocol.hpp"

#include <cmath>
#include <string>

#include "shuttlesim/params_io.hpp"

namespace shuttlesim {

using nlohmann::json;

namespace {

// Semantic request errors; reported with code "protocol".
class RequestError : public Error {
 public:
  using Error::Error;
};

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec2 vec2_from(const json& j, std::string_view name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw RequestError("'" + std::string(name) + "' must be [x, y]");
  }
  const Vec2 v(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(v.x()) || !std::isfinite(v.y())) {
    throw RequestError("'" + std::string(name) + "' must be finite");
  }
  return v;
}

const json& field(const json& obj, std::string_view name) {
  const auto it = obj.find(name);
  if (it == obj.end()) throw RequestError("missing '" + std::string(name) + "'");
  return *it;
}

json score_json(const Score& s) { return {{"A", s.a}, {"B", s.b}}; }

json error(std::string_view code, std::string_view message) {
  return {{"ok", false}, {"code", code}, {"message", message}};
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

json to_json(const Observation& obs) {
  return {
      {"self", to_string(obs.self)},
      {"own_pos", vec(obs.own_pos)},
      {"opp_pos", vec(obs.opp_pos)},
      {"shuttle_pos", vec(obs.shuttle.pos)},
      {"shuttle_vel", vec(obs.shuttle.vel)},
      {"phase", to_string(obs.phase.kind)},
      {"actor", to_string(obs.phase.actor)},
      {"ball_round", obs.ball_round},
      {"score", score_json(obs.score)},
      {"last_shot", obs.last_shot ? json(to_string(*obs.last_shot)) : json(nullptr)},
  };
}

json to_json(const Decision& decision) {
  if (const auto* s = std::get_if<StrokeDecision>(&decision)) {
    return {{"kind", "stroke"},
            {"land", vec(s->landing_target)},
            {"shot", to_string(s->shot)},
            {"defend", vec(s->defense_pos)}};
  }
  return {{"kind", "move"}, {"target", vec(std::get<MoveDecision>(decision).target_pos)}};
}

Decision decision_from_json(const json& j) {
  try {
    if (!j.is_object()) throw RequestError("action must be an object");
    const json& kind = field(j, "kind");
    if (kind == "stroke") {
      const json& shot = field(j, "shot");
      const auto type = shot.is_string() ? parse_shot_type(shot.get<std::string>()) : std::nullopt;
      if (!type) throw RequestError("unknown shot type");
      return StrokeDecision{vec2_from(field(j, "land"), "land"), *type,
                            vec2_from(field(j, "defend"), "defend")};
    }
    if (kind == "move") return MoveDecision{vec2_from(field(j, "target"), "target")};
    throw RequestError("action kind must be 'stroke' or 'move'");
  } catch (const RequestError& e) {
    throw ContractViolation(e.what());
  }
}

ProtocolSession::ProtocolSession(MetaParams params, std::uint64_t seed, EngineOptions options)
    : params_(std::move(params)), seed_(seed), options_(std::move(options)) {
  params_.validate();
}

std::string ProtocolSession::handle(std::string_view line) {
  if (closed_) return dump(error("protocol", "session is closed"));
  const json req = json::parse(line, nullptr, false);
  if (req.is_discarded()) return dump(error("parse", "malformed JSON"));
  if (!req.is_object()) return dump(error("parse", "request must be a JSON object"));
  try {
    const json& cmd = field(req, "cmd");
    if (cmd == "reset") return dump(reset(req));
    if (cmd == "step") return dump(step(req));
    if (cmd == "params") {
      return dump({{"ok", true}, {"params", params_to_json(params_)}, {"hash", params_hash(params_)}});
    }
    if (cmd == "close") {
      closed_ = true;
      return dump({{"ok", true}});
    }
    throw RequestError("unknown cmd");
  } catch (const std::exception& e) {
    return dump(error("protocol", e.what()));
  }
}

json ProtocolSession::reset(const json& req) {
  std::uint64_t seed = derive_seed(seed_, resets_);
  if (const auto it = req.find("seed"); it != req.end()) {
    if (!it->is_number_unsigned()) throw RequestError("'seed' must be a non-negative integer");
    seed = it->get<std::uint64_t>();
  }
  PlayerId server = PlayerId::A;
  if (const auto it = req.find("server"); it != req.end()) {
    const auto p = it->is_string() ? parse_player(it->get<std::string>()) : std::nullopt;
    if (p != PlayerId::A && p != PlayerId::B) throw RequestError("'server' must be \"A\" or \"B\"");
    server = *p;
  }
  Score score;
  if (const auto it = req.find("score"); it != req.end()) {
    const json& a = field(*it, "A");
    const json& b = field(*it, "B");
    if (!a.is_number_unsigned() || !b.is_number_unsigned() || a.get<std::uint64_t>() > 30 ||
        b.get<std::uint64_t>() > 30) {
      throw RequestError("'score' must be {\"A\": n, \"B\": n}");
    }
    score = {a.get<int>(), b.get<int>()};
  }
  state_ = shuttlesim::reset(server, params_, seed, score);
  ++resets_;
  return snapshot(nullptr);
}

json ProtocolSession::step(const json& req) {
  if (!state_) throw RequestError("no rally; send reset first");
  if (state_->phase.kind == PhaseKind::terminal) throw RequestError("rally is done; send reset");
  const json& actions = field(req, "actions");
  if (!actions.is_object()) throw RequestError("'actions' must be an object");

  Decisions decisions;
  for (const auto& [id, action] : actions.items()) {
    const auto p = parse_player(id);
    if (!p) throw RequestError("unknown agent '" + id + "'");
    decisions.emplace(*p, to_world(decision_from_json(action), *p));
  }
  // Validate against a copy so a rejected step leaves the rally untouched.
  RallyState next = *state_;
  const StepResult result = apply_decisions(next, decisions, params_, options_);
  state_ = std::move(next);
  return snapshot(&result);
}

json ProtocolSession::snapshot(const StepResult* last) const {
  const RallyState& st = *state_;
  const bool done = st.phase.kind == PhaseKind::terminal;
  json pending = json::array();
  if (!done) {
    for (const DecisionPoint& dp : decision_points(st)) {
      pending.push_back({to_string(dp.player), to_string(dp.kind)});
    }
  }
  json info = {{"ball_round", st.ball_round}, {"score", score_json(st.score)}};
  if (done) {
    info["winner"] = to_string(st.phase.actor);
    info["reason"] = to_string(st.phase.reason);
  }
  const std::array<double, 2> rewards = last ? last->rewards : std::array<double, 2>{0.0, 0.0};
  return {
      {"ok", true},
      {"obs", {{"A", to_json(observe(st, PlayerId::A))}, {"B", to_json(observe(st, PlayerId::B))}}},
      {"pending", pending},
      {"rewards", {{"A", rewards[0]}, {"B", rewards[1]}}},
      {"done", done},
      {"info", info},
  };
}

void serve(std::istream& in, std::ostream& out, const MetaParams& params, std::uint64_t seed) {
  ProtocolSession session(params, seed);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << session.handle(line) << '\n' << std::flush;
  }
}

}  // namespace shuttlesim
