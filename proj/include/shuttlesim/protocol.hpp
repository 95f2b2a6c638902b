#ifndef SHUTTLESIM_PROTOCOL_HPP
#define SHUTTLESIM_PROTOCOL_HPP

// JSON-lines request/response protocol over stdio.
//
//   {"cmd":"reset","seed":42,"server":"A"}
//   {"cmd":"step","actions":{"A":{"kind":"stroke","land":[x,y],"shot":"clear","defend":[x,y]},
//                            "B":{"kind":"move","target":[x,y]}}}
//   {"cmd":"params"}
//   {"cmd":"close"}
//
// Observations and actions are in each agent's canonical frame (self on
// x < 0), the same frame Policy::act sees. Every request line gets exactly
// one response line. Errors are {"ok":false,"code":"parse"|"protocol",
// "message":...} and leave the session usable.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "shuttlesim/agents.hpp"

namespace shuttlesim {

nlohmann::json to_json(const Observation& obs);
nlohmann::json to_json(const Decision& decision);
/// Inverse of to_json(Decision); throws ContractViolation on bad shape.
Decision decision_from_json(const nlohmann::json& j);

class ProtocolSession {
 public:
  ProtocolSession(MetaParams params, std::uint64_t seed, EngineOptions options = {});

  /// Handle one request line and return the response line (no newline).
  std::string handle(std::string_view line);

  bool closed() const { return closed_; }
  const std::optional<RallyState>& state() const { return state_; }

 private:
  nlohmann::json reset(const nlohmann::json& req);
  nlohmann::json step(const nlohmann::json& req);
  nlohmann::json snapshot(const StepResult* last) const;

  MetaParams params_;
  std::uint64_t seed_;
  EngineOptions options_;
  std::optional<RallyState> state_;
  std::uint64_t resets_ = 0;
  bool closed_ = false;
};

/// Run a session until "close" or end of input.
void serve(std::istream& in, std::ostream& out, const MetaParams& params, std::uint64_t seed);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_PROTOCOL_HPP
