#ifndef SHUTTLESIM_PARAMS_IO_HPP
#define SHUTTLESIM_PARAMS_IO_HPP

// params.json: the MetaParams document. Field names mirror the struct; every
// field is required and unknown keys are rejected at every level.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "shuttlesim/core.hpp"

namespace shuttlesim {

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

nlohmann::json params_to_json(const MetaParams& params);

/// Strict decode; throws ValidationError on unknown/missing keys, wrong
/// types, or violated invariants.
MetaParams params_from_json(const nlohmann::json& doc);

/// Pretty-printed document; doubles use shortest round-trip formatting.
std::string dump_params(const MetaParams& params);

MetaParams load_params(const std::filesystem::path& path);
void save_params(const MetaParams& params, const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the compact JSON encoding.
std::string params_hash(const MetaParams& params);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_PARAMS_IO_HPP
