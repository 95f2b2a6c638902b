#include "shuttlesim/params_io.hpp"

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace shuttlesim {

using nlohmann::json;

namespace {

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }
json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("params" + path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  std::set<std::string> wanted(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!wanted.contains(k)) fail(path, "unknown key '" + k + "'");
  }
  for (const auto& k : wanted) {
    if (!obj.contains(k)) fail(path, "missing key '" + k + "'");
  }
}

double number(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

std::pair<double, double> pair(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path + "." + key, "expected a two-number array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Interval interval(const json& obj, const std::string& path, const char* key) {
  auto [lo, hi] = pair(obj, path, key);
  return {lo, hi};
}

Vec2 vec2(const json& obj, const std::string& path, const char* key) {
  auto [x, y] = pair(obj, path, key);
  return {x, y};
}

// Both per-shot maps must name exactly the ten shot types.
void expect_shot_keys(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!parse_shot_type(k)) fail(path, "unknown shot type '" + k + "'");
  }
  for (ShotType s : kAllShotTypes) {
    if (!obj.contains(std::string(to_string(s)))) {
      fail(path, "missing shot type '" + std::string(to_string(s)) + "'");
    }
  }
}

}  // namespace

json params_to_json(const MetaParams& p) {
  json profiles = json::object();
  json landing = json::object();
  for (ShotType s : kAllShotTypes) {
    const ShotProfile& sp = p.profile(s);
    profiles[std::string(to_string(s))] = {
        {"hit_height_mean", sp.hit_height_mean},
        {"hit_height_std", sp.hit_height_std},
        {"hit_height_clamp", interval_json(sp.hit_height_clamp)},
        {"launch_speed", interval_json(sp.launch_speed)},
        {"arc_class", std::string(to_string(sp.arc_class))},
        {"receive_height_window", interval_json(sp.receive_height_window)},
    };
    const LandingDist& ld = p.landing(s);
    landing[std::string(to_string(s))] = {{"mean", vec2_json(ld.mean)},
                                          {"std", vec2_json(ld.std)}};
  }
  return {
      {"player_speed", p.player_speed},
      {"defense_radius", p.defense_radius},
      {"reach_radius", p.reach_radius},
      {"profiles", std::move(profiles)},
      {"landing_dist", std::move(landing)},
      {"terminal_velocity", p.terminal_velocity},
      {"gravity", p.gravity},
      {"dt", p.dt},
      {"execution_noise_std", p.execution_noise_std},
  };
}

MetaParams params_from_json(const json& doc) {
  expect_keys(doc, "", {"player_speed", "defense_radius", "reach_radius", "profiles",
                        "landing_dist", "terminal_velocity", "gravity", "dt",
                        "execution_noise_std"});
  MetaParams p;
  p.player_speed = number(doc, "", "player_speed");
  p.defense_radius = number(doc, "", "defense_radius");
  p.reach_radius = number(doc, "", "reach_radius");
  p.terminal_velocity = number(doc, "", "terminal_velocity");
  p.gravity = number(doc, "", "gravity");
  p.dt = number(doc, "", "dt");
  p.execution_noise_std = number(doc, "", "execution_noise_std");

  const json& profiles = doc.at("profiles");
  expect_shot_keys(profiles, ".profiles");
  const json& landing = doc.at("landing_dist");
  expect_shot_keys(landing, ".landing_dist");

  for (ShotType s : kAllShotTypes) {
    const std::string name(to_string(s));
    const std::string ppath = ".profiles." + name;
    const json& pj = profiles.at(name);
    expect_keys(pj, ppath, {"hit_height_mean", "hit_height_std", "hit_height_clamp",
                            "launch_speed", "arc_class", "receive_height_window"});
    ShotProfile& sp = p.profile(s);
    sp.hit_height_mean = number(pj, ppath, "hit_height_mean");
    sp.hit_height_std = number(pj, ppath, "hit_height_std");
    sp.hit_height_clamp = interval(pj, ppath, "hit_height_clamp");
    sp.launch_speed = interval(pj, ppath, "launch_speed");
    sp.receive_height_window = interval(pj, ppath, "receive_height_window");
    const json& arc = pj.at("arc_class");
    auto parsed = arc.is_string() ? parse_arc_class(arc.get<std::string>()) : std::nullopt;
    if (!parsed) fail(ppath + ".arc_class", "expected \"low\" or \"high\"");
    sp.arc_class = *parsed;

    const std::string lpath = ".landing_dist." + name;
    const json& lj = landing.at(name);
    expect_keys(lj, lpath, {"mean", "std"});
    p.landing(s) = LandingDist{vec2(lj, lpath, "mean"), vec2(lj, lpath, "std")};
  }
  p.validate();
  return p;
}

std::string dump_params(const MetaParams& params) { return params_to_json(params).dump(2) + "\n"; }

MetaParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open params file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("params file " + path.string() + ": " + e.what());
  }
  return params_from_json(doc);
}

void save_params(const MetaParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write params file " + path.string());
  out << dump_params(params);
  if (!out) throw IoError("write failed for " + path.string());
}

std::string params_hash(const MetaParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : params_to_json(params).dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace shuttlesim
