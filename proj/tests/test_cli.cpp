#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shuttlesim/cli.hpp"
#include "shuttlesim/params_io.hpp"

using namespace shuttlesim;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("shuttlesim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kFixtures = SHUTTLESIM_FIXTURES;

}  // namespace

TEST_CASE("simulate is deterministic and keeps stdout clean") {
  const fs::path dir = scratch("determinism");
  const auto a = cli({"simulate", "--rallies", "3", "--seed", "1", "--record", (dir / "a.csv").string()});
  const auto b = cli({"simulate", "--rallies", "3", "--seed", "1", "--record", (dir / "b.csv").string()});
  CHECK(a.code == kExitOk);
  CHECK(b.code == kExitOk);
  CHECK(a.out.empty());
  CHECK_FALSE(slurp(dir / "a.csv").empty());
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const auto c = cli({"simulate", "--rallies", "3", "--seed", "2", "--record", (dir / "c.csv").string()});
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
}

TEST_CASE("sharded simulation is deterministic") {
  const fs::path dir = scratch("jobs");
  for (const char* name : {"a.csv", "b.csv"}) {
    CHECK(cli({"simulate", "--rallies", "40", "--seed", "3", "--jobs", "3", "--record",
               (dir / name).string()}).code == kExitOk);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(cli({"simulate", "--rallies", "4", "--jobs", "2", "--match"}).code == kExitValidation);
}

TEST_CASE("replay of a recording passes") {
  const fs::path dir = scratch("replay");
  const std::string rec = (dir / "r.csv").string();
  REQUIRE(cli({"simulate", "--rallies", "20", "--seed", "9", "--record", rec}).code == kExitOk);
  const auto r = cli({"replay", "--record", rec, "--report", (dir / "report.json").string()});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["max_landing_deviation"].get<double>() <= 1e-6);
  CHECK(report["pass"] == true);
}

TEST_CASE("match mode plays full games") {
  const fs::path dir = scratch("match");
  const std::string rec = (dir / "m.csv").string();
  REQUIRE(cli({"simulate", "--rallies", "1", "--seed", "4", "--match", "--record", rec}).code == kExitOk);
  std::istringstream in(slurp(rec));
  const RecordFile f = deserialize(in);
  REQUIRE_FALSE(f.records.empty());
  const StrokeRecord& last = f.records.back();
  REQUIRE(last.reason);
  // Rows carry the score before their rally; add the last rally's point.
  const bool hitter_wins =
      *last.reason == OutcomeReason::landed_in || *last.reason == OutcomeReason::not_reached;
  const PlayerId winner = hitter_wins ? last.row.player : opponent(last.row.player);
  const ScoreUpdate u = update_score({last.row.score_a, last.row.score_b}, {winner, *last.reason, 1});
  CHECK(u.match_done);
  CHECK(std::max(u.score.a, u.score.b) >= 21);
}

TEST_CASE("flag validation") {
  CHECK(cli({"simulate", "--rallies", "0"}).code == kExitValidation);
  CHECK(cli({"simulate"}).code == kExitValidation);
  CHECK(cli({"simulate", "--rallies", "2", "--agent-a", "external"}).code == kExitValidation);
  CHECK(cli({"simulate", "--rallies", "2", "--view", "front", "--frames", "x"}).code == kExitValidation);
  CHECK(cli({"simulate", "--rallies", "2", "--frame-stride", "0"}).code == kExitValidation);
  const auto unknown = cli({"dance"});
  CHECK(unknown.code == kExitValidation);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(cli({"simulate", "--rallies", "2", "--bogus"}).code == kExitValidation);
  CHECK(cli({}).code == kExitValidation);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("I/O failures exit 2") {
  CHECK(cli({"calibrate", "--input", "/nonexistent/data.csv", "--out", "/tmp/p.json"}).code == kExitIo);
  CHECK(cli({"simulate", "--rallies", "1", "--record", "/nonexistent/dir/out.csv"}).code == kExitIo);
  CHECK(cli({"replay", "--record", "/nonexistent/r.csv"}).code == kExitIo);
}

TEST_CASE("missing params file falls back to defaults") {
  const auto r = cli({"simulate", "--rallies", "1", "--params", "/nonexistent/params.json"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("defaults") != std::string::npos);
  const fs::path dir = scratch("badparams");
  std::ofstream(dir / "p.json") << R"({"player_speed": 2})";
  CHECK(cli({"simulate", "--rallies", "1", "--params", (dir / "p.json").string()}).code == kExitValidation);
}

TEST_CASE("calibrate writes loadable params") {
  const fs::path dir = scratch("calibrate");
  const auto r = cli({"calibrate", "--input", kFixtures + "/synthetic.csv", "--out", (dir / "p.json").string()});
  CHECK(r.code == kExitOk);
  CHECK_NOTHROW(load_params(dir / "p.json"));
  CHECK(cli({"calibrate", "--input", kFixtures + "/bad_arity.csv", "--out", (dir / "q.json").string()}).code ==
        kExitValidation);
}

TEST_CASE("recorded matches are valid calibration input") {
  const fs::path dir = scratch("reingest");
  const std::string rec = (dir / "r.csv").string();
  REQUIRE(cli({"simulate", "--rallies", "50", "--seed", "6", "--record", rec}).code == kExitOk);
  CHECK(cli({"calibrate", "--input", rec, "--out", (dir / "p.json").string()}).code == kExitOk);
}

TEST_CASE("frames are written at the stride") {
  const fs::path dir = scratch("frames");
  REQUIRE(cli({"simulate", "--rallies", "1", "--seed", "2", "--frames", dir.string(), "--view", "side",
               "--frame-stride", "8"}).code == kExitOk);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++n;
    CHECK(e.path().extension() == ".ppm");
  }
  CHECK(n > 0);
  std::ifstream in(frame_path(dir, 0), std::ios::binary);
  const Frame f = read_ppm(in);
  CHECK(f.width == kSideWidth);
  CHECK(f.height == kSideHeight);
}

TEST_CASE("serve speaks the protocol on stdout") {
  const auto r = cli({"serve", "--stdio", "--seed", "3"},
                     "{\"cmd\":\"reset\",\"seed\":42,\"server\":\"A\"}\n{\"cmd\":\"close\"}\n");
  CHECK(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::vector<nlohmann::json> got;
  for (std::string l; std::getline(lines, l);) got.push_back(nlohmann::json::parse(l));
  REQUIRE(got.size() == 2);
  CHECK(got[0]["pending"] == nlohmann::json::parse(R"([["A","stroke"],["B","move"]])"));
  CHECK(got[1] == nlohmann::json::parse(R"({"ok":true})"));
  CHECK(cli({"serve"}).code == kExitValidation);
}
