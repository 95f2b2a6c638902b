#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "shuttlesim/renderer.hpp"

using namespace shuttlesim;

namespace {

// Exact half-up rounding of n / 100 for integer n.
int round_hundredths(long n) {
  long q = (n + 50) / 100;
  if ((n + 50) % 100 != 0 && n + 50 < 0) --q;
  return static_cast<int>(q);
}

long clamp_hundredths(long v) { return std::clamp(v, 400L, 1600L); }

RallyState quiet_state(const Vec3& shuttle) {
  RallyState st;
  st.players[0].pos = {-5.5, -2.0};
  st.players[1].pos = {5.5, 2.0};
  st.shuttle.pos = shuttle;
  return st;
}

const Rgb kBackground{24, 96, 56};

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project_top({0, 0, 0}) == Projection{385, 203, 4});
  CHECK(project_top({0, 0, 2.0}).radius == 10);
  CHECK(project_top({0, 0, 10}).radius == 16);
  CHECK(project_side({0, 0, 0}).py == 210);
  CHECK(project_side({0, 3.05, 1}).radius == 4);
  CHECK(project_side({0, -3.05, 1}).radius == 16);
  CHECK(project_top({-6.7, 3.05, 0}).px == 50);
  CHECK(project_top({-6.7, 3.05, 0}).py == 50);
  CHECK(project_top({6.7, -3.05, 0}).px == 720);
  CHECK(project_top({6.7, -3.05, 0}).py == 355);
}

TEST_CASE("projection arithmetic on a centimeter grid") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const long x = static_cast<long>(rng.index(1401)) - 700;
    const long y = static_cast<long>(rng.index(701)) - 350;
    const long z = static_cast<long>(rng.index(501));
    const Vec3 pos(x / 100.0, y / 100.0, z / 100.0);
    const Projection top = project_top(pos);
    const Projection side = project_side(pos);
    const int px = round_hundredths((x + 670) * 50) + 50;
    CHECK(top.px == px);
    CHECK(top.py == round_hundredths((305 - y) * 50) + 50);
    CHECK(top.radius == round_hundredths(clamp_hundredths(400 + 3 * z)));
    CHECK(side.px == px);
    CHECK(side.py == round_hundredths((400 - z) * 50) + 10);
    CHECK(side.radius == round_hundredths(clamp_hundredths(400 + 2 * (305 - y))));
  }
}

TEST_CASE("depth cues are monotone") {
  int prev = 0;
  for (int k = 0; k <= 1000; ++k) {
    const int r = project_top({0, 0, k * 0.01}).radius;
    CHECK(r >= prev);
    prev = r;
  }
  for (int k = 1; k <= 12; ++k) {
    CHECK(project_top({0, 0, k / 3.0}).radius > project_top({0, 0, (k - 1) / 3.0}).radius);
  }
  prev = 100;
  for (int k = -500; k <= 500; ++k) {
    const int r = project_side({0, k * 0.01, 1}).radius;
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("floor projection separates points 4 cm apart") {
  Rng rng(13);
  for (int i = 0; i < 20000; ++i) {
    const Vec3 a(rng.uniform(-6.7, 6.7), rng.uniform(-3.05, 3.05), 0);
    const double angle = rng.uniform(0, 6.283185307179586);
    const double d = rng.uniform(0.04, 0.2);
    const Vec3 b = a + Vec3(d * std::cos(angle), d * std::sin(angle), 0);
    const Projection pa = project_top(a);
    const Projection pb = project_top(b);
    CHECK((pa.px != pb.px || pa.py != pb.py));
  }
  std::set<int> xs;
  for (int i = 0; i <= 335; ++i) xs.insert(project_top({-6.7 + 0.04 * i, 0, 0}).px);
  CHECK(xs.size() == 336);
}

TEST_CASE("frame sizes and purity") {
  const RallyState st = quiet_state({-1.0, 1.0, 0.0});
  const Frame top = render_frame(st, View::top);
  CHECK(top.width == 770);
  CHECK(top.height == 405);
  CHECK(top.rgb.size() == 770u * 405u * 3u);
  CHECK(render_frame(st, View::top) == top);
  const Frame side = render_frame(st, View::side);
  CHECK(side.width == 770);
  CHECK(side.height == 260);
  CHECK(render_frame(st, View::side) == side);
}

TEST_CASE("shuttle on the floor draws a radius-4 disc in the top view") {
  const RallyState st = quiet_state({-1.0, 1.0, 0.0});
  const Frame f = render_frame(st, View::top);
  const Projection p = project_top(st.shuttle.pos);
  const Rgb shuttle = f.at(p.px, p.py);
  CHECK(shuttle != kBackground);
  CHECK(f.at(p.px + 4, p.py) == shuttle);
  CHECK(f.at(p.px, p.py - 4) == shuttle);
  CHECK(f.at(p.px + 5, p.py) != shuttle);
  CHECK(f.at(p.px, p.py + 5) != shuttle);
  CHECK(f.at(p.px + 3, p.py + 3) != shuttle);
}

TEST_CASE("side view shows the net at x = 0") {
  const Frame f = render_frame(quiet_state({-4.0, 0.0, 3.0}), View::side);
  const Projection top_of_net = project_side({0, 0, 1.55});
  const Projection floor = project_side({0, 0, 0});
  REQUIRE(top_of_net.px == 385);
  const Rgb net = f.at(385, top_of_net.py);
  CHECK(net != kBackground);
  for (int y = top_of_net.py; y < floor.py; ++y) CHECK(f.at(385, y) == net);
  CHECK(f.at(385, top_of_net.py - 2) == kBackground);
  CHECK(f.at(300, top_of_net.py) == kBackground);
}

TEST_CASE("PPM layout") {
  const Frame f = render_frame(quiet_state({1.0, 0.5, 1.0}), View::side);
  std::ostringstream out;
  write_ppm(f, out);
  const std::string bytes = out.str();
  const std::string header = "P6\n770 260\n255\n";
  REQUIRE(bytes.size() == header.size() + 770u * 260u * 3u);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(static_cast<std::uint8_t>(bytes[header.size()]) == f.rgb[0]);
  std::istringstream in(bytes);
  CHECK(read_ppm(in) == f);

  const auto rejects = [](const std::string& text) {
    std::istringstream s(text);
    CHECK_THROWS_AS(read_ppm(s), ValidationError);
  };
  rejects("P3\n1 1\n255\nabc");
  rejects("P6\n2 1\n255\nabc");
  rejects("P6\n1 1\n255\nabcd");
  rejects("P6\n1  1\n255\nabc");
  rejects("P6\n1 1\n65535\nabc");
}

TEST_CASE("frame file names") {
  CHECK(frame_path("out", 7).filename() == "frame_000007.ppm");
  CHECK(frame_path("out", 1234567).filename() == "frame_1234567.ppm");
  CHECK(parse_view("top") == View::top);
  CHECK_FALSE(parse_view("front").has_value());
}
