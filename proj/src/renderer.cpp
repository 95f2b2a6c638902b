#include "shuttlesim/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "shuttlesim/params_io.hpp"

namespace shuttlesim {

namespace {

constexpr Rgb kBackground{24, 96, 56};
constexpr Rgb kLine{235, 235, 235};
constexpr Rgb kNet{160, 160, 160};
constexpr Rgb kPlayerA{60, 110, 230};
constexpr Rgb kPlayerB{220, 60, 50};
constexpr Rgb kShuttle{250, 220, 40};

constexpr double kHalfLength = 6.7;
constexpr double kHalfWidth = 3.05;
constexpr double kSideBand = 4.0;  // visible height in the side view
constexpr int kMargin = 50;
constexpr int kSideTop = 10;
constexpr double kShortService = 1.98;  // short service line distance from the net

int px_of(double x) { return round_half_up((x + kHalfLength) * kPixelsPerMeter) + kMargin; }
int top_py(double y) { return round_half_up((kHalfWidth - y) * kPixelsPerMeter) + kMargin; }
int side_py(double z) { return round_half_up((kSideBand - z) * kPixelsPerMeter) + kSideTop; }

int marker(double r) { return round_half_up(std::clamp(r, 4.0, 16.0)); }

void hline(Frame& f, int x0, int x1, int y, Rgb c) {
  for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) f.set(x, y, c);
}

void vline(Frame& f, int x, int y0, int y1, Rgb c) {
  for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y) f.set(x, y, c);
}

void disc(Frame& f, int cx, int cy, int r, Rgb c) {
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy <= r * r) f.set(cx + dx, cy + dy, c);
    }
  }
}

void draw_top_court(Frame& f, const CourtSpec& court) {
  const int x0 = px_of(-court.half_length);
  const int x1 = px_of(court.half_length);
  for (double y : {-court.half_width_doubles, court.half_width_doubles,
                   -court.half_width_singles, court.half_width_singles}) {
    hline(f, x0, x1, top_py(y), kLine);
  }
  const int y0 = top_py(court.half_width_doubles);
  const int y1 = top_py(-court.half_width_doubles);
  for (double x : {-court.half_length, court.half_length, -kShortService, kShortService}) {
    vline(f, px_of(x), y0, y1, kLine);
  }
  // Center lines from the short service lines to the back.
  hline(f, x0, px_of(-kShortService), top_py(0.0), kLine);
  hline(f, px_of(kShortService), x1, top_py(0.0), kLine);
  for (int dx = -1; dx <= 1; ++dx) vline(f, px_of(0.0) + dx, y0, y1, kNet);
}

void draw_side_court(Frame& f, const CourtSpec& court) {
  const int floor = side_py(0.0);
  hline(f, px_of(-court.half_length), px_of(court.half_length), floor, kLine);
  for (double x : {-court.half_length, court.half_length}) {
    vline(f, px_of(x), floor - 3, floor, kLine);
  }
  for (int dx = -1; dx <= 1; ++dx) vline(f, px_of(0.0) + dx, side_py(court.net_height), floor, kNet);
}

}  // namespace

std::string_view to_string(View v) { return v == View::top ? "top" : "side"; }

std::optional<View> parse_view(std::string_view s) {
  if (s == "top") return View::top;
  if (s == "side") return View::side;
  return std::nullopt;
}

Frame::Frame(int w, int h, Rgb fill) : width(w), height(h) {
  rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = fill[0];
    rgb[i + 1] = fill[1];
    rgb[i + 2] = fill[2];
  }
}

Rgb Frame::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(x)) * 3;
  return {rgb.at(i), rgb.at(i + 1), rgb.at(i + 2)};
}

void Frame::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(x)) * 3;
  rgb[i] = c[0];
  rgb[i + 1] = c[1];
  rgb[i + 2] = c[2];
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5 + 1e-9)); }

Projection project_top(const Vec3& pos) {
  return {px_of(pos.x()), top_py(pos.y()), marker(4.0 + 3.0 * pos.z())};
}

Projection project_side(const Vec3& pos) {
  return {px_of(pos.x()), side_py(pos.z()), marker(4.0 + 2.0 * (kHalfWidth - pos.y()))};
}

Frame render_frame(const RallyState& state, View view, const CourtSpec& court) {
  const bool top = view == View::top;
  Frame f(top ? kTopWidth : kSideWidth, top ? kTopHeight : kSideHeight, kBackground);
  if (top) {
    draw_top_court(f, court);
  } else {
    draw_side_court(f, court);
  }

  for (PlayerId p : {PlayerId::A, PlayerId::B}) {
    const Vec2 at = state.player(p).pos;
    const Rgb color = p == PlayerId::A ? kPlayerA : kPlayerB;
    if (top) {
      const Projection pr = project_top(Vec3(at.x(), at.y(), 0.0));
      disc(f, pr.px, pr.py, kPlayerRadius, color);
    } else {
      // Resting on the floor line.
      disc(f, px_of(at.x()), side_py(0.0) - kPlayerRadius, kPlayerRadius, color);
    }
  }

  const Projection s = top ? project_top(state.shuttle.pos) : project_side(state.shuttle.pos);
  disc(f, s.px, s.py, s.radius, kShuttle);
  return f;
}

void write_ppm(const Frame& frame, std::ostream& out) {
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.rgb.data()),
            static_cast<std::streamsize>(frame.rgb.size()));
  if (!out) throw IoError("failed to write PPM data");
}

void write_ppm(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_ppm(frame, out);
}

Frame read_ppm(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != "P6") throw ValidationError("PPM: expected 'P6' line");
  std::string dims;
  std::string maxval;
  if (!std::getline(in, dims) || !std::getline(in, maxval) || maxval != "255") {
    throw ValidationError("PPM: expected '<w> <h>' and '255' lines");
  }
  int w = 0;
  int h = 0;
  char tail = 0;
  if (std::sscanf(dims.c_str(), "%d %d%c", &w, &h, &tail) != 2 || w <= 0 || h <= 0 ||
      dims != std::to_string(w) + " " + std::to_string(h)) {
    throw ValidationError("PPM: malformed dimensions '" + dims + "'");
  }
  Frame f;
  f.width = w;
  f.height = h;
  f.rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  in.read(reinterpret_cast<char*>(f.rgb.data()), static_cast<std::streamsize>(f.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.rgb.size())) {
    throw ValidationError("PPM: truncated pixel data");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ValidationError("PPM: trailing bytes");
  return f;
}

std::filesystem::path frame_path(const std::filesystem::path& dir, std::uint64_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06llu.ppm", static_cast<unsigned long long>(index));
  return dir / name;
}

}  // namespace shuttlesim
