#ifndef SHUTTLESIM_RENDERER_HPP
#define SHUTTLESIM_RENDERER_HPP

// Software rendering of rally states to RGB frames and binary PPM files.
//
// Both views share px = round_half_up((x + 6.7) * 50) + 50. The top view
// maps y to rows (py = round_half_up((3.05 - y) * 50) + 50) and grows the
// shuttle marker with height; the side view maps z to rows
// (py = round_half_up((4 - z) * 50) + 10) and grows the marker as the
// shuttle comes nearer the camera at y = -inf.
//
// Colors: background (24, 96, 56), court lines (235, 235, 235), net
// (160, 160, 160), player A (60, 110, 230), player B (220, 60, 50),
// shuttle (250, 220, 40).

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "shuttlesim/rally.hpp"

namespace shuttlesim {

enum class View : std::uint8_t { top, side };

std::string_view to_string(View v);
std::optional<View> parse_view(std::string_view s);

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr int kPixelsPerMeter = 50;
inline constexpr int kTopWidth = 770;
inline constexpr int kTopHeight = 405;
inline constexpr int kSideWidth = 770;
inline constexpr int kSideHeight = 260;
inline constexpr int kPlayerRadius = 8;
inline constexpr int kDefaultFrameStride = 4;

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  ///< row-major, top row first

  Frame() = default;
  Frame(int w, int h, Rgb fill);

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);  ///< ignores out-of-frame pixels
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Projection {
  int px = 0;
  int py = 0;
  int radius = 0;
  friend bool operator==(const Projection&, const Projection&) = default;
};

/// floor(v + 0.5), nudged so values a rounding error below .5 still go up.
int round_half_up(double v);

Projection project_top(const Vec3& pos);
Projection project_side(const Vec3& pos);

Frame render_frame(const RallyState& state, View view, const CourtSpec& court = {});

/// "P6\n<w> <h>\n255\n" then the raw bytes.
void write_ppm(const Frame& frame, std::ostream& out);
void write_ppm(const Frame& frame, const std::filesystem::path& path);
/// Strict reader for exactly the layout write_ppm produces.
Frame read_ppm(std::istream& in);

/// dir / "frame_000042.ppm"
std::filesystem::path frame_path(const std::filesystem::path& dir, std::uint64_t index);

}  // namespace shuttlesim

#endif  // SHUTTLESIM_RENDERER_HPP
