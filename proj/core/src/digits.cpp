// Copyright 2026 The ropdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stroke-rendered digits used when no MNIST files are at hand.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ropdl/error.hpp"
#include "ropdl/random.hpp"
#include "ropdl/superres.hpp"

namespace ropdl {
namespace {

struct Point {
  double x;
  double y;
};
using Stroke = std::vector<Point>;

// Elliptical arc in the unit box, angles in degrees, y pointing down.
Stroke arc(double cx, double cy, double rx, double ry, double from, double to) {
  Stroke s;
  const int steps = 24;
  for (int i = 0; i <= steps; ++i) {
    const double t = (from + (to - from) * i / steps) * std::numbers::pi / 180.0;
    s.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  return s;
}

std::vector<Stroke> glyph(int digit) {
  switch (digit) {
    case 0: return {arc(0.5, 0.5, 0.3, 0.45, 0, 360)};
    case 1: return {{{0.35, 0.2}, {0.55, 0.05}, {0.55, 0.95}}};
    case 2:
      return {arc(0.5, 0.3, 0.3, 0.25, 180, 390),
              {{0.76, 0.43}, {0.2, 0.95}, {0.82, 0.95}}};
    case 3:
      return {arc(0.48, 0.28, 0.27, 0.23, 200, 450),
              arc(0.48, 0.73, 0.3, 0.23, -90, 160)};
    case 4:
      return {{{0.62, 0.95}, {0.62, 0.05}, {0.15, 0.68}, {0.85, 0.68}}};
    case 5:
      return {{{0.78, 0.05}, {0.3, 0.05}, {0.26, 0.45}},
              arc(0.48, 0.68, 0.3, 0.27, -120, 150)};
    case 6:
      return {{{0.7, 0.05}, {0.3, 0.5}}, arc(0.5, 0.7, 0.27, 0.25, 0, 360)};
    case 7: return {{{0.18, 0.05}, {0.82, 0.05}, {0.4, 0.95}}};
    case 8:
      return {arc(0.5, 0.27, 0.24, 0.22, 0, 360), arc(0.5, 0.72, 0.29, 0.23, 0, 360)};
    case 9:
      return {arc(0.5, 0.3, 0.27, 0.25, 0, 360), {{0.77, 0.3}, {0.6, 0.95}}};
    default:
      throw InvalidArgument("render_digit: digit must be in [0, 9], got " +
                            std::to_string(digit));
  }
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double uniform(Rng& rng, double lo, double hi) {
  constexpr std::size_t kSteps = 1u << 20;
  return lo + (hi - lo) * static_cast<double>(rng.uniform_index(kSteps)) / (kSteps - 1);
}

}  // namespace

GrayImage render_digit(int digit, std::uint64_t seed) {
  const std::vector<Stroke> strokes = glyph(digit);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(digit)));
  const double angle = uniform(rng, -10.0, 10.0) * std::numbers::pi / 180.0;
  const double scale = uniform(rng, 0.9, 1.1);
  const double shift_x = uniform(rng, -1.0, 1.0);
  const double shift_y = uniform(rng, -1.0, 1.0);
  const double width = uniform(rng, 2.2, 3.0);

  // Unit box -> 20x20 box centered in 28x28, then rotate/scale about the center.
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Stroke> placed;
  for (const auto& stroke : strokes) {
    Stroke out;
    for (const auto& p : stroke) {
      const double x = (p.x - 0.5) * 20.0 * scale;
      const double y = (p.y - 0.5) * 20.0 * scale;
      out.push_back({13.5 + shift_x + c * x - s * y, 13.5 + shift_y + s * x + c * y});
    }
    placed.push_back(std::move(out));
  }

  GrayImage img(28, 28);
  for (Eigen::Index r = 0; r < 28; ++r) {
    for (Eigen::Index col = 0; col < 28; ++col) {
      const Point p{static_cast<double>(col), static_cast<double>(r)};
      double dist = 1e9;
      for (const auto& stroke : placed) {
        for (std::size_t i = 1; i < stroke.size(); ++i) {
          dist = std::min(dist, segment_distance(p, stroke[i - 1], stroke[i]));
        }
      }
      img.pixels(r, col) = std::clamp(width / 2.0 + 0.5 - dist, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace ropdl
