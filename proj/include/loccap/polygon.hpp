#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "loccap/geometry.hpp"

namespace loccap {

/// Signed shoelace area of the closed polygon p0..p(n-1); positive when counter-clockwise.
template <typename Scalar>
Scalar signed_area(std::span<const Point2<Scalar>> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return Scalar(0);
  // shoelace about the first vertex keeps the terms small for far-off polygons
  const Point2<Scalar> o = pts[0];
  Scalar acc = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) acc += cross<Scalar>(pts[k] - o, pts[k + 1] - o);
  return acc / 2;
}

/// Pair (i, j) of edges that cross, if any. Edges are (k, k+1 mod n); O(n^2).
template <typename Scalar>
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(std::span<const Point2<Scalar>> pts) {
  const std::size_t n = pts.size();
  auto orient = [](const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
    const Scalar v = cross<Scalar>(b - a, c - a);
    return (v > 0) - (v < 0);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      const auto& c = pts[j];
      const auto& d = pts[(j + 1) % n];
      const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
      if (o1 * o2 < 0 && o3 * o4 < 0) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

template <typename Scalar>
struct PolygonArea {
  Scalar area = Scalar(0);
  bool simple = true;
};

/// Shoelace area of a closed polyline of at least three vertices, with a
/// self-intersection diagnostic.
template <typename Scalar>
PolygonArea<Scalar> polygon_area(std::span<const Point2<Scalar>> pts) {
  if (pts.size() < 3) throw std::invalid_argument("polygon needs at least three vertices");
  PolygonArea<Scalar> out;
  out.area = std::abs(signed_area(pts));
  out.simple = !find_self_intersection(pts).has_value();
  return out;
}

/// Area enclosed by a smooth closed curve sampled at `pts` with unit tangents
/// `tangents` (counter-clockwise). Each chord gets the area between it and the
/// cubic Hermite arc through its endpoints, L^2 (m1 - m0) / 12 where m are the
/// tangent slopes in the chord frame; the error per edge is O(L^5).
template <typename Scalar>
Scalar hermite_area(std::span<const Point2<Scalar>> pts, std::span<const Vector2<Scalar>> tangents) {
  if (pts.size() != tangents.size()) throw std::invalid_argument("one tangent per vertex required");
  const std::size_t n = pts.size();
  Scalar acc = signed_area(pts);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = (k + 1) % n;
    const Vector2<Scalar> c = pts[k1] - pts[k];
    const Scalar len = c.norm();
    if (len == Scalar(0)) continue;
    const Vector2<Scalar> u = c / len;
    const Scalar m0 = cross<Scalar>(u, tangents[k]) / u.dot(tangents[k]);
    const Scalar m1 = cross<Scalar>(u, tangents[k1]) / u.dot(tangents[k1]);
    acc += len * len * (m1 - m0) / 12;
  }
  return acc;
}

/// Sutherland-Hodgman clip of a polygon against a rectangle.
template <typename Scalar>
std::vector<Point2<Scalar>> clip_to_window(std::span<const Point2<Scalar>> pts, const Window<Scalar>& w) {
  std::vector<Point2<Scalar>> poly(pts.begin(), pts.end());
  // inside(p) >= 0 for each of the four half-planes
  auto clip = [&](auto&& inside, auto&& intersect) {
    std::vector<Point2<Scalar>> out;
    if (poly.empty()) return;
    out.reserve(poly.size() + 4);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const auto& cur = poly[k];
      const auto& prev = poly[(k + poly.size() - 1) % poly.size()];
      const bool in_cur = inside(cur), in_prev = inside(prev);
      if (in_cur) {
        if (!in_prev) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (in_prev) {
        out.push_back(intersect(prev, cur));
      }
    }
    poly = std::move(out);
  };
  auto at_x = [](Scalar x) {
    return [x](const Point2<Scalar>& a, const Point2<Scalar>& b) {
      const Scalar t = (x - a.x()) / (b.x() - a.x());
      return Point2<Scalar>(x, a.y() + t * (b.y() - a.y()));
    };
  };
  auto at_y = [](Scalar y) {
    return [y](const Point2<Scalar>& a, const Point2<Scalar>& b) {
      const Scalar t = (y - a.y()) / (b.y() - a.y());
      return Point2<Scalar>(a.x() + t * (b.x() - a.x()), y);
    };
  };
  const Scalar x0 = w.xmin(), x1 = w.xmax(), y0 = w.ymin(), y1 = w.ymax();
  clip([x0](const Point2<Scalar>& p) { return p.x() >= x0; }, at_x(x0));
  clip([x1](const Point2<Scalar>& p) { return p.x() <= x1; }, at_x(x1));
  clip([y0](const Point2<Scalar>& p) { return p.y() >= y0; }, at_y(y0));
  clip([y1](const Point2<Scalar>& p) { return p.y() <= y1; }, at_y(y1));
  return poly;
}

/// Even-odd point-in-polygon test.
template <typename Scalar>
bool point_in_polygon(std::span<const Point2<Scalar>> pts, const Point2<Scalar>& p) {
  bool inside = false;
  const std::size_t n = pts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = pts[i];
    const auto& b = pts[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace loccap
