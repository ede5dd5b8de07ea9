#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace loccap {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Point2d = Point2<double>;
using Vector2d = Vector2<double>;
using Matrix2d = Matrix2<double>;

/// Axis-aligned rectangle given by its center and half extents (meters).
template <typename Scalar>
struct Window {
  Point2<Scalar> center = Point2<Scalar>::Zero();
  Scalar half_width = Scalar(0);
  Scalar half_height = Scalar(0);

  Window() = default;
  Window(Point2<Scalar> c, Scalar hw, Scalar hh) : center(std::move(c)), half_width(hw), half_height(hh) {
    if (!(hw > Scalar(0)) || !(hh > Scalar(0))) {
      throw std::invalid_argument("window half extents must be positive");
    }
  }

  /// Square window of side `side` centered at the origin.
  static Window square(Scalar side) { return Window(Point2<Scalar>::Zero(), side / 2, side / 2); }

  Scalar xmin() const { return center.x() - half_width; }
  Scalar xmax() const { return center.x() + half_width; }
  Scalar ymin() const { return center.y() - half_height; }
  Scalar ymax() const { return center.y() + half_height; }
  Scalar area() const { return 4 * half_width * half_height; }

  /// Closed inclusion, widened by `tol` on every edge.
  bool contains(const Point2<Scalar>& p, Scalar tol = Scalar(0)) const {
    return p.x() >= xmin() - tol && p.x() <= xmax() + tol && p.y() >= ymin() - tol && p.y() <= ymax() + tol;
  }

  bool contains_disk(const Point2<Scalar>& c, Scalar radius) const {
    return c.x() - radius >= xmin() && c.x() + radius <= xmax() && c.y() - radius >= ymin() &&
           c.y() + radius <= ymax();
  }

  Window translated(const Vector2<Scalar>& v) const { return Window(center + v, half_width, half_height); }
};

using Windowd = Window<double>;

/// Clockwise quarter turn, [[0, 1], [-1, 0]].
template <typename Scalar>
Vector2<Scalar> rotate_cw(const Vector2<Scalar>& v) {
  return Vector2<Scalar>(v.y(), -v.x());
}

template <typename Scalar>
Scalar cross(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Generator of plane rotations.
template <typename Scalar>
Matrix2<Scalar> rotation_generator() {
  Matrix2<Scalar> j;
  j << 0, -1, 1, 0;
  return j;
}

template <typename Scalar>
Matrix2<Scalar> rotation(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix2<Scalar> r;
  r << cos(angle), -sin(angle), sin(angle), cos(angle);
  return r;
}

}  // namespace loccap
