#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "loccap/geometry.hpp"

namespace loccap {

/// Uniform-grid bucketing of a fixed point set. Immutable after construction,
/// so one index can be shared read-only between threads.
template <typename Scalar>
class GridIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  GridIndex() = default;

  GridIndex(std::span<const Point2<Scalar>> points, Scalar cell_size) : points_(points), cell_(cell_size) {
    if (!(cell_size > Scalar(0))) throw std::invalid_argument("grid index cell size must be positive");
    if (points.empty()) return;
    xmin_ = ymin_ = std::numeric_limits<Scalar>::max();
    Scalar xmax = std::numeric_limits<Scalar>::lowest(), ymax = xmax;
    for (const auto& p : points) {
      xmin_ = std::min(xmin_, p.x());
      ymin_ = std::min(ymin_, p.y());
      xmax = std::max(xmax, p.x());
      ymax = std::max(ymax, p.y());
    }
    nx_ = static_cast<long>(std::floor((xmax - xmin_) / cell_)) + 1;
    ny_ = static_cast<long>(std::floor((ymax - ymin_) / cell_)) + 1;
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<std::size_t> cell_of(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      cell_of[k] = cell_id(cell_x(points[k].x()), cell_y(points[k].y()));
      ++start_[cell_of[k] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    order_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < points.size(); ++k) order_[fill[cell_of[k]]++] = k;
  }

  std::size_t size() const { return points_.size(); }

  /// Calls f(index) for every point with |p - center| <= radius.
  template <typename F>
  void for_each_within(const Point2<Scalar>& center, Scalar radius, F&& f) const {
    if (points_.empty()) return;
    const Scalar r2 = radius * radius;
    const long cx0 = std::max(0L, cell_x(center.x() - radius)), cx1 = std::min(nx_ - 1, cell_x(center.x() + radius));
    const long cy0 = std::max(0L, cell_y(center.y() - radius)), cy1 = std::min(ny_ - 1, cell_y(center.y() + radius));
    for (long cy = cy0; cy <= cy1; ++cy) {
      for (long cx = cx0; cx <= cx1; ++cx) {
        const auto c = cell_id(cx, cy);
        for (std::size_t s = start_[c]; s < start_[c + 1]; ++s) {
          const std::size_t k = order_[s];
          if ((points_[k] - center).squaredNorm() <= r2) f(k);
        }
      }
    }
  }

  std::vector<std::size_t> within(const Point2<Scalar>& center, Scalar radius) const {
    std::vector<std::size_t> out;
    for_each_within(center, radius, [&](std::size_t k) { out.push_back(k); });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Nearest point to `p`, skipping index `exclude`; ties go to the lower index.
  std::size_t nearest(const Point2<Scalar>& p, std::size_t exclude = npos) const {
    if (points_.empty()) return npos;
    const long px = std::clamp(cell_x(p.x()), 0L, nx_ - 1), py = std::clamp(cell_y(p.y()), 0L, ny_ - 1);
    // distance from p to the nearest edge of its (clamped) cell block
    std::size_t best = npos;
    Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
    const long max_ring = std::max(nx_, ny_);
    for (long ring = 0; ring <= max_ring; ++ring) {
      for (long cy = py - ring; cy <= py + ring; ++cy) {
        if (cy < 0 || cy >= ny_) continue;
        for (long cx = px - ring; cx <= px + ring; ++cx) {
          if (cx < 0 || cx >= nx_) continue;
          if (std::max(std::abs(cx - px), std::abs(cy - py)) != ring) continue;
          const auto c = cell_id(cx, cy);
          for (std::size_t s = start_[c]; s < start_[c + 1]; ++s) {
            const std::size_t k = order_[s];
            if (k == exclude) continue;
            const Scalar d2 = (points_[k] - p).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && k < best)) {
              best_d2 = d2;
              best = k;
            }
          }
        }
      }
      // every unvisited cell is at least `ring` cells away from p's cell
      if (best != npos) {
        const Scalar reach = static_cast<Scalar>(ring) * cell_;
        if (reach * reach >= best_d2) break;
      }
    }
    return best;
  }

 private:
  long cell_x(Scalar x) const { return static_cast<long>(std::floor((x - xmin_) / cell_)); }
  long cell_y(Scalar y) const { return static_cast<long>(std::floor((y - ymin_) / cell_)); }
  std::size_t cell_id(long cx, long cy) const { return static_cast<std::size_t>(cy * nx_ + cx); }

  std::span<const Point2<Scalar>> points_;
  Scalar cell_ = Scalar(1);
  Scalar xmin_ = Scalar(0), ymin_ = Scalar(0);
  long nx_ = 0, ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace loccap
