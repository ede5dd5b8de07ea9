#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "loccap/geometry.hpp"
#include "loccap/rng.hpp"

namespace loccap {

enum class PatternKind { Square, Hexagonal, Triangular, Poisson, Custom };

inline bool is_lattice(PatternKind kind) {
  return kind == PatternKind::Square || kind == PatternKind::Hexagonal || kind == PatternKind::Triangular;
}

inline std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Square: return "square";
    case PatternKind::Hexagonal: return "hexagonal";
    case PatternKind::Triangular: return "triangular";
    case PatternKind::Poisson: return "poisson";
    case PatternKind::Custom: return "custom";
  }
  return "custom";
}

inline PatternKind parse_pattern_kind(std::string_view name) {
  if (name == "square") return PatternKind::Square;
  if (name == "hexagonal" || name == "honeycomb" || name == "hex") return PatternKind::Hexagonal;
  if (name == "triangular" || name == "tri") return PatternKind::Triangular;
  if (name == "poisson") return PatternKind::Poisson;
  if (name == "custom") return PatternKind::Custom;
  throw std::invalid_argument("unknown pattern kind: " + std::string(name));
}

/// Positions of the simultaneous emitters in one slot, plus pattern metadata.
template <typename Scalar>
struct EmitterSet {
  std::vector<Point2<Scalar>> positions;
  PatternKind kind = PatternKind::Custom;
  std::optional<Scalar> spacing;  // nearest-neighbour distance d, lattices only
  Window<Scalar> window;
  std::optional<std::uint64_t> seed;
  // Intensity of the pattern on the infinite plane (points per m^2); 0 when unknown.
  Scalar nominal_density = Scalar(0);

  std::size_t size() const { return positions.size(); }
  const Point2<Scalar>& operator[](std::size_t i) const { return positions[i]; }

  /// Index of the emitter closest to `p` (linear scan).
  std::size_t closest_to(const Point2<Scalar>& p) const {
    if (positions.empty()) throw std::invalid_argument("empty emitter set");
    std::size_t best = 0;
    Scalar best_d2 = (positions[0] - p).squaredNorm();
    for (std::size_t k = 1; k < positions.size(); ++k) {
      const Scalar d2 = (positions[k] - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    return best;
  }
};

using EmitterSetd = EmitterSet<double>;

/// Lattice geometry: Bravais basis (columns) and the motif repeated in each cell.
template <typename Scalar>
struct LatticeGeometry {
  Matrix2<Scalar> basis;
  std::vector<Point2<Scalar>> motif;
};

template <typename Scalar>
LatticeGeometry<Scalar> lattice_geometry(PatternKind kind, Scalar d) {
  if (!(d > Scalar(0))) throw std::invalid_argument("lattice spacing must be positive");
  const Scalar s3 = std::sqrt(Scalar(3));
  LatticeGeometry<Scalar> g;
  switch (kind) {
    case PatternKind::Square:
      g.basis << d, 0, 0, d;
      g.motif = {Point2<Scalar>::Zero()};
      break;
    case PatternKind::Triangular:
      // rows at pitch d*sqrt(3)/2, alternate rows shifted by d/2
      g.basis << d, d / 2, 0, d * s3 / 2;
      g.motif = {Point2<Scalar>::Zero()};
      break;
    case PatternKind::Hexagonal:
      // honeycomb: triangular Bravais lattice of pitch sqrt(3) d with a two-point motif
      g.basis << s3 * d, s3 * d / 2, 0, Scalar(1.5) * d;
      g.motif = {Point2<Scalar>::Zero(), Point2<Scalar>(0, d)};
      break;
    default:
      throw std::invalid_argument("not a lattice kind: " + std::string(to_string(kind)));
  }
  return g;
}

/// Points per unit area of an infinite lattice with nearest-neighbour distance d.
template <typename Scalar>
Scalar analytic_density(PatternKind kind, Scalar d) {
  const auto g = lattice_geometry(kind, d);
  return static_cast<Scalar>(g.motif.size()) / std::abs(g.basis.determinant());
}

/// All lattice points, translated by `offset`, that fall in the closed window.
template <typename Scalar>
EmitterSet<Scalar> generate_grid(PatternKind kind, Scalar d, const Window<Scalar>& window,
                                 const Vector2<Scalar>& offset = Vector2<Scalar>::Zero()) {
  if (!(d > Scalar(0))) throw std::invalid_argument("lattice spacing must be positive");
  if (!(window.half_width > Scalar(0)) || !(window.half_height > Scalar(0))) {
    throw std::invalid_argument("empty window");
  }
  if (!(offset.norm() < d)) throw std::invalid_argument("offset magnitude must be below the spacing");
  const auto geom = lattice_geometry(kind, d);
  const Matrix2<Scalar> inv = geom.basis.inverse();
  const Scalar tol = Scalar(1e-9) * d;

  // Range of cell indices whose points can land in the window.
  Scalar lo_m = std::numeric_limits<Scalar>::max(), hi_m = std::numeric_limits<Scalar>::lowest();
  Scalar lo_n = lo_m, hi_n = hi_m;
  for (Scalar cx : {window.xmin(), window.xmax()}) {
    for (Scalar cy : {window.ymin(), window.ymax()}) {
      const Vector2<Scalar> c = inv * (Point2<Scalar>(cx, cy) - offset);
      lo_m = std::min(lo_m, c.x());
      hi_m = std::max(hi_m, c.x());
      lo_n = std::min(lo_n, c.y());
      hi_n = std::max(hi_n, c.y());
    }
  }
  const auto m0 = static_cast<long long>(std::floor(lo_m)) - 2, m1 = static_cast<long long>(std::ceil(hi_m)) + 2;
  const auto n0 = static_cast<long long>(std::floor(lo_n)) - 2, n1 = static_cast<long long>(std::ceil(hi_n)) + 2;

  EmitterSet<Scalar> set;
  set.kind = kind;
  set.spacing = d;
  set.window = window;
  set.nominal_density = analytic_density(kind, d);
  for (long long n = n0; n <= n1; ++n) {
    for (long long m = m0; m <= m1; ++m) {
      const Vector2<Scalar> cell = geom.basis * Vector2<Scalar>(Scalar(m), Scalar(n)) + offset;
      for (const auto& b : geom.motif) {
        const Point2<Scalar> p = cell + b;
        if (window.contains(p, tol)) set.positions.push_back(p);
      }
    }
  }
  return set;
}

/// Finite-radius estimate of the density: points in the disk of radius R about
/// the window center, divided by the disk area.
template <typename Scalar>
Scalar density(const EmitterSet<Scalar>& set, Scalar radius) {
  if (!(radius > Scalar(0))) throw std::invalid_argument("density radius must be positive");
  if (!set.window.contains_disk(set.window.center, radius)) {
    throw std::invalid_argument("density disk exceeds the window");
  }
  const Scalar r2 = radius * radius;
  std::size_t count = 0;
  for (const auto& p : set.positions) {
    if ((p - set.window.center).squaredNorm() <= r2) ++count;
  }
  return static_cast<Scalar>(count) / (std::numbers::pi_v<Scalar> * r2);
}

/// Homogeneous Poisson pattern of intensity `lambda` on the window; see Rng for
/// the exact sampling algorithm. Points are drawn x then y.
template <typename Scalar>
EmitterSet<Scalar> sample_poisson(Scalar lambda, const Window<Scalar>& window, std::uint64_t seed) {
  if (!(lambda > Scalar(0))) throw std::invalid_argument("poisson intensity must be positive");
  Rng rng(seed);
  const auto n = rng.poisson(static_cast<double>(lambda * window.area()));
  EmitterSet<Scalar> set;
  set.kind = PatternKind::Poisson;
  set.window = window;
  set.seed = seed;
  set.nominal_density = lambda;
  set.positions.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const Scalar x = static_cast<Scalar>(rng.uniform(window.xmin(), window.xmax()));
    const Scalar y = static_cast<Scalar>(rng.uniform(window.ymin(), window.ymax()));
    set.positions.emplace_back(x, y);
  }
  return set;
}

/// Wraps arbitrary positions; every position must lie in the window.
template <typename Scalar>
EmitterSet<Scalar> make_custom(std::vector<Point2<Scalar>> positions, const Window<Scalar>& window,
                               Scalar nominal_density = Scalar(0)) {
  for (const auto& p : positions) {
    if (!window.contains(p)) throw std::invalid_argument("custom emitter outside window");
  }
  EmitterSet<Scalar> set;
  set.positions = std::move(positions);
  set.kind = PatternKind::Custom;
  set.window = window;
  set.nominal_density = nominal_density;
  return set;
}

/// Applies z -> M z + shift to every emitter. The result is Custom and carries
/// the transformed intensity lambda / |det M|.
template <typename Scalar>
EmitterSet<Scalar> transform(const EmitterSet<Scalar>& set, const Matrix2<Scalar>& m,
                             const Vector2<Scalar>& shift = Vector2<Scalar>::Zero()) {
  EmitterSet<Scalar> out;
  out.kind = PatternKind::Custom;
  out.positions.reserve(set.size());
  Scalar xmin = std::numeric_limits<Scalar>::max(), xmax = std::numeric_limits<Scalar>::lowest();
  Scalar ymin = xmin, ymax = xmax;
  for (const auto& p : set.positions) {
    const Point2<Scalar> q = m * p + shift;
    out.positions.push_back(q);
    xmin = std::min(xmin, q.x());
    xmax = std::max(xmax, q.x());
    ymin = std::min(ymin, q.y());
    ymax = std::max(ymax, q.y());
  }
  // bounding box of the transformed window corners
  for (Scalar cx : {set.window.xmin(), set.window.xmax()}) {
    for (Scalar cy : {set.window.ymin(), set.window.ymax()}) {
      const Point2<Scalar> q = m * Point2<Scalar>(cx, cy) + shift;
      xmin = std::min(xmin, q.x());
      xmax = std::max(xmax, q.x());
      ymin = std::min(ymin, q.y());
      ymax = std::max(ymax, q.y());
    }
  }
  out.window = Window<Scalar>(Point2<Scalar>((xmin + xmax) / 2, (ymin + ymax) / 2), (xmax - xmin) / 2,
                              (ymax - ymin) / 2);
  const Scalar det = std::abs(m.determinant());
  out.nominal_density = det > Scalar(0) ? set.nominal_density / det : Scalar(0);
  if (set.spacing && m.isApprox(m(0, 0) * Matrix2<Scalar>::Identity())) {
    out.kind = set.kind;
    out.spacing = *set.spacing * std::abs(m(0, 0));
  }
  return out;
}

}  // namespace loccap
