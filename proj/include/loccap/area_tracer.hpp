#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "loccap/geometry.hpp"
#include "loccap/polygon.hpp"
#include "loccap/sir_field.hpp"

namespace loccap {

class TracerError : public std::runtime_error {
 public:
  enum class Kind { Unsupported, NoInterferer, NewtonFailed, MaxSteps, GradientUnderflow };

  TracerError(Kind kind, const std::string& what, double last_residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), kind_(kind), last_residual_(last_residual) {}

  Kind kind() const { return kind_; }
  double last_residual() const { return last_residual_; }

 private:
  Kind kind_;
  double last_residual_;
};

template <typename Scalar>
struct TracerConfig {
  Scalar delta_t = Scalar(0.05);     // arc step (m)
  Scalar newton_tol = Scalar(1e-10); // |S - beta| accepted after projection
  int newton_max_iter = 50;
  Scalar closure_tol = Scalar(1.5);  // closure radius in units of delta_t
  std::size_t max_steps = 1000000;
  bool reproject = true;             // pull every step back onto S = beta

  /// Defaults for a pattern of nearest-neighbour spacing d: delta_t = d / 500.
  static TracerConfig for_spacing(Scalar d) {
    TracerConfig c;
    c.delta_t = d / 500;
    return c;
  }

  void validate() const {
    if (!(delta_t > Scalar(0))) throw std::invalid_argument("tracer step delta_t must be positive");
    if (!(newton_tol > Scalar(0))) throw std::invalid_argument("newton tolerance must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be at least 1");
    if (!(closure_tol >= Scalar(1))) throw std::invalid_argument("closure_tol must be at least 1");
    if (max_steps < 4) throw std::invalid_argument("max_steps must be at least 4");
  }
};

using TracerConfigd = TracerConfig<double>;

/// Traced boundary of one reception area and its size.
template <typename Scalar>
struct ReceptionArea {
  std::size_t emitter = 0;
  Point2<Scalar> center = Point2<Scalar>::Zero();  // emitter position
  std::vector<Point2<Scalar>> boundary;            // z(0..K), counter-clockwise, implicitly closed
  std::vector<Vector2<Scalar>> tangents;           // unit marching direction at each vertex
  std::vector<Scalar> residuals;                   // S_i(z(k)) - beta
  Scalar sigma = Scalar(0);          // polygon with Hermite edge correction
  Scalar sigma_contour = Scalar(0);  // running contour sum -1/2 sum (z - z_i).n dt
  Scalar sigma_polygon = Scalar(0);  // plain shoelace of the vertices
  Scalar delta_t = Scalar(0);
  bool closed = false;
  Scalar max_residual = Scalar(0);
  std::size_t newton_iterations = 0;
};

using ReceptionAread = ReceptionArea<double>;

/// Point on the beta-level set of S_i on the ray from z_i toward its nearest
/// interferer. Newton on ln S - ln beta in the distance r, bracketed in (0, D)
/// and started from the single-interferer root r0 = D / (1 + beta^(1/alpha)).
template <typename Scalar>
Point2<Scalar> seed_boundary_point(const LocalField<Scalar>& field, const TracerConfig<Scalar>& config,
                                   int* iterations = nullptr) {
  config.validate();
  if (field.interferer_count() == 0) {
    throw TracerError(TracerError::Kind::NoInterferer, "emitter has no interferer within the truncation radius");
  }
  const Scalar beta = field.beta();
  const Point2<Scalar> zi = field.emitter();
  const Vector2<Scalar> to_near = field.nearest_interferer() - zi;
  const Scalar dist = to_near.norm();
  const Vector2<Scalar> u = to_near / dist;
  Scalar lo = 0, hi = dist;
  Scalar r = dist / (Scalar(1) + std::pow(beta, Scalar(1) / field.alpha()));
  Scalar residual = std::numeric_limits<Scalar>::quiet_NaN();
  for (int it = 0; it <= config.newton_max_iter; ++it) {
    const auto s = field.evaluate(zi + r * u);
    residual = s.sir - beta;
    if (std::abs(residual) <= config.newton_tol) {
      if (iterations) *iterations = it;
      return zi + r * u;
    }
    const Scalar f = std::log(s.sir / beta);
    if (f > 0) {
      lo = r;
    } else {
      hi = r;
    }
    const Scalar df = s.grad_log.dot(u);
    Scalar next = r - f / df;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    r = next;
  }
  throw TracerError(TracerError::Kind::NewtonFailed, "newton seed search did not converge",
                    static_cast<double>(residual));
}

namespace detail {

/// Newton projection of z onto S = beta along grad ln S.
template <typename Scalar>
SirSample<Scalar> project_to_level(const LocalField<Scalar>& field, Point2<Scalar>& z, const TracerConfig<Scalar>& config,
                                   std::size_t& iterations) {
  const Scalar beta = field.beta();
  auto s = field.evaluate(z);
  for (int it = 0; it < config.newton_max_iter; ++it) {
    if (std::abs(s.sir - beta) <= config.newton_tol) return s;
    const Scalar f = std::log(s.sir / beta);
    const Scalar g2 = s.grad_log.squaredNorm();
    if (!(g2 > Scalar(0)) || !std::isfinite(g2)) break;
    z -= (f / g2) * s.grad_log;
    s = field.evaluate(z);
    ++iterations;
  }
  if (std::abs(s.sir - beta) <= config.newton_tol) return s;
  throw TracerError(TracerError::Kind::NewtonFailed, "projection onto the level set did not converge",
                    static_cast<double>(s.sir - beta));
}

}  // namespace detail

/// Marches the beta-level curve of S_i counter-clockwise with
///   z(k+1) = z(k) + J grad S / |grad S| * dt,  J = [[0, 1], [-1, 0]],
/// projecting each step back onto the curve, until the walk has turned by more
/// than pi and returns within closure_tol * dt of z(0).
template <typename Scalar>
ReceptionArea<Scalar> trace_boundary(const LocalField<Scalar>& field, const TracerConfig<Scalar>& config) {
  config.validate();
  const Scalar beta = field.beta();
  if (!(beta > Scalar(1))) {
    throw TracerError(TracerError::Kind::Unsupported,
                      "unsupported-by-tracer: beta <= 1 may give reception areas that are not single closed curves");
  }
  const Scalar dt = config.delta_t;
  const Point2<Scalar> zi = field.emitter();

  ReceptionArea<Scalar> area;
  area.emitter = field.emitter_id();
  area.center = zi;
  area.delta_t = dt;

  int seed_iters = 0;
  Point2<Scalar> z = seed_boundary_point(field, config, &seed_iters);
  area.newton_iterations = static_cast<std::size_t>(seed_iters);
  const Point2<Scalar> z0 = z;
  auto s = field.evaluate(z);

  auto normal_of = [](const SirSample<Scalar>& smp) -> Vector2<Scalar> {
    const Scalar n = smp.grad_log.norm();
    if (!(n > std::numeric_limits<Scalar>::min()) || !std::isfinite(n)) {
      throw TracerError(TracerError::Kind::GradientUnderflow, "SIR gradient vanished on the level curve");
    }
    return smp.grad_log / n;
  };

  Vector2<Scalar> normal = normal_of(s);
  Vector2<Scalar> dir = rotate_cw<Scalar>(normal);
  Scalar turning = 0;
  Scalar contour = 0;
  const Scalar close_r2 = (config.closure_tol * dt) * (config.closure_tol * dt);

  for (std::size_t step = 0;; ++step) {
    area.boundary.push_back(z);
    area.tangents.push_back(dir);
    area.residuals.push_back(s.sir - beta);

    if (step >= 3 && turning > std::numbers::pi_v<Scalar> && (z - z0).squaredNorm() < close_r2) {
      // closing chord back to z(0)
      contour -= (z - zi).dot(normal) * (z0 - z).norm() / 2;
      break;
    }
    if (step >= config.max_steps) {
      throw TracerError(TracerError::Kind::MaxSteps, "boundary march exceeded max_steps without closing");
    }

    contour -= (z - zi).dot(normal) * dt / 2;
    z += dir * dt;
    if (config.reproject) {
      s = detail::project_to_level(field, z, config, area.newton_iterations);
    } else {
      s = field.evaluate(z);
    }
    normal = normal_of(s);
    const Vector2<Scalar> next_dir = rotate_cw<Scalar>(normal);
    turning += std::atan2(cross<Scalar>(dir, next_dir), dir.dot(next_dir));
    dir = next_dir;
  }

  area.closed = true;
  area.sigma_contour = contour;
  area.sigma_polygon = signed_area<Scalar>(area.boundary);
  area.sigma = hermite_area<Scalar>(area.boundary, area.tangents);
  for (Scalar r : area.residuals) area.max_residual = std::max(area.max_residual, std::abs(r));
  return area;
}

template <typename Scalar>
ReceptionArea<Scalar> trace_boundary(const SirField<Scalar>& field, std::size_t i, const TracerConfig<Scalar>& config) {
  return trace_boundary(field.local(i), config);
}

/// Areas traced at dt, dt/2, dt/4, ... and a Richardson extrapolation of the
/// plain-polygon area, whose chord error is second order in dt.
template <typename Scalar>
struct ConvergenceStudy {
  std::vector<Scalar> delta_t;
  std::vector<Scalar> sigma_polygon;
  std::vector<Scalar> sigma;
  Scalar extrapolated = Scalar(0);
  Scalar observed_order = std::numeric_limits<Scalar>::quiet_NaN();
};

template <typename Scalar>
ConvergenceStudy<Scalar> convergence_study(const LocalField<Scalar>& field, TracerConfig<Scalar> config, int levels = 3) {
  if (levels < 2) throw std::invalid_argument("convergence study needs at least two levels");
  ConvergenceStudy<Scalar> out;
  for (int l = 0; l < levels; ++l) {
    const auto a = trace_boundary(field, config);
    out.delta_t.push_back(config.delta_t);
    out.sigma_polygon.push_back(a.sigma_polygon);
    out.sigma.push_back(a.sigma);
    config.delta_t /= 2;
  }
  const auto n = out.sigma_polygon.size();
  const Scalar fine = out.sigma_polygon[n - 1], coarse = out.sigma_polygon[n - 2];
  out.extrapolated = fine + (fine - coarse) / 3;
  if (n >= 3) {
    const Scalar d1 = out.sigma_polygon[n - 3] - coarse, d2 = coarse - fine;
    if (d2 != Scalar(0)) out.observed_order = std::log2(std::abs(d1 / d2));
  }
  return out;
}

}  // namespace loccap
