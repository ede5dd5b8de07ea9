#include "loccap/optimality.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "loccap/parallel.hpp"
#include "loccap/polygon.hpp"

namespace loccap {

namespace {

struct RegionShare {
  double area = 0;
  bool clipped = false;
  bool touches = false;
};

RegionShare share_in_region(const ReceptionAread& a, const Windowd& region) {
  double xmin = a.boundary[0].x(), xmax = xmin, ymin = a.boundary[0].y(), ymax = ymin;
  for (const auto& p : a.boundary) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  RegionShare s;
  if (xmin >= region.xmin() && xmax <= region.xmax() && ymin >= region.ymin() && ymax <= region.ymax()) {
    s.area = a.sigma;
    s.touches = true;
    return s;
  }
  if (xmax < region.xmin() || xmin > region.xmax() || ymax < region.ymin() || ymin > region.ymax()) return s;
  const auto clipped = clip_to_window<double>(a.boundary, region);
  s.area = std::abs(signed_area<double>(clipped));
  s.clipped = true;
  s.touches = s.area > 0;
  return s;
}

void require_supported(const SirFieldd& field) {
  if (!(field.params().beta > 1)) {
    throw TracerError(TracerError::Kind::Unsupported,
                      "unsupported-by-tracer: U is assembled from disjoint reception areas, which needs beta > 1");
  }
}

void require_centered(const SirFieldd& field, std::size_t i, const Windowd& region) {
  if (i >= field.size()) throw std::out_of_range("emitter index out of range");
  const double tol = 1e-6 * std::max(field.spacing(), 1.0);
  if ((field.set()[i] - region.center).norm() > tol) {
    throw std::invalid_argument("the probed emitter must sit at the center of the integration region");
  }
}

/// Emitters whose reception area can reach into the region.
std::vector<std::size_t> region_candidates(const SirFieldd& field, const Windowd& region) {
  const double margin = 2 * field.spacing();
  std::vector<std::size_t> out;
  const auto& pts = field.set().positions;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (region.contains(pts[k], margin)) out.push_back(k);
  }
  return out;
}

std::vector<RegionShare> trace_shares(const std::vector<LocalField<double>>& locals, const Windowd& region,
                                      const TracerConfigd& tracer, unsigned threads) {
  std::vector<RegionShare> shares(locals.size());
  parallel_for(locals.size(), threads, [&](std::size_t k) {
    try {
      shares[k] = share_in_region(trace_boundary(locals[k], tracer), region);
    } catch (const TracerError& e) {
      throw TracerError(e.kind(), "emitter " + std::to_string(locals[k].emitter_id()) + ": " + e.what(),
                        e.last_residual());
    }
  });
  return shares;
}

}  // namespace

void DiffConfig::validate() const {
  if (!(delta_x > 0) || !(delta_y > 0)) throw std::invalid_argument("perturbation steps must be positive");
  if (!(influence_spacings > 0)) throw std::invalid_argument("influence radius must be positive");
  tracer.validate();
}

UIntegral integrate_U(const SirFieldd& field, std::size_t i, const Windowd& region, const TracerConfigd& tracer,
                      unsigned threads) {
  require_supported(field);
  require_centered(field, i, region);
  const auto ids = region_candidates(field, region);
  std::vector<LocalField<double>> locals;
  locals.reserve(ids.size());
  for (auto k : ids) locals.push_back(field.local(k));
  const auto shares = trace_shares(locals, region, tracer, threads);
  UIntegral u;
  for (const auto& s : shares) {
    u.U += s.area;
    u.emitters += s.touches ? 1 : 0;
    u.clipped += s.clipped ? 1 : 0;
  }
  return u;
}

PerturbedU::PerturbedU(const SirFieldd& field, std::size_t i, const DiffConfig& config)
    : field_(field), probe_(i), config_(config) {
  config_.validate();
  require_supported(field);
  require_centered(field, i, config_.region);
  const Point2d zi = field.set()[i];
  const double influence = config_.influence_spacings * field.spacing();

  const auto ids = region_candidates(field, config_.region);
  std::vector<LocalField<double>> all;
  all.reserve(ids.size());
  for (auto k : ids) all.push_back(field.local(k));
  const auto shares = trace_shares(all, config_.region, config_.tracer, config_.threads);

  for (std::size_t k = 0; k < ids.size(); ++k) {
    total_ += shares[k].touches ? 1 : 0;
    if ((field.set()[ids[k]] - zi).norm() <= influence) {
      near_base_ += shares[k].area;
      locals_.push_back(std::move(all[k]));
    } else {
      far_ += shares[k].area;
    }
  }
}

double PerturbedU::near(const Vector2d& shift) const {
  const Point2d moved = field_.set()[probe_] + shift;
  std::vector<LocalField<double>> perturbed;
  perturbed.reserve(locals_.size());
  for (const auto& l : locals_) perturbed.push_back(l.with_moved(probe_, moved));
  const auto shares = trace_shares(perturbed, config_.region, config_.tracer, config_.threads);
  double sum = 0;
  for (const auto& s : shares) sum += s.area;
  return sum;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::LocalMax: return "LocalMax";
    case Classification::LocalMin: return "LocalMin";
    case Classification::Saddle: return "Saddle";
    case Classification::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

Classification classify(double uxx, double det_h) {
  if (det_h > 0 && uxx < 0) return Classification::LocalMax;
  if (det_h > 0 && uxx > 0) return Classification::LocalMin;
  if (det_h < 0) return Classification::Saddle;
  return Classification::Degenerate;
}

Gradient gradient_U(const PerturbedU& u, const DiffConfig& diff) {
  diff.validate();
  const double xp = u.near({diff.delta_x, 0}), xm = u.near({-diff.delta_x, 0});
  const double yp = u.near({0, diff.delta_y}), ym = u.near({0, -diff.delta_y});
  return {(xp - xm) / (2 * diff.delta_x), (yp - ym) / (2 * diff.delta_y)};
}

Gradient gradient_U(const SirFieldd& field, std::size_t i, const DiffConfig& diff) {
  return gradient_U(PerturbedU(field, i, diff), diff);
}

HessianReport hessian_U(const PerturbedU& u, const DiffConfig& diff) {
  diff.validate();
  const double dx = diff.delta_x, dy = diff.delta_y;
  const double c = u.near({0, 0});
  const double xp = u.near({dx, 0}), xm = u.near({-dx, 0});
  const double yp = u.near({0, dy}), ym = u.near({0, -dy});
  const double pp = u.near({dx, dy}), pm = u.near({dx, -dy});
  const double mp = u.near({-dx, dy}), mm = u.near({-dx, -dy});

  HessianReport r;
  r.U = u.base();
  r.Ux = (xp - xm) / (2 * dx);
  r.Uy = (yp - ym) / (2 * dy);
  r.Uxx = (xp - 2 * c + xm) / (dx * dx);
  r.Uyy = (yp - 2 * c + ym) / (dy * dy);
  r.Uxy = (pp - pm - mp + mm) / (4 * dx * dy);
  r.Uyx = r.Uxy;
  r.detH = r.Uxx * r.Uyy - r.Uxy * r.Uyx;
  r.classification = classify(r.Uxx, r.detH);
  r.delta_x = dx;
  r.delta_y = dy;
  r.retraced = u.retraced();
  r.emitters = u.total();
  return r;
}

HessianReport hessian_U(const SirFieldd& field, std::size_t i, const DiffConfig& diff) {
  return hessian_U(PerturbedU(field, i, diff), diff);
}

std::string_view to_string(LinearGenerator g) {
  switch (g) {
    case LinearGenerator::Identity: return "identity";
    case LinearGenerator::Rotation: return "rotation";
    case LinearGenerator::Shear: return "shear";
    case LinearGenerator::Stretch: return "stretch";
  }
  return "identity";
}

LinearGenerator parse_linear_generator(std::string_view name) {
  if (name == "identity" || name == "I") return LinearGenerator::Identity;
  if (name == "rotation" || name == "J") return LinearGenerator::Rotation;
  if (name == "shear") return LinearGenerator::Shear;
  if (name == "stretch") return LinearGenerator::Stretch;
  throw std::invalid_argument("unknown linear generator: " + std::string(name));
}

Matrix2d generator_matrix(LinearGenerator g) {
  Matrix2d a;
  switch (g) {
    case LinearGenerator::Identity: a.setIdentity(); break;
    case LinearGenerator::Rotation: a = rotation_generator<double>(); break;
    case LinearGenerator::Shear: a << 0, 1, 0, 0; break;
    case LinearGenerator::Stretch: a << 1, 0, 0, -1; break;
  }
  return a;
}

LinearResponseReport linear_response(const SirFieldd& field, std::size_t i, const Matrix2d& a, double t_step,
                                     const TracerConfigd& tracer, bool estimate_d) {
  if (!(t_step > 0)) throw std::invalid_argument("t_step must be positive");
  const auto base = field.local(i);
  auto sigma_at = [&](const Matrix2d& m) { return trace_boundary(base.transformed(m), tracer).sigma; };
  auto derivative = [&](const Matrix2d& gen) {
    const Matrix2d id = Matrix2d::Identity();
    return (sigma_at(id + t_step * gen) - sigma_at(id - t_step * gen)) / (2 * t_step);
  };

  LinearResponseReport r;
  r.A = a;
  r.t_step = t_step;
  r.sigma0 = trace_boundary(base, tracer).sigma;
  r.d_sigma_dt = derivative(a);
  r.predicted = r.sigma0 * a.trace();
  if (estimate_d) {
    // tr(E_rc^T D) = D_rc
    for (int row = 0; row < 2; ++row) {
      for (int col = 0; col < 2; ++col) {
        Matrix2d e = Matrix2d::Zero();
        e(row, col) = 1;
        r.D(row, col) = derivative(e);
      }
    }
  }
  return r;
}

}  // namespace loccap
