#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "loccap/geometry.hpp"
#include "loccap/lattice.hpp"
#include "loccap/spatial_index.hpp"

namespace loccap {

/// How the infinite interference sum is cut off around each emitter.
///
/// Interferers within `radius` of the emitter are summed exactly; everything
/// beyond is replaced by the mean-field integral of a homogeneous pattern of
/// the set's nominal density (when `tail_correction` is on and the density is
/// known). Without an explicit radius one is derived from `epsilon`: the
/// smallest R whose neglected tail 2*pi*lambda*R^(2-alpha)/(alpha-2) is below
/// epsilon * d^-alpha, clamped to [min_spacings, max_spacings] * d.
template <typename Scalar>
struct TruncationPolicy {
  std::optional<Scalar> radius;
  Scalar epsilon = Scalar(1e-6);
  Scalar min_spacings = Scalar(3);
  Scalar max_spacings = Scalar(16);
  bool tail_correction = true;
};

template <typename Scalar>
struct FieldParams {
  Scalar alpha = Scalar(4);
  Scalar beta = Scalar(10);
  TruncationPolicy<Scalar> truncation;

  FieldParams() = default;
  FieldParams(Scalar a, Scalar b, TruncationPolicy<Scalar> t = {}) : alpha(a), beta(b), truncation(t) { validate(); }

  /// Threshold on g equivalent to SIR >= beta.
  Scalar beta_prime() const { return beta / (beta + 1); }

  void validate() const {
    if (!(alpha > Scalar(2))) throw std::invalid_argument("pathloss exponent alpha must exceed 2");
    if (!(beta > Scalar(0))) throw std::invalid_argument("SIR threshold beta must be positive");
    if (truncation.radius && !(*truncation.radius > Scalar(0))) {
      throw std::invalid_argument("truncation radius must be positive");
    }
    if (!(truncation.epsilon > Scalar(0))) throw std::invalid_argument("truncation epsilon must be positive");
  }
};

using FieldParamsd = FieldParams<double>;

/// |z - zi|^-alpha with unit transmit power.
template <typename Scalar>
Scalar pathloss(const Point2<Scalar>& z, const Point2<Scalar>& zi, Scalar alpha) {
  const Scalar r = (z - zi).norm();
  if (r == Scalar(0)) throw std::domain_error("pathloss is singular at the emitter position");
  return std::pow(r, -alpha);
}

/// Interference of a homogeneous continuum of intensity `lambda` outside the
/// disk of radius R about `center`, seen at `z`, with its gradient in z.
/// Angular averaging gives the series
///   2*pi*lambda*R^(2-alpha) * sum_k [(alpha/2)_k / k!]^2 x^k / (alpha + 2k - 2),
/// with x = |z - center|^2 / R^2. Evaluated for x <= 0.9.
template <typename Scalar>
struct TailInterference {
  Scalar value = Scalar(0);
  Vector2<Scalar> gradient = Vector2<Scalar>::Zero();
};

template <typename Scalar>
TailInterference<Scalar> tail_interference(const Point2<Scalar>& z, const Point2<Scalar>& center, Scalar lambda,
                                           Scalar radius, Scalar alpha) {
  TailInterference<Scalar> out;
  if (!(lambda > Scalar(0)) || !std::isfinite(radius)) return out;
  const Vector2<Scalar> u = z - center;
  const Scalar x = std::min(u.squaredNorm() / (radius * radius), Scalar(0.9));
  const Scalar half = alpha / 2;
  Scalar coef = 1;  // [(alpha/2)_k / k!]^2
  Scalar xk = 1;    // x^k
  Scalar sum = coef / (alpha - 2);
  Scalar dsum = 0;  // d(sum)/dx
  for (int k = 1; k < 2000; ++k) {
    const Scalar ratio = (half + k - 1) / k;
    coef *= ratio * ratio;
    const Scalar term_d = coef * k * xk / (alpha + 2 * k - 2);
    xk *= x;
    const Scalar term = coef * xk / (alpha + 2 * k - 2);
    sum += term;
    dsum += term_d;
    if (term < std::numeric_limits<Scalar>::epsilon() * sum * Scalar(1e-2) &&
        term_d <= std::numeric_limits<Scalar>::epsilon() * (dsum + std::numeric_limits<Scalar>::min()))
      break;
  }
  const Scalar scale = 2 * std::numbers::pi_v<Scalar> * lambda * std::pow(radius, 2 - alpha);
  out.value = scale * sum;
  out.gradient = scale * dsum * 2 / (radius * radius) * u;
  return out;
}

/// Upper bound on the interference neglected beyond radius R in a pattern of
/// intensity lambda.
template <typename Scalar>
Scalar tail_bound(Scalar lambda, Scalar radius, Scalar alpha) {
  return 2 * std::numbers::pi_v<Scalar> * lambda * std::pow(radius, 2 - alpha) / (alpha - 2);
}

/// SIR and the gradient of its logarithm at one point.
template <typename Scalar>
struct SirSample {
  Scalar sir = Scalar(0);
  Vector2<Scalar> grad_log = Vector2<Scalar>::Zero();  // grad ln S
  bool at_emitter = false;                             // S = +inf
  bool no_interference = false;                        // empty interferer set, S = +inf

  Vector2<Scalar> gradient() const { return sir * grad_log; }
};

/// The SIR of one emitter against a fixed list of interferers.
///
/// Evaluation uses distance ratios, S = 1 / sum_j (|z - zi|^2 / |z - zj|^2)^(alpha/2),
/// so large exponents neither overflow nor underflow near the emitter.
template <typename Scalar>
class LocalField {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  LocalField() = default;

  LocalField(std::size_t emitter_id, Point2<Scalar> emitter, std::vector<std::size_t> ids,
             const std::vector<Point2<Scalar>>& positions, Scalar alpha, Scalar beta)
      : emitter_id_(emitter_id), emitter_(std::move(emitter)), ids_(std::move(ids)), alpha_(alpha), beta_(beta) {
    xs_.resize(static_cast<Eigen::Index>(ids_.size()));
    ys_.resize(static_cast<Eigen::Index>(ids_.size()));
    for (std::size_t k = 0; k < ids_.size(); ++k) {
      xs_[static_cast<Eigen::Index>(k)] = positions[ids_[k]].x();
      ys_[static_cast<Eigen::Index>(k)] = positions[ids_[k]].y();
    }
    tail_center_ = emitter_;
  }

  void set_tail(Scalar density, Scalar radius, const Point2<Scalar>& center) {
    tail_density_ = density;
    tail_radius_ = radius;
    tail_center_ = center;
  }

  std::size_t emitter_id() const { return emitter_id_; }
  const Point2<Scalar>& emitter() const { return emitter_; }
  Scalar alpha() const { return alpha_; }
  Scalar beta() const { return beta_; }
  std::size_t interferer_count() const { return ids_.size(); }
  const std::vector<std::size_t>& interferer_ids() const { return ids_; }
  Point2<Scalar> interferer(std::size_t k) const {
    return Point2<Scalar>(xs_[static_cast<Eigen::Index>(k)], ys_[static_cast<Eigen::Index>(k)]);
  }
  Scalar tail_density() const { return tail_density_; }
  Scalar tail_radius() const { return tail_radius_; }
  bool has_tail() const { return tail_density_ > Scalar(0) && std::isfinite(tail_radius_); }

  SirSample<Scalar> evaluate(const Point2<Scalar>& z) const {
    SirSample<Scalar> s;
    const Vector2<Scalar> di = z - emitter_;
    const Scalar ri2 = di.squaredNorm();
    if (ids_.empty() && !has_tail()) {
      s.sir = std::numeric_limits<Scalar>::infinity();
      s.no_interference = true;
      return s;
    }
    if (ri2 == Scalar(0)) {
      s.sir = std::numeric_limits<Scalar>::infinity();
      s.at_emitter = true;
      return s;
    }
    const Array dx = z.x() - xs_;
    const Array dy = z.y() - ys_;
    const Array r2 = dx.square() + dy.square();
    const Array t = ri2 * r2.inverse();
    Array q;
    if (alpha_ == Scalar(4)) {
      q = t.square();
    } else {
      q = t.pow(alpha_ / 2);
    }
    const Array w = q / r2;
    Scalar total = q.sum();
    // sum_j q_j * (-alpha (z - zj) / |z - zj|^2)
    Vector2<Scalar> grad_sum(-alpha_ * (w * dx).sum(), -alpha_ * (w * dy).sum());
    if (has_tail()) {
      const auto tail = tail_interference(z, tail_center_, tail_density_, tail_radius_, alpha_);
      const Scalar ri_alpha = alpha_ == Scalar(4) ? ri2 * ri2 : std::pow(ri2, alpha_ / 2);
      total += tail.value * ri_alpha;
      grad_sum += tail.gradient * ri_alpha;
    }
    s.sir = Scalar(1) / total;
    s.grad_log = -alpha_ * di / ri2 - grad_sum / total;
    return s;
  }

  Scalar sir(const Point2<Scalar>& z) const { return evaluate(z).sir; }

  /// Received-power share of this emitter, self term included: S / (1 + S).
  Scalar g(const Point2<Scalar>& z) const {
    const auto s = evaluate(z);
    if (!std::isfinite(s.sir)) return Scalar(1);
    return s.sir / (Scalar(1) + s.sir);
  }

  Vector2<Scalar> sir_gradient(const Point2<Scalar>& z) const {
    const auto s = evaluate(z);
    if (s.at_emitter || s.no_interference) throw std::domain_error("SIR gradient is singular at the emitter");
    return s.gradient();
  }

  /// Position of the closest interferer; throws when there is none.
  Point2<Scalar> nearest_interferer() const {
    if (ids_.empty()) throw std::domain_error("emitter has no interferer within the truncation radius");
    Eigen::Index best = 0;
    ((xs_ - emitter_.x()).square() + (ys_ - emitter_.y()).square()).minCoeff(&best);
    return interferer(static_cast<std::size_t>(best));
  }

  /// The same emitter and interferer list after z -> M z for every position.
  /// The tail keeps its mean field: intensity lambda / |det M| outside the
  /// area-equivalent disk about the transformed center.
  LocalField transformed(const Matrix2<Scalar>& m) const {
    LocalField out = *this;
    out.emitter_ = m * emitter_;
    for (Eigen::Index k = 0; k < xs_.size(); ++k) {
      const Point2<Scalar> p = m * Point2<Scalar>(xs_[k], ys_[k]);
      out.xs_[k] = p.x();
      out.ys_[k] = p.y();
    }
    const Scalar det = std::abs(m.determinant());
    out.tail_center_ = m * tail_center_;
    if (has_tail()) {
      out.tail_density_ = tail_density_ / det;
      out.tail_radius_ = tail_radius_ * std::sqrt(det);
    }
    return out;
  }

  /// Moves emitter `id` (this field's own emitter or one of its interferers).
  LocalField with_moved(std::size_t id, const Point2<Scalar>& p) const {
    LocalField out = *this;
    if (id == emitter_id_) {
      out.emitter_ = p;
      return out;
    }
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it != ids_.end() && *it == id) {
      const auto k = static_cast<Eigen::Index>(it - ids_.begin());
      out.xs_[k] = p.x();
      out.ys_[k] = p.y();
    }
    return out;
  }

  bool involves(std::size_t id) const {
    return id == emitter_id_ || std::binary_search(ids_.begin(), ids_.end(), id);
  }

 private:
  std::size_t emitter_id_ = 0;
  Point2<Scalar> emitter_ = Point2<Scalar>::Zero();
  std::vector<std::size_t> ids_;  // sorted global indices
  Array xs_, ys_;
  Scalar alpha_ = Scalar(4);
  Scalar beta_ = Scalar(10);
  Scalar tail_density_ = Scalar(0);
  Scalar tail_radius_ = std::numeric_limits<Scalar>::infinity();
  Point2<Scalar> tail_center_ = Point2<Scalar>::Zero();
};

/// SIR field of a whole emitter set: S_i(z), g_i(z), h(z) and grad S_i(z).
/// Owns its copy of the set and an immutable bucket index; all queries are const.
template <typename Scalar>
class SirField {
 public:
  SirField(EmitterSet<Scalar> set, FieldParams<Scalar> params) : set_(std::move(set)), params_(std::move(params)) {
    params_.validate();
    if (set_.positions.empty()) throw std::invalid_argument("emitter set is empty");
    spacing_ = set_.spacing ? *set_.spacing : estimate_spacing();
    index_ = GridIndex<Scalar>(set_.positions, spacing_ > Scalar(0) ? spacing_ : Scalar(1));
    density_ = params_.truncation.tail_correction ? set_.nominal_density : Scalar(0);
    radius_ = resolve_radius();
  }

  SirField(const SirField& other) : SirField(other.set_, other.params_) {}
  SirField& operator=(const SirField&) = delete;

  const EmitterSet<Scalar>& set() const { return set_; }
  const FieldParams<Scalar>& params() const { return params_; }
  const GridIndex<Scalar>& index() const { return index_; }
  std::size_t size() const { return set_.size(); }
  Scalar spacing() const { return spacing_; }

  /// Interferers of emitter i are those within this distance of z_i.
  Scalar truncation_radius() const { return radius_; }

  /// Bound on the interference dropped by the cut-off (before the mean-field
  /// correction), absolute and relative to the d^-alpha nearest-neighbour term.
  Scalar tail_bound_absolute() const {
    const Scalar lambda = set_.nominal_density;
    if (!std::isfinite(radius_) || !(lambda > Scalar(0))) return Scalar(0);
    return tail_bound(lambda, radius_, params_.alpha);
  }
  Scalar tail_bound_relative() const { return tail_bound_absolute() * std::pow(spacing_, params_.alpha); }

  LocalField<Scalar> local(std::size_t i) const {
    if (i >= set_.size()) throw std::out_of_range("emitter index out of range");
    const Point2<Scalar>& zi = set_.positions[i];
    std::vector<std::size_t> ids;
    if (std::isfinite(radius_)) {
      ids = index_.within(zi, radius_ * (Scalar(1) + Scalar(1e-9)));
      ids.erase(std::remove(ids.begin(), ids.end(), i), ids.end());
    } else {
      ids.reserve(set_.size() - 1);
      for (std::size_t k = 0; k < set_.size(); ++k)
        if (k != i) ids.push_back(k);
    }
    LocalField<Scalar> f(i, zi, std::move(ids), set_.positions, params_.alpha, params_.beta);
    if (density_ > Scalar(0) && std::isfinite(radius_)) f.set_tail(density_, radius_, zi);
    return f;
  }

  Scalar sir(std::size_t i, const Point2<Scalar>& z) const { return local(i).sir(z); }
  Scalar g(std::size_t i, const Point2<Scalar>& z) const { return local(i).g(z); }
  Vector2<Scalar> sir_gradient(std::size_t i, const Point2<Scalar>& z) const { return local(i).sir_gradient(z); }

  /// Emitters that could satisfy g_j(z) >= beta': only those no farther than
  /// |z - z_nearest| * beta'^(-1/alpha) can carry that share of the power.
  std::vector<std::size_t> reception_candidates(const Point2<Scalar>& z) const {
    const std::size_t n = index_.nearest(z);
    const Scalar rn = (set_.positions[n] - z).norm();
    const Scalar reach = rn * std::pow(params_.beta_prime(), -Scalar(1) / params_.alpha) * (Scalar(1) + Scalar(1e-12));
    return index_.within(z, reach);
  }

  /// Number of emitters received at z: #{i : g_i(z) >= beta'}.
  int h(const Point2<Scalar>& z) const {
    int count = 0;
    for (std::size_t j : reception_candidates(z)) {
      if (g(j, z) >= params_.beta_prime()) ++count;
    }
    return count;
  }

 private:
  Scalar estimate_spacing() const {
    if (set_.size() < 2) return Scalar(0);
    GridIndex<Scalar> probe(set_.positions, std::sqrt(set_.window.area() / static_cast<Scalar>(set_.size())));
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 0; k < set_.size(); ++k) {
      const auto n = probe.nearest(set_.positions[k], k);
      best = std::min(best, (set_.positions[n] - set_.positions[k]).norm());
    }
    return best;
  }

  Scalar resolve_radius() const {
    const auto& t = params_.truncation;
    if (t.radius) return *t.radius;
    const Scalar lambda = set_.nominal_density;
    if (!(lambda > Scalar(0)) || !(spacing_ > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
    const Scalar a = params_.alpha;
    // 2 pi lambda R^(2-a)/(a-2) = eps d^-a
    const Scalar r = std::pow(2 * std::numbers::pi_v<Scalar> * lambda * std::pow(spacing_, a) / ((a - 2) * t.epsilon),
                              Scalar(1) / (a - 2));
    return std::clamp(r, t.min_spacings * spacing_, t.max_spacings * spacing_);
  }

  EmitterSet<Scalar> set_;
  FieldParams<Scalar> params_;
  GridIndex<Scalar> index_;
  Scalar spacing_ = Scalar(0);
  Scalar density_ = Scalar(0);
  Scalar radius_ = std::numeric_limits<Scalar>::infinity();
};

using SirFieldd = SirField<double>;

}  // namespace loccap
