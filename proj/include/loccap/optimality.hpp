#pragma once

#include <string_view>
#include <vector>

#include "loccap/area_tracer.hpp"
#include "loccap/sir_field.hpp"

namespace loccap {

/// Perturbation steps and integration region for the derivatives of U.
struct DiffConfig {
  double delta_x = 0.1;
  double delta_y = 0.1;
  Windowd region = Windowd::square(2500);
  // Emitters within influence_spacings * d of the probed emitter are re-traced
  // for every perturbation; all other areas are reused.
  double influence_spacings = 10;
  TracerConfigd tracer;
  unsigned threads = 1;

  void validate() const;
};

/// U = integral over the region of h, assembled from disjoint reception areas.
struct UIntegral {
  double U = 0;
  std::size_t emitters = 0;  // areas that intersect the region
  std::size_t clipped = 0;   // of which straddle its edge
};

/// Requires beta > 1 and emitter i at the region center.
UIntegral integrate_U(const SirFieldd& field, std::size_t i, const Windowd& region, const TracerConfigd& tracer,
                      unsigned threads = 1);

/// U as a function of the displacement of one emitter. The unperturbed areas
/// are traced once; a displacement only re-traces the emitters near the probe.
class PerturbedU {
 public:
  PerturbedU(const SirFieldd& field, std::size_t i, const DiffConfig& config);

  double base() const { return far_ + near_base_; }
  /// Contribution of the re-traced emitters after moving emitter i by `shift`.
  double near(const Vector2d& shift) const;
  double operator()(const Vector2d& shift) const { return far_ + near(shift); }

  std::size_t retraced() const { return locals_.size(); }
  std::size_t total() const { return total_; }

 private:
  const SirFieldd& field_;
  std::size_t probe_;
  DiffConfig config_;
  std::vector<LocalField<double>> locals_;
  double far_ = 0;
  double near_base_ = 0;
  std::size_t total_ = 0;
};

enum class Classification { LocalMax, LocalMin, Saddle, Degenerate };
std::string_view to_string(Classification c);

/// Central-difference derivatives of U with respect to one emitter's position.
/// U is in m^2, first derivatives in m^2/m, second derivatives in m^2/m^2.
struct HessianReport {
  double U = 0;
  double Ux = 0, Uy = 0;
  double Uxx = 0, Uxy = 0, Uyx = 0, Uyy = 0;
  double detH = 0;
  Classification classification = Classification::Degenerate;
  double delta_x = 0, delta_y = 0;
  std::size_t retraced = 0;
  std::size_t emitters = 0;
};

Classification classify(double uxx, double det_h);

struct Gradient {
  double Ux = 0;
  double Uy = 0;
};

Gradient gradient_U(const SirFieldd& field, std::size_t i, const DiffConfig& diff);
Gradient gradient_U(const PerturbedU& u, const DiffConfig& diff);

/// Five-point stencils for Uxx and Uyy, four-point cross stencil for Uxy.
HessianReport hessian_U(const SirFieldd& field, std::size_t i, const DiffConfig& diff);
HessianReport hessian_U(const PerturbedU& u, const DiffConfig& diff);

/// Named generators for the linear-response check.
enum class LinearGenerator { Identity, Rotation, Shear, Stretch };
std::string_view to_string(LinearGenerator g);
LinearGenerator parse_linear_generator(std::string_view name);
Matrix2d generator_matrix(LinearGenerator g);

/// Response of sigma_0 to z -> (I + tA) z applied to every emitter.
struct LinearResponseReport {
  Matrix2d A = Matrix2d::Zero();
  double t_step = 0;
  double sigma0 = 0;
  double d_sigma_dt = 0;  // central difference in t
  double predicted = 0;   // sigma0 * tr(A), the value when D = sigma0 I
  Matrix2d D = Matrix2d::Zero();  // d sigma0 / dA, one central difference per entry
};

LinearResponseReport linear_response(const SirFieldd& field, std::size_t i, const Matrix2d& a, double t_step,
                                     const TracerConfigd& tracer, bool estimate_d = true);

}  // namespace loccap
