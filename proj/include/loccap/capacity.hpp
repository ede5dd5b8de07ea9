#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loccap/area_tracer.hpp"
#include "loccap/lattice.hpp"
#include "loccap/sir_field.hpp"

namespace loccap {

enum class Scheme { Square, Hexagonal, Triangular, SlottedAloha };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);
PatternKind pattern_of(Scheme scheme);
Scheme scheme_of(PatternKind kind);

/// Local capacity c = lambda * sigma of one scheme at one (beta, alpha).
struct CapacityResult {
  Scheme scheme = Scheme::SlottedAloha;
  double beta = 0;
  double alpha = 0;
  double lambda = 0;
  double sigma = 0;
  double c = 0;
  double ci_halfwidth = 0;  // 95% half-width; 0 for deterministic values
  bool ok = true;
  std::string error;        // set when !ok
};

struct CapacityConfig {
  double steps_per_spacing = 500;  // tracer delta_t = d / steps_per_spacing
  TracerConfigd tracer;            // delta_t is overwritten from steps_per_spacing
  TruncationPolicy<double> truncation;
  unsigned threads = 1;

  TracerConfigd tracer_for(double d) const {
    TracerConfigd t = tracer;
    t.delta_t = d / steps_per_spacing;
    return t;
  }
};

/// Smallest square window, centered at the origin, holding every interferer
/// of the central emitter plus a margin of three spacings.
Windowd grid_window(double d, const TruncationPolicy<double>& truncation);

/// Traces the reception area of the emitter closest to the window center and
/// multiplies it by the lattice's analytic density.
CapacityResult grid_capacity(PatternKind kind, double beta, double alpha, double d, const Windowd& window,
                             const CapacityConfig& config = {});
CapacityResult grid_capacity(PatternKind kind, double beta, double alpha, double d, const CapacityConfig& config = {});

/// Mean reception area of a slotted-ALOHA (Poisson) pattern:
/// (1/lambda) * sin(2 pi / alpha) / (2 pi / alpha) * beta^(-2/alpha).
double aloha_sigma(double lambda, double beta, double alpha);

/// Local capacity of slotted ALOHA; independent of lambda (recorded as 1).
CapacityResult aloha_capacity(double beta, double alpha);

struct McEstimate {
  double mean = 0;
  double half_width = 0;  // normal-approximation 95% half-width
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of the mean ALOHA reception area.
///
/// For an emitter at the origin, z is covered iff |z|^-alpha >= beta * I(z),
/// and I(z) is distributed like I(0) for a Poisson field. Hence
/// E[sigma] = E[ pi * (beta * I)^(-2/alpha) ]: each trial draws the
/// interference at a probe receiver and integrates coverage over the radius in
/// closed form. Interferer distances are drawn in increasing order from the
/// radial Poisson process; the field beyond `field_points` expected points is
/// replaced by its mean.
McEstimate mc_aloha_sigma(double lambda, double beta, double alpha, std::size_t trials, std::uint64_t seed,
                          double field_points = 2000);

/// Mean of h(z) over uniform samples in the primitive cell around the central
/// emitter of a lattice; estimates c directly.
McEstimate mc_grid_coverage(const EmitterSetd& set, double beta, double alpha, std::size_t samples,
                            std::uint64_t seed, const TruncationPolicy<double>& truncation = {});

enum class SweepParameter { Beta, Alpha };

struct SweepSpec {
  std::vector<Scheme> schemes;
  SweepParameter swept = SweepParameter::Beta;
  double fixed_value = 4.0;    // alpha when sweeping beta, beta when sweeping alpha
  std::vector<double> values;  // strictly increasing
  double d = 25.0;
  std::optional<Windowd> window;

  void validate() const;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// Default grids: beta in [1.5, 100] at alpha = 4, or alpha in [2.5, 100] at
/// beta = 10, 21 log-spaced points each.
SweepSpec default_sweep(SweepParameter swept, std::vector<Scheme> schemes);

/// One CapacityResult per (scheme, swept value), schemes outermost. Grid
/// failures are recorded with ok = false rather than thrown.
std::vector<CapacityResult> run_sweep(const SweepSpec& spec, const CapacityConfig& config = {});

}  // namespace loccap
