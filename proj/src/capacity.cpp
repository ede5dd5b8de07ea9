#include "loccap/capacity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "loccap/parallel.hpp"
#include "loccap/rng.hpp"

namespace loccap {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Square: return "square";
    case Scheme::Hexagonal: return "hexagonal";
    case Scheme::Triangular: return "triangular";
    case Scheme::SlottedAloha: return "aloha";
  }
  return "aloha";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "aloha" || name == "slotted-aloha") return Scheme::SlottedAloha;
  return scheme_of(parse_pattern_kind(name));
}

PatternKind pattern_of(Scheme scheme) {
  switch (scheme) {
    case Scheme::Square: return PatternKind::Square;
    case Scheme::Hexagonal: return PatternKind::Hexagonal;
    case Scheme::Triangular: return PatternKind::Triangular;
    case Scheme::SlottedAloha: return PatternKind::Poisson;
  }
  return PatternKind::Poisson;
}

Scheme scheme_of(PatternKind kind) {
  switch (kind) {
    case PatternKind::Square: return Scheme::Square;
    case PatternKind::Hexagonal: return Scheme::Hexagonal;
    case PatternKind::Triangular: return Scheme::Triangular;
    case PatternKind::Poisson: return Scheme::SlottedAloha;
    default: throw std::invalid_argument("custom patterns have no capacity scheme");
  }
}

Windowd grid_window(double d, const TruncationPolicy<double>& truncation) {
  const double reach = truncation.radius ? *truncation.radius : truncation.max_spacings * d;
  return Windowd::square(2 * (reach + 3 * d));
}

CapacityResult grid_capacity(PatternKind kind, double beta, double alpha, double d, const Windowd& window,
                             const CapacityConfig& config) {
  if (!is_lattice(kind)) throw std::invalid_argument("grid_capacity needs a lattice kind");
  if (!(beta > 1)) {
    throw TracerError(TracerError::Kind::Unsupported, "unsupported-by-tracer: grid capacity needs beta > 1");
  }
  const FieldParamsd params(alpha, beta, config.truncation);
  SirFieldd field(generate_grid(kind, d, window), params);
  if (!window.contains_disk(window.center, field.truncation_radius() + d)) {
    throw std::invalid_argument("window too small: the central emitter's interferer disk crosses the window edge");
  }
  const std::size_t center = field.set().closest_to(window.center);
  const auto area = trace_boundary(field, center, config.tracer_for(d));

  CapacityResult r;
  r.scheme = scheme_of(kind);
  r.beta = beta;
  r.alpha = alpha;
  r.lambda = analytic_density(kind, d);
  r.sigma = area.sigma;
  r.c = r.lambda * r.sigma;
  return r;
}

CapacityResult grid_capacity(PatternKind kind, double beta, double alpha, double d, const CapacityConfig& config) {
  return grid_capacity(kind, beta, alpha, d, grid_window(d, config.truncation), config);
}

double aloha_sigma(double lambda, double beta, double alpha) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (!(alpha > 2)) throw std::invalid_argument("alpha must exceed 2");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  const double x = 2 * std::numbers::pi / alpha;
  return std::sin(x) / x * std::pow(beta, -2 / alpha) / lambda;
}

CapacityResult aloha_capacity(double beta, double alpha) {
  CapacityResult r;
  r.scheme = Scheme::SlottedAloha;
  r.beta = beta;
  r.alpha = alpha;
  r.lambda = 1;
  r.sigma = aloha_sigma(1, beta, alpha);
  r.c = r.sigma;
  return r;
}

namespace {

McEstimate summarize(double sum, double sum_sq, std::size_t n) {
  McEstimate e;
  e.samples = n;
  e.mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq / static_cast<double>(n) - e.mean * e.mean)) * static_cast<double>(n) /
                     static_cast<double>(n - 1);
  e.half_width = 1.96 * std::sqrt(var / static_cast<double>(n));
  return e;
}

}  // namespace

McEstimate mc_aloha_sigma(double lambda, double beta, double alpha, std::size_t trials, std::uint64_t seed,
                          double field_points) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (!(alpha > 2)) throw std::invalid_argument("alpha must exceed 2");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (trials < 10000) throw std::invalid_argument("mc_aloha_sigma needs at least 10^4 trials");
  Rng rng(seed);
  const double pi = std::numbers::pi;
  // points are generated in "area units" a = pi lambda r^2, so r^-alpha = (a / (pi lambda))^(-alpha/2)
  const double field_radius = std::sqrt(field_points / (pi * lambda));
  const double far_mean = tail_bound(lambda, field_radius, alpha);
  const double half = alpha / 2;
  double sum = 0, sum_sq = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double interference = far_mean;
    double a = rng.exponential();
    while (a < field_points) {
      interference += std::pow(a / (pi * lambda), -half);
      a += rng.exponential();
    }
    const double covered = pi * std::pow(beta * interference, -2 / alpha);
    sum += covered;
    sum_sq += covered * covered;
  }
  return summarize(sum, sum_sq, trials);
}

McEstimate mc_grid_coverage(const EmitterSetd& set, double beta, double alpha, std::size_t samples,
                            std::uint64_t seed, const TruncationPolicy<double>& truncation) {
  if (!is_lattice(set.kind) || !set.spacing) throw std::invalid_argument("mc_grid_coverage needs a lattice set");
  if (samples < 10000) throw std::invalid_argument("mc_grid_coverage needs at least 10^4 samples");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  const FieldParamsd params(alpha, beta, truncation);
  const SirFieldd field(set, params);
  const auto geom = lattice_geometry(set.kind, *set.spacing);
  const std::size_t center = set.closest_to(set.window.center);
  const Point2d anchor = set[center] - (geom.basis.col(0) + geom.basis.col(1)) / 2;
  const double beta_prime = params.beta_prime();

  std::unordered_map<std::size_t, LocalField<double>> cache;
  auto local = [&](std::size_t j) -> const LocalField<double>& {
    auto it = cache.find(j);
    if (it == cache.end()) it = cache.emplace(j, field.local(j)).first;
    return it->second;
  };

  Rng rng(seed);
  double sum = 0, sum_sq = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double u = rng.uniform01();
    const double v = rng.uniform01();
    const Point2d z = anchor + u * geom.basis.col(0) + v * geom.basis.col(1);
    int h = 0;
    for (std::size_t j : field.reception_candidates(z)) {
      if (local(j).g(z) >= beta_prime) ++h;
    }
    sum += h;
    sum_sq += static_cast<double>(h) * h;
  }
  return summarize(sum, sum_sq, samples);
}

void SweepSpec::validate() const {
  if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) throw std::invalid_argument("swept values must be strictly increasing");
  }
  const double min_alpha = swept == SweepParameter::Alpha ? values.front() : fixed_value;
  if (!(min_alpha > 2)) throw std::invalid_argument("alpha must exceed 2");
  const double min_beta = swept == SweepParameter::Beta ? values.front() : fixed_value;
  if (!(min_beta > 0)) throw std::invalid_argument("beta must be positive");
  if (!(d > 0)) throw std::invalid_argument("spacing d must be positive");
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw std::invalid_argument("bad log-spaced range");
  std::vector<double> v(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) v[k] = lo * std::exp(step * static_cast<double>(k));
  v.back() = hi;
  return v;
}

SweepSpec default_sweep(SweepParameter swept, std::vector<Scheme> schemes) {
  SweepSpec spec;
  spec.schemes = std::move(schemes);
  spec.swept = swept;
  if (swept == SweepParameter::Beta) {
    spec.fixed_value = 4.0;
    spec.values = log_spaced(1.5, 100, 21);
  } else {
    spec.fixed_value = 10.0;
    spec.values = log_spaced(2.5, 100, 21);
  }
  return spec;
}

std::vector<CapacityResult> run_sweep(const SweepSpec& spec, const CapacityConfig& config) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  std::vector<CapacityResult> out(spec.schemes.size() * nv);
  parallel_for(out.size(), config.threads, [&](std::size_t k) {
    const Scheme scheme = spec.schemes[k / nv];
    const double value = spec.values[k % nv];
    const double beta = spec.swept == SweepParameter::Beta ? value : spec.fixed_value;
    const double alpha = spec.swept == SweepParameter::Alpha ? value : spec.fixed_value;
    if (scheme == Scheme::SlottedAloha) {
      out[k] = aloha_capacity(beta, alpha);
      return;
    }
    try {
      CapacityConfig serial = config;
      serial.threads = 1;
      out[k] = spec.window ? grid_capacity(pattern_of(scheme), beta, alpha, spec.d, *spec.window, serial)
                           : grid_capacity(pattern_of(scheme), beta, alpha, spec.d, serial);
    } catch (const std::exception& e) {
      CapacityResult r;
      r.scheme = scheme;
      r.beta = beta;
      r.alpha = alpha;
      r.lambda = analytic_density(pattern_of(scheme), spec.d);
      r.sigma = r.c = std::numeric_limits<double>::quiet_NaN();
      r.ok = false;
      r.error = e.what();
      out[k] = r;
    }
  });
  return out;
}

}  // namespace loccap
