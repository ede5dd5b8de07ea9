#include "loccap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "loccap/area_tracer.hpp"
#include "loccap/capacity.hpp"
#include "loccap/lattice.hpp"
#include "loccap/optimality.hpp"
#include "loccap/parallel.hpp"
#include "loccap/report_io.hpp"
#include "loccap/rng.hpp"
#include "loccap/sir_field.hpp"

namespace loccap::cli {

namespace fs = std::filesystem;

namespace {

bool is_one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return true;
  }
  return false;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::vector<PatternKind> lattice_kinds(const std::string& kind) {
  if (kind == "all") return {PatternKind::Square, PatternKind::Hexagonal, PatternKind::Triangular};
  const PatternKind k = parse_pattern_kind(kind);
  require(is_lattice(k), "this subcommand needs a lattice kind (square, hexagonal, triangular or all)");
  return {k};
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.insert(out.end(), {Scheme::Square, Scheme::Hexagonal, Scheme::Triangular, Scheme::SlottedAloha});
    } else {
      out.push_back(parse_scheme(n));
    }
  }
  return out;
}

TruncationPolicy<double> truncation_of(const RunConfig& c) {
  TruncationPolicy<double> t;
  t.radius = c.truncation_radius;
  t.tail_correction = c.tail_correction;
  return t;
}

TracerConfigd tracer_of(const RunConfig& c, double spacing) {
  TracerConfigd t = TracerConfigd::for_spacing(spacing);
  if (c.delta_t) t.delta_t = *c.delta_t;
  t.newton_tol = c.newton_tol;
  t.newton_max_iter = c.newton_max_iter;
  t.max_steps = c.max_steps;
  return t;
}

unsigned threads_of(const RunConfig& c) { return c.threads == 0 ? default_thread_count() : c.threads; }

std::optional<Windowd> window_of(const RunConfig& c) {
  if (!c.window) return std::nullopt;
  const double h = c.window_height ? *c.window_height : *c.window;
  return Windowd(Point2d::Zero(), *c.window / 2, h / 2);
}

bool wants_csv(const RunConfig& c) { return c.format != "text"; }
bool wants_text(const RunConfig& c) { return c.format != "csv"; }

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.imbue(std::locale::classic());
  return os;
}

fs::path prepare_output(const RunConfig& c) {
  const fs::path dir = output_directory(c);
  fs::create_directories(dir);
  return dir;
}

EmitterSetd build_emitters(const RunConfig& c, double default_window) {
  const PatternKind kind = parse_pattern_kind(c.kind);
  if (kind == PatternKind::Custom) {
    require(!c.emitters.empty(), "kind = custom needs an emitters CSV");
    std::ifstream is(c.emitters);
    if (!is) throw std::runtime_error("cannot read " + c.emitters);
    auto pts = read_emitters_csv(is);
    require(!pts.empty(), "emitters CSV has no rows");
    Windowd w;
    if (auto given = window_of(c)) {
      w = *given;
    } else {
      double xmin = pts[0].x(), xmax = xmin, ymin = pts[0].y(), ymax = ymin;
      for (const auto& p : pts) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
      }
      const double margin = std::max({xmax - xmin, ymax - ymin, 1.0});
      w = Windowd(Point2d((xmin + xmax) / 2, (ymin + ymax) / 2), (xmax - xmin) / 2 + margin,
                  (ymax - ymin) / 2 + margin);
    }
    return make_custom(std::move(pts), w, 0.0);
  }
  const Windowd w = window_of(c).value_or(Windowd::square(default_window));
  if (kind == PatternKind::Poisson) return sample_poisson(c.lambda, w, c.seed);
  return generate_grid(kind, c.d, w);
}

std::size_t probe_of(const RunConfig& c, const EmitterSetd& set) {
  if (c.emitter) {
    require(*c.emitter < set.size(), "emitter index out of range");
    return *c.emitter;
  }
  return set.closest_to(set.window.center);
}

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const PatternKind kind = parse_pattern_kind(c.kind);
  require(kind != PatternKind::Custom, "generate does not accept kind = custom");
  const double side = kind == PatternKind::Poisson ? 1000.0 : 100.0;
  const auto set = build_emitters(c, side);
  const fs::path dir = prepare_output(c);
  {
    auto os = open_output(dir / "emitters.csv");
    write_emitters_csv(os, set);
  }
  {
    auto os = open_output(dir / "emitters.meta");
    write_emitters_sidecar(os, set);
  }
  out << "kind = " << to_string(set.kind) << '\n';
  out << "count = " << set.size() << '\n';
  out << "density = " << format_number(set.nominal_density) << '\n';
  out << "output = " << (dir / "emitters.csv").string() << '\n';
  return 0;
}

int cmd_trace(const RunConfig& c, std::ostream& out) {
  const PatternKind kind = parse_pattern_kind(c.kind);
  double default_window = 1000;
  if (is_lattice(kind)) default_window = grid_window(c.d, truncation_of(c)).half_width * 2;
  const auto set = build_emitters(c, default_window);
  const SirFieldd field(set, FieldParamsd(c.alpha, c.beta, truncation_of(c)));
  const std::size_t i = probe_of(c, field.set());
  const auto tracer = tracer_of(c, field.spacing());
  const auto area = trace_boundary(field, i, tracer);

  const fs::path dir = prepare_output(c);
  if (wants_csv(c)) {
    auto os = open_output(dir / "boundary.csv");
    write_boundary_csv(os, area);
  }
  std::ostringstream report;
  report.imbue(std::locale::classic());
  write_area_report(report, area, c.beta, c.alpha);
  report << "interferers = " << field.local(i).interferer_count() << '\n';
  report << "truncation_radius = " << format_number(field.truncation_radius()) << '\n';
  if (c.debug) {
    TracerConfigd raw = tracer;
    raw.reproject = false;
    try {
      const auto drift = trace_boundary(field, i, raw);
      report << "debug_sigma_unprojected = " << format_number(drift.sigma) << '\n';
      report << "debug_max_residual_unprojected = " << format_number(drift.max_residual) << '\n';
    } catch (const TracerError& e) {
      report << "debug_sigma_unprojected = nan  # " << e.what() << '\n';
    }
  }
  if (wants_text(c)) {
    auto os = open_output(dir / "area.txt");
    os << report.str();
  }
  out << report.str();
  return 0;
}

int cmd_capacity(const RunConfig& c, std::ostream& out) {
  CapacityConfig cc;
  cc.truncation = truncation_of(c);
  cc.threads = threads_of(c);
  cc.tracer = tracer_of(c, c.d);
  if (c.delta_t) cc.steps_per_spacing = c.d / *c.delta_t;

  SweepSpec spec;
  const auto schemes = parse_schemes(c.schemes);
  if (c.sweep.empty()) {
    spec.schemes = schemes;
    spec.swept = SweepParameter::Beta;
    spec.fixed_value = c.alpha;
    spec.values = {c.beta};
  } else {
    const auto swept = c.sweep == "beta" ? SweepParameter::Beta : SweepParameter::Alpha;
    spec = default_sweep(swept, schemes);
    spec.fixed_value = swept == SweepParameter::Beta ? c.alpha : c.beta;
    if (!c.values.empty()) spec.values = c.values;
  }
  spec.d = c.d;
  spec.window = window_of(c);
  spec.validate();

  const auto rows = run_sweep(spec, cc);
  const fs::path dir = prepare_output(c);
  if (wants_csv(c)) {
    auto os = open_output(dir / "capacity.csv");
    write_capacity_csv(os, rows);
  }
  if (wants_text(c)) {
    auto os = open_output(dir / "capacity.dat");
    write_sweep_table(os, spec, rows);
  }
  write_capacity_csv(out, rows);
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++failed;
      out << "# failed: " << to_string(r.scheme) << " beta = " << format_number(r.beta)
          << " alpha = " << format_number(r.alpha) << ": " << r.error << '\n';
    }
  }
  return failed == 0 ? 0 : 1;
}

Windowd hessian_window(const RunConfig& c) {
  const auto trunc = truncation_of(c);
  const double reach = trunc.radius ? *trunc.radius : trunc.max_spacings * c.d;
  return Windowd::square(c.region + 2 * (reach + 3 * c.d));
}

int cmd_hessian(const RunConfig& c, std::ostream& out) {
  DiffConfig diff;
  diff.delta_x = c.delta_x;
  diff.delta_y = c.delta_y;
  diff.region = Windowd::square(c.region);
  diff.influence_spacings = c.influence;
  diff.tracer = tracer_of(c, c.d);
  diff.threads = threads_of(c);

  std::vector<std::pair<std::string, HessianReport>> rows;
  for (PatternKind kind : lattice_kinds(c.kind)) {
    const SirFieldd field(generate_grid(kind, c.d, hessian_window(c)), FieldParamsd(c.alpha, c.beta, truncation_of(c)));
    const std::size_t i = field.set().closest_to(Point2d::Zero());
    rows.emplace_back(std::string(to_string(kind)), hessian_U(field, i, diff));
  }
  const fs::path dir = prepare_output(c);
  if (wants_csv(c)) {
    auto os = open_output(dir / "hessian.csv");
    write_hessian_csv(os, rows);
  }
  std::ostringstream report;
  report.imbue(std::locale::classic());
  for (const auto& [label, r] : rows) write_hessian_report(report, label, r);
  if (wants_text(c)) {
    auto os = open_output(dir / "hessian.txt");
    os << report.str();
  }
  out << report.str();
  return 0;
}

int cmd_linresp(const RunConfig& c, std::ostream& out) {
  const Matrix2d a = generator_matrix(parse_linear_generator(c.A));
  const auto tracer = tracer_of(c, c.d);
  std::vector<std::pair<std::string, LinearResponseReport>> rows;
  for (PatternKind kind : lattice_kinds(c.kind)) {
    const SirFieldd field(generate_grid(kind, c.d, grid_window(c.d, truncation_of(c))),
                          FieldParamsd(c.alpha, c.beta, truncation_of(c)));
    const std::size_t i = field.set().closest_to(Point2d::Zero());
    rows.emplace_back(std::string(to_string(kind)), linear_response(field, i, a, c.t_step, tracer));
  }
  const fs::path dir = prepare_output(c);
  if (wants_csv(c)) {
    auto os = open_output(dir / "linresp.csv");
    write_linear_response_csv(os, rows);
  }
  std::ostringstream report;
  report.imbue(std::locale::classic());
  for (const auto& [label, r] : rows) {
    write_linear_response_report(report, label + " " + c.A, r);
    report << "relative_deviation = " << format_number(std::abs(r.d_sigma_dt - r.predicted) / (2 * r.sigma0))
           << "  # |d_sigma_dt - predicted| / (2 sigma0)\n";
  }
  if (wants_text(c)) {
    auto os = open_output(dir / "linresp.txt");
    os << report.str();
  }
  out << report.str();
  return 0;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

int cmd_validate(const RunConfig& c, std::ostream& out) {
  std::vector<Check> checks;
  auto record = [&](std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };
  const auto trunc = truncation_of(c);

  {
    const double D = c.d;
    const double k = std::pow(c.beta, 1 / c.alpha);
    const double r = k * D / (k * k - 1);
    const double exact = std::numbers::pi * r * r;
    const auto set = make_custom<double>({Point2d(0, 0), Point2d(D, 0)}, Windowd::square(4 * D), 0.0);
    const SirFieldd field(set, FieldParamsd(c.alpha, c.beta, trunc));
    const auto area = trace_boundary(field, 0, tracer_of(c, D));
    const double rel = std::abs(area.sigma - exact) / exact;
    record("apollonius", rel < 5e-3, "sigma = " + format_number(area.sigma) + " exact = " + format_number(exact));
  }
  {
    const double lambda = 1e-3;
    const double exact = aloha_sigma(lambda, c.beta, c.alpha);
    const auto mc = mc_aloha_sigma(lambda, c.beta, c.alpha, c.mc_trials, c.seed);
    const double rel = std::abs(mc.mean - exact) / exact;
    record("aloha-monte-carlo", rel < 0.03,
           "formula = " + format_number(exact) + " mc = " + format_number(mc.mean) + " +- " +
               format_number(mc.half_width));
  }
  {
    const SirFieldd field(generate_grid(PatternKind::Triangular, c.d, grid_window(c.d, trunc)),
                          FieldParamsd(c.alpha, c.beta, trunc));
    const std::size_t i = field.set().closest_to(Point2d::Zero());
    const auto local = field.local(i);
    Rng rng(c.seed);
    double worst = 0;
    for (int n = 0; n < 100; ++n) {
      const Point2d z(rng.uniform(-c.d, c.d), rng.uniform(-c.d, c.d));
      if ((z - local.emitter()).norm() < 0.05 * c.d || (z - local.nearest_interferer()).norm() < 0.05 * c.d) {
        --n;
        continue;
      }
      const Vector2d g = local.sir_gradient(z);
      const double h = 1e-6 * c.d;
      const Vector2d fd((local.sir(z + Vector2d(h, 0)) - local.sir(z - Vector2d(h, 0))) / (2 * h),
                        (local.sir(z + Vector2d(0, h)) - local.sir(z - Vector2d(0, h))) / (2 * h));
      worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-300));
    }
    record("sir-gradient", worst < 1e-5, "max relative error = " + format_number(worst));
  }
  CapacityConfig cc;
  cc.truncation = trunc;
  cc.tracer = tracer_of(c, c.d);
  for (PatternKind kind : {PatternKind::Square, PatternKind::Hexagonal, PatternKind::Triangular}) {
    const auto traced = grid_capacity(kind, c.beta, c.alpha, c.d, cc);
    const auto set = generate_grid(kind, c.d, grid_window(c.d, trunc));
    const auto mc = mc_grid_coverage(set, c.beta, c.alpha, c.mc_samples, c.seed, trunc);
    const double diff = std::abs(traced.c - mc.mean);
    record("coverage-" + std::string(to_string(kind)), diff < std::max(0.01 * traced.c, mc.half_width),
           "traced c = " + format_number(traced.c) + " mc = " + format_number(mc.mean) + " +- " +
               format_number(mc.half_width));
  }

  std::ostringstream report;
  report.imbue(std::locale::classic());
  bool all = true;
  for (const auto& ch : checks) {
    all = all && ch.pass;
    report << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  " << ch.detail << '\n';
  }
  const fs::path dir = prepare_output(c);
  {
    auto os = open_output(dir / "validate.txt");
    os << report.str();
  }
  out << report.str();
  return all ? 0 : 1;
}

void register_options(CLI::App& app, RunConfig& c) {
  app.add_option("--kind", c.kind, "square, hexagonal, triangular, poisson, custom (or all)");
  app.add_option("--schemes", c.schemes, "square, hexagonal, triangular, aloha or all")->delimiter(',');
  app.add_option("--beta", c.beta, "SIR threshold");
  app.add_option("--alpha", c.alpha, "path-loss exponent");
  app.add_option("--d", c.d, "lattice spacing (m)");
  app.add_option("--window", c.window, "window side (m)");
  app.add_option("--window_height", c.window_height, "window height (m), default = side");
  app.add_option("--lambda", c.lambda, "Poisson intensity (1/m^2)");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--emitters", c.emitters, "emitter CSV for kind = custom");
  app.add_option("--emitter", c.emitter, "index of the traced emitter");
  app.add_option("--delta_t", c.delta_t, "tracer arc step (m), default d/500");
  app.add_option("--newton_tol", c.newton_tol, "tracer Newton tolerance on |S - beta|");
  app.add_option("--newton_max_iter", c.newton_max_iter, "tracer Newton iteration cap");
  app.add_option("--max_steps", c.max_steps, "tracer step cap");
  app.add_option("--truncation_radius", c.truncation_radius, "interference truncation radius (m)");
  app.add_option("--tail_correction", c.tail_correction, "add the mean interference beyond the radius");
  app.add_flag("--debug", c.debug, "also trace without re-projection and report the drift");
  app.add_option("--sweep", c.sweep, "beta or alpha");
  app.add_option("--values", c.values, "swept values, comma separated")->delimiter(',');
  app.add_option("--delta_x", c.delta_x, "Hessian step in x (m)");
  app.add_option("--delta_y", c.delta_y, "Hessian step in y (m)");
  app.add_option("--region", c.region, "side of the integration region (m)");
  app.add_option("--influence", c.influence, "re-trace radius in spacings");
  app.add_option("--A", c.A, "identity, rotation, shear or stretch");
  app.add_option("--t_step", c.t_step, "linear-response step");
  app.add_option("--mc_trials", c.mc_trials, "ALOHA Monte-Carlo trials");
  app.add_option("--mc_samples", c.mc_samples, "grid coverage samples");
  app.add_option("--output", c.output, "output directory");
  app.add_option("--format", c.format, "csv, text or both");
  app.add_option("--threads", c.threads, "worker threads, 0 = machine parallelism");
}

}  // namespace

void RunConfig::validate() const {
  require(is_one_of(subcommand, {"generate", "trace", "capacity", "hessian", "linresp", "validate"}),
          "unknown subcommand: " + subcommand);
  if (kind != "all") parse_pattern_kind(kind);
  parse_schemes(schemes);
  require(beta > 0 && std::isfinite(beta), "beta must be positive");
  require(alpha > 2 && std::isfinite(alpha), "alpha must exceed 2");
  require(d > 0 && std::isfinite(d), "d must be positive");
  require(!window || *window > 0, "window must be positive");
  require(!window_height || *window_height > 0, "window_height must be positive");
  require(!window_height || window, "window_height needs window");
  require(lambda > 0, "lambda must be positive");
  require(!delta_t || *delta_t > 0, "delta_t must be positive");
  require(newton_tol > 0, "newton_tol must be positive");
  require(newton_max_iter >= 1, "newton_max_iter must be at least 1");
  require(max_steps >= 4, "max_steps must be at least 4");
  require(!truncation_radius || *truncation_radius > 0, "truncation_radius must be positive");
  require(is_one_of(sweep, {"", "beta", "alpha"}), "sweep must be beta or alpha");
  for (double v : values) require(v > 0, "swept values must be positive");
  require(delta_x > 0 && delta_y > 0, "delta_x and delta_y must be positive");
  require(region > 0, "region must be positive");
  require(influence > 0, "influence must be positive");
  parse_linear_generator(A);
  require(t_step > 0 && t_step < 0.5, "t_step must lie in (0, 0.5)");
  require(mc_trials >= 10000, "mc_trials must be at least 10000");
  require(mc_samples >= 10000, "mc_samples must be at least 10000");
  require(is_one_of(format, {"csv", "text", "both"}), "format must be csv, text or both");
  if (subcommand == "hessian" || subcommand == "linresp") lattice_kinds(kind);
  if (subcommand == "hessian") {
    require(delta_x < d && delta_y < d, "Hessian steps must be below the spacing");
    require(region > 4 * d, "region must span several spacings");
  }
}

fs::path output_directory(const RunConfig& config) {
  if (!config.output.empty()) return config.output;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "loccap-out";
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    if (config.subcommand == "generate") return cmd_generate(config, out);
    if (config.subcommand == "trace") return cmd_trace(config, out);
    if (config.subcommand == "capacity") return cmd_capacity(config, out);
    if (config.subcommand == "hessian") return cmd_hessian(config, out);
    if (config.subcommand == "linresp") return cmd_linresp(config, out);
    return cmd_validate(config, out);
  } catch (const TracerError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Local capacity of wireless emitter patterns", "loccap"};
  app.set_config("--config", "", "key = value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  register_options(app, config);
  const char* names[][2] = {{"generate", "write an emitter pattern"},
                            {"trace", "trace one reception area"},
                            {"capacity", "local capacity per scheme, optionally swept"},
                            {"hessian", "derivatives of U with respect to one emitter"},
                            {"linresp", "response of sigma to a linear map"},
                            {"validate", "oracle cross-checks"}};
  for (const auto& [name, help] : names) {
    app.add_subcommand(name, help)->fallthrough();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return execute(config, out, err);
}

}  // namespace loccap::cli
