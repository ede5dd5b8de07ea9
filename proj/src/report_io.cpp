#include "loccap/report_io.hpp"

#include <cmath>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loccap {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(9);
  os << v;
  return os.str();
}

void write_emitters_csv(std::ostream& os, const EmitterSetd& set) {
  os << "x,y\n";
  for (const auto& p : set.positions) os << format_number(p.x()) << ',' << format_number(p.y()) << '\n';
}

std::vector<Point2d> read_emitters_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y", 0) != 0) throw std::runtime_error("emitter CSV must start with x,y");
  std::vector<Point2d> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    double x = 0, y = 0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') throw std::runtime_error("bad emitter CSV row: " + line);
    pts.emplace_back(x, y);
  }
  return pts;
}

void write_emitters_sidecar(std::ostream& os, const EmitterSetd& set) {
  os << "kind = " << to_string(set.kind) << '\n';
  os << "count = " << set.size() << '\n';
  if (set.spacing) os << "d = " << format_number(*set.spacing) << '\n';
  os << "density = " << format_number(set.nominal_density) << '\n';
  os << "window_center_x = " << format_number(set.window.center.x()) << '\n';
  os << "window_center_y = " << format_number(set.window.center.y()) << '\n';
  os << "window_half_width = " << format_number(set.window.half_width) << '\n';
  os << "window_half_height = " << format_number(set.window.half_height) << '\n';
  if (set.seed) os << "seed = " << *set.seed << '\n';
}

std::map<std::string, std::string> read_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_boundary_csv(std::ostream& os, const ReceptionAread& area) {
  os << "k,x,y,sir_residual\n";
  for (std::size_t k = 0; k < area.boundary.size(); ++k) {
    os << k << ',' << format_number(area.boundary[k].x()) << ',' << format_number(area.boundary[k].y()) << ','
       << format_number(area.residuals[k]) << '\n';
  }
}

void write_area_report(std::ostream& os, const ReceptionAread& area, double beta, double alpha) {
  os << "emitter = " << area.emitter << '\n';
  os << "emitter_x = " << format_number(area.center.x()) << '\n';
  os << "emitter_y = " << format_number(area.center.y()) << '\n';
  os << "beta = " << format_number(beta) << '\n';
  os << "alpha = " << format_number(alpha) << '\n';
  os << "delta_t = " << format_number(area.delta_t) << '\n';
  os << "vertices = " << area.boundary.size() << '\n';
  os << "closed = " << (area.closed ? "true" : "false") << '\n';
  os << "sigma = " << format_number(area.sigma) << '\n';
  os << "sigma_contour = " << format_number(area.sigma_contour) << '\n';
  os << "sigma_polygon = " << format_number(area.sigma_polygon) << '\n';
  os << "max_sir_residual = " << format_number(area.max_residual) << '\n';
}

void write_capacity_csv(std::ostream& os, const std::vector<CapacityResult>& rows) {
  os << "scheme,beta,alpha,lambda,sigma,c,ci_halfwidth\n";
  for (const auto& r : rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    os << to_string(r.scheme) << ',' << format_number(r.beta) << ',' << format_number(r.alpha) << ','
       << format_number(r.lambda) << ',' << format_number(r.ok ? r.sigma : nan) << ','
       << format_number(r.ok ? r.c : nan) << ',' << format_number(r.ci_halfwidth) << '\n';
  }
}

void write_sweep_table(std::ostream& os, const SweepSpec& spec, const std::vector<CapacityResult>& rows) {
  const std::size_t nv = spec.values.size();
  os << "# " << (spec.swept == SweepParameter::Beta ? "beta" : "alpha");
  for (auto s : spec.schemes) os << ' ' << to_string(s);
  os << "\n# fixed " << (spec.swept == SweepParameter::Beta ? "alpha" : "beta") << " = "
     << format_number(spec.fixed_value) << '\n';
  for (std::size_t v = 0; v < nv; ++v) {
    os << format_number(spec.values[v]);
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      const auto& r = rows[s * nv + v];
      os << ' ' << format_number(r.ok ? r.c : std::numeric_limits<double>::quiet_NaN());
    }
    os << '\n';
  }
}

void write_hessian_csv(std::ostream& os, const std::vector<std::pair<std::string, HessianReport>>& rows) {
  os << "pattern,Ux,Uy,Uxx,Uxy,Uyy,detH,classification\n";
  for (const auto& [label, r] : rows) {
    os << label << ',' << format_number(r.Ux) << ',' << format_number(r.Uy) << ',' << format_number(r.Uxx) << ','
       << format_number(r.Uxy) << ',' << format_number(r.Uyy) << ',' << format_number(r.detH) << ','
       << to_string(r.classification) << '\n';
  }
}

void write_hessian_report(std::ostream& os, const std::string& label, const HessianReport& r) {
  os << "[" << label << "]\n";
  os << "U = " << format_number(r.U) << "  # m^2\n";
  os << "Ux = " << format_number(r.Ux) << "  # m^2/m\n";
  os << "Uy = " << format_number(r.Uy) << "  # m^2/m\n";
  os << "Uxx = " << format_number(r.Uxx) << "  # m^2/m^2\n";
  os << "Uxy = " << format_number(r.Uxy) << "  # m^2/m^2\n";
  os << "Uyx = " << format_number(r.Uyx) << "  # m^2/m^2\n";
  os << "Uyy = " << format_number(r.Uyy) << "  # m^2/m^2\n";
  os << "detH = " << format_number(r.detH) << '\n';
  os << "classification = " << to_string(r.classification) << '\n';
  os << "delta_x = " << format_number(r.delta_x) << '\n';
  os << "delta_y = " << format_number(r.delta_y) << '\n';
  os << "retraced = " << r.retraced << '\n';
  os << "emitters = " << r.emitters << '\n';
}

void write_linear_response_csv(std::ostream& os,
                               const std::vector<std::pair<std::string, LinearResponseReport>>& rows) {
  os << "label,A_xx,A_xy,A_yx,A_yy,t_step,sigma0,d_sigma_dt,predicted,D_xx,D_xy,D_yx,D_yy\n";
  for (const auto& [label, r] : rows) {
    os << label << ',' << format_number(r.A(0, 0)) << ',' << format_number(r.A(0, 1)) << ','
       << format_number(r.A(1, 0)) << ',' << format_number(r.A(1, 1)) << ',' << format_number(r.t_step) << ','
       << format_number(r.sigma0) << ',' << format_number(r.d_sigma_dt) << ',' << format_number(r.predicted) << ','
       << format_number(r.D(0, 0)) << ',' << format_number(r.D(0, 1)) << ',' << format_number(r.D(1, 0)) << ','
       << format_number(r.D(1, 1)) << '\n';
  }
}

void write_linear_response_report(std::ostream& os, const std::string& label, const LinearResponseReport& r) {
  os << "[" << label << "]\n";
  os << "A = [[" << format_number(r.A(0, 0)) << ", " << format_number(r.A(0, 1)) << "], ["
     << format_number(r.A(1, 0)) << ", " << format_number(r.A(1, 1)) << "]]\n";
  os << "t_step = " << format_number(r.t_step) << '\n';
  os << "sigma0 = " << format_number(r.sigma0) << "  # m^2\n";
  os << "d_sigma_dt = " << format_number(r.d_sigma_dt) << "  # m^2\n";
  os << "predicted = " << format_number(r.predicted) << "  # sigma0 * tr(A)\n";
  os << "D = [[" << format_number(r.D(0, 0)) << ", " << format_number(r.D(0, 1)) << "], ["
     << format_number(r.D(1, 0)) << ", " << format_number(r.D(1, 1)) << "]]\n";
}

}  // namespace loccap
