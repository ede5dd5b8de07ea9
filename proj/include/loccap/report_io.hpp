#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "loccap/area_tracer.hpp"
#include "loccap/capacity.hpp"
#include "loccap/lattice.hpp"
#include "loccap/optimality.hpp"

namespace loccap {

/// 9 significant digits, '.' as decimal separator whatever the global locale.
std::string format_number(double v);

/// `x,y` header then one row per emitter.
void write_emitters_csv(std::ostream& os, const EmitterSetd& set);
std::vector<Point2d> read_emitters_csv(std::istream& is);

/// Pattern metadata as `key = value` lines.
void write_emitters_sidecar(std::ostream& os, const EmitterSetd& set);
std::map<std::string, std::string> read_key_values(std::istream& is);

/// `k,x,y,sir_residual`, one row per boundary vertex.
void write_boundary_csv(std::ostream& os, const ReceptionAread& area);
void write_area_report(std::ostream& os, const ReceptionAread& area, double beta, double alpha);

/// `scheme,beta,alpha,lambda,sigma,c,ci_halfwidth`; failed points print `nan`.
void write_capacity_csv(std::ostream& os, const std::vector<CapacityResult>& rows);

/// Whitespace-separated table: swept value, then c for each scheme.
void write_sweep_table(std::ostream& os, const SweepSpec& spec, const std::vector<CapacityResult>& rows);

/// Columns in the order Ux, Uy, Uxx, Uxy, Uyy, detH.
void write_hessian_csv(std::ostream& os, const std::vector<std::pair<std::string, HessianReport>>& rows);
void write_hessian_report(std::ostream& os, const std::string& label, const HessianReport& r);

void write_linear_response_csv(std::ostream& os,
                               const std::vector<std::pair<std::string, LinearResponseReport>>& rows);
void write_linear_response_report(std::ostream& os, const std::string& label, const LinearResponseReport& r);

}  // namespace loccap
