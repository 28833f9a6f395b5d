#pragma once

#include "freespec/ovcauchy.hpp"

#include <nlohmann/json_fwd.hpp>

namespace freespec {

// Smooth compactly supported test function built from the exp(-1/t)
// mollifier: identically 1 on [center-plateau, center+plateau], 0 outside
// [center-support, center+support].
struct TestFunction {
  enum class Kind { Bump, PlateauBump, ConstantWindow };
  Kind kind = Kind::Bump;
  double center = 0.0;
  double plateau = 0.0;
  double support = 1.0;

  double operator()(double x) const;
  double lo() const { return center - support; }
  double hi() const { return center + support; }

  static TestFunction bump(double center, double support);
  static TestFunction plateau_bump(double center, double plateau, double support);
  // == 1 on [a,b], 0 outside [a - shoulder, b + shoulder].
  static TestFunction window(double a, double b, double shoulder = 0.5);

  nlohmann::json to_json() const;
};

struct DensityGrid {
  std::vector<double> xs;
  std::vector<double> rho;       // clamped at 0
  std::vector<double> rho_raw;   // signed extrapolant; mass integrals use this
  std::vector<double> y_used;    // extrapolation schedule
  double mass = 0.0;             // trapezoid integral of the clamped density
  double min_raw = 0.0;          // most negative pre-clamp value
  int solver_failures = 0;
};

struct DensityOptions {
  std::vector<double> y_schedule = {0.05, 0.025, 0.0125};
  double tol = 1e-10;
  int threads = 1;
  int chunk = 64;  // deterministic warm-start chunking, thread-count invariant
};

// Stieltjes inversion rho(x) = -(1/pi) Im g(x+iy) extrapolated y -> 0 by
// two-level Richardson (schedule ratios 2). Aborts when more than 1% of the
// grid points fail to solve.
DensityGrid density(const LinearPencil& pencil, const std::vector<double>& xs,
                    const DensityOptions& opt = {});

struct SupportComponents {
  std::vector<std::pair<double, double>> intervals;
  std::vector<double> masses;
  double eps0 = 0.0;  // minimal gap, +inf-like large value for one component
  int m = 1;
  double mass_total = 0.0;
};

struct SupportOptions {
  double grid_step = 0.005;
  double rho_thresh = 1e-4;
  double resolution = 1e-3;  // endpoint bisection target
  DensityOptions density_opt;
  // Sharper schedule for endpoint bisection; keeps the spurious tail of the
  // extrapolated density below the endpoint tolerance.
  std::vector<double> y_refine = {0.02, 0.01, 0.005};
};

SupportComponents support_components(const MatrixNCPoly& p, const SupportOptions& opt = {});
SupportComponents support_components(const LinearPencil& pencil, double bound,
                                     const SupportOptions& opt = {});

struct IntegerMassRow {
  std::pair<double, double> interval;
  double mass;
  double mass_times_m;
  int nearest_integer;
  bool pass;
};

std::vector<IntegerMassRow> integer_mass_check(const SupportComponents& sc, double tol = 5e-3);

// Quadrature of phi * rho; the grid must cover supp(phi).
double trace_phi(const DensityGrid& grid, const TestFunction& phi);

nlohmann::json support_to_json(const SupportComponents& sc);

}  // namespace freespec
