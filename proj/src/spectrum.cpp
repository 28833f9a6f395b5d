#include "freespec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <nlohmann/json.hpp>

#include "freespec/parallel.hpp"

namespace freespec {

namespace {

double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = mollifier(t);
  return a / (a + mollifier(1.0 - t));
}

}  // namespace

double TestFunction::operator()(double x) const {
  double d = std::abs(x - center);
  if (d >= support) return 0.0;
  if (d <= plateau) return 1.0;
  return smoothstep((support - d) / (support - plateau));
}

TestFunction TestFunction::bump(double center, double support) {
  if (support <= 0.0) throw config_error("bump: support must be positive");
  return {Kind::Bump, center, 0.0, support};
}

TestFunction TestFunction::plateau_bump(double center, double plateau, double support) {
  if (!(0.0 <= plateau && plateau < support))
    throw config_error("plateau_bump: need 0 <= plateau < support");
  return {Kind::PlateauBump, center, plateau, support};
}

TestFunction TestFunction::window(double a, double b, double shoulder) {
  if (b <= a || shoulder <= 0.0) throw config_error("window: need a < b and shoulder > 0");
  return {Kind::ConstantWindow, (a + b) / 2.0, (b - a) / 2.0, (b - a) / 2.0 + shoulder};
}

nlohmann::json TestFunction::to_json() const {
  const char* names[] = {"bump", "plateau-bump", "constant-window"};
  return {{"kind", names[static_cast<int>(kind)]},
          {"center", center},
          {"plateau", plateau},
          {"support", support}};
}

namespace {

// Warm-started sweep of g over the grid at fixed y. Chunk boundaries are
// fixed so results do not depend on the thread count.
std::vector<cdouble> sweep_g(const LinearPencil& P, const std::vector<double>& xs, double y,
                             double tol, int threads, int chunk,
                             std::vector<uint8_t>& failed) {
  int n = static_cast<int>(xs.size());
  std::vector<cdouble> out(n);
  int nchunks = (n + chunk - 1) / chunk;
  parallel_for(nchunks, threads, [&](int c) {
    int lo = c * chunk, hi = std::min(n, lo + chunk);
    CMat warm;
    bool have = false;
    for (int i = lo; i < hi; ++i) {
      try {
        out[i] = scalar_g(P, cdouble(xs[i], y), tol, have ? &warm : nullptr, &warm);
        have = true;
      } catch (const numeric_error&) {
        out[i] = cdouble(0, 0);
        failed[i] = 1;
        have = false;
      }
    }
  });
  return out;
}

std::vector<double> richardson_weights(size_t levels) {
  if (levels == 1) return {1.0};
  if (levels == 2) return {-1.0, 2.0};
  if (levels == 3) return {1.0 / 3.0, -2.0, 8.0 / 3.0};
  throw config_error("y schedule must have 1..3 levels");
}

void check_schedule(const std::vector<double>& ys) {
  if (ys.empty()) throw config_error("y schedule must be non-empty");
  for (size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] <= 0.0) throw config_error("y schedule must be positive");
    if (i > 0 && std::abs(ys[i - 1] / ys[i] - 2.0) > 1e-9)
      throw config_error("y schedule must decrease by ratio 2");
  }
}

}  // namespace

DensityGrid density(const LinearPencil& P, const std::vector<double>& xs,
                    const DensityOptions& opt) {
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw config_error("density: grid must be increasing");
  check_schedule(opt.y_schedule);
  auto w = richardson_weights(opt.y_schedule.size());

  int n = static_cast<int>(xs.size());
  std::vector<uint8_t> failed(n, 0);
  std::vector<std::vector<cdouble>> sweeps;
  for (double y : opt.y_schedule)
    sweeps.push_back(sweep_g(P, xs, y, opt.tol, opt.threads, opt.chunk, failed));

  DensityGrid grid;
  grid.xs = xs;
  grid.y_used = opt.y_schedule;
  grid.rho.resize(n);
  grid.rho_raw.resize(n);
  grid.min_raw = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (size_t s = 0; s < sweeps.size(); ++s) v += w[s] * (-sweeps[s][i].imag() / M_PI);
    grid.min_raw = std::min(grid.min_raw, v);
    grid.rho_raw[i] = v;
    grid.rho[i] = std::max(v, 0.0);
  }
  grid.solver_failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  if (grid.solver_failures > std::max(1, n / 100))
    throw numeric_error("density: " + std::to_string(grid.solver_failures) + "/" +
                        std::to_string(n) + " grid points failed to solve");
  double mass = 0.0;
  for (int i = 1; i < n; ++i)
    mass += 0.5 * (grid.rho[i] + grid.rho[i - 1]) * (xs[i] - xs[i - 1]);
  grid.mass = mass;
  return grid;
}

namespace {

std::vector<double> make_grid(double a, double b, double step) {
  std::vector<double> xs;
  int n = static_cast<int>(std::ceil((b - a) / step));
  xs.reserve(n + 1);
  for (int i = 0; i <= n; ++i) xs.push_back(a + (b - a) * i / n);
  return xs;
}

// Extrapolated density at a single point (used by endpoint bisection).
// warm_top chains the largest-y solve across successive probe points.
double rho_at(const LinearPencil& P, double x, const std::vector<double>& ys, double tol,
              CMat* warm_top) {
  auto w = richardson_weights(ys.size());
  double v = 0.0;
  CMat chain;
  bool have_chain = false;
  for (size_t s = 0; s < ys.size(); ++s) {
    const CMat* warm = nullptr;
    if (s == 0 && warm_top && warm_top->size() > 0)
      warm = warm_top;
    else if (have_chain)
      warm = &chain;
    CMat G;
    cdouble g = scalar_g(P, cdouble(x, ys[s]), tol, warm, &G);
    if (s == 0 && warm_top) *warm_top = G;
    chain = G;
    have_chain = true;
    v += w[s] * (-g.imag() / M_PI);
  }
  return v;
}

}  // namespace

SupportComponents support_components(const LinearPencil& P, double bound,
                                     const SupportOptions& opt) {
  // Coarse detection on the full bracket, then a fine pass over the hull of
  // what was found, then bisection refinement of each endpoint.
  double lo = -bound - 1.0, hi = bound + 1.0;
  DensityOptions dopt = opt.density_opt;

  auto detect_runs = [&](const DensityGrid& grid) {
    std::vector<std::pair<double, double>> runs;
    bool in = false;
    double start = 0.0;
    for (size_t i = 0; i < grid.xs.size(); ++i) {
      bool above = grid.rho[i] > opt.rho_thresh;
      if (above && !in) {
        in = true;
        start = grid.xs[i];
      } else if (!above && in) {
        in = false;
        runs.emplace_back(start, grid.xs[i - 1]);
      }
    }
    if (in) runs.emplace_back(start, grid.xs.back());
    // merge runs separated by less than 3 grid steps
    double step = grid.xs.size() > 1 ? grid.xs[1] - grid.xs[0] : 0.0;
    std::vector<std::pair<double, double>> merged;
    for (auto& r : runs) {
      if (!merged.empty() && r.first - merged.back().second < 3.0 * step)
        merged.back().second = r.second;
      else
        merged.push_back(r);
    }
    return merged;
  };

  double coarse_step = std::max(0.02, (hi - lo) / 2000.0);
  DensityGrid coarse = density(P, make_grid(lo, hi, coarse_step), dopt);
  auto coarse_runs = detect_runs(coarse);
  if (coarse_runs.empty())
    throw numeric_error("support_components: no support detected in bracket");

  double flo = std::max(lo, coarse_runs.front().first - 0.5);
  double fhi = std::min(hi, coarse_runs.back().second + 0.5);
  DensityGrid fine = density(P, make_grid(flo, fhi, opt.grid_step), dopt);
  auto runs = detect_runs(fine);
  if (runs.empty()) throw numeric_error("support_components: support lost at fine resolution");

  // Bisection on the refined-schedule density across the threshold. The
  // detection-schedule run edge overshoots the refined crossing, so first
  // walk inward until the refined density clears the threshold, and walk
  // outward (never past outer_limit) until it drops below. When no
  // sub-threshold point exists before the midpoint to the neighbouring run,
  // the detected gap is an extrapolation artifact and the runs merge.
  double step = opt.grid_step;
  auto refine_edge = [&](double edge, double into_run, double run_center,
                         double outer_limit) -> std::optional<double> {
    CMat warm;
    double inside = edge;
    double v = rho_at(P, inside, opt.y_refine, dopt.tol, &warm);
    while (v <= opt.rho_thresh && (inside - run_center) * into_run < 0.0) {
      inside += into_run * 4.0 * step;
      v = rho_at(P, inside, opt.y_refine, dopt.tol, &warm);
    }
    if (v <= opt.rho_thresh) return edge;  // entire run below the refined threshold
    double outside = inside;
    while ((outside - outer_limit) * into_run > 0.0) {
      double next = outside - into_run * 4.0 * step;
      if ((next - outer_limit) * into_run < 0.0) next = outer_limit;
      outside = next;
      if (rho_at(P, outside, opt.y_refine, dopt.tol, &warm) <= opt.rho_thresh) break;
      if (outside == outer_limit) return std::nullopt;  // no crossing before the limit
    }
    for (int it = 0; it < 60 && std::abs(outside - inside) > opt.resolution; ++it) {
      double mid = 0.5 * (inside + outside);
      if (rho_at(P, mid, opt.y_refine, dopt.tol, &warm) > opt.rho_thresh)
        inside = mid;
      else
        outside = mid;
    }
    return 0.5 * (inside + outside);
  };

  SupportComponents sc;
  sc.m = P.m;
  for (bool stable = false; !stable;) {
    stable = true;
    sc.intervals.clear();
    for (size_t i = 0; i < runs.size(); ++i) {
      double center = 0.5 * (runs[i].first + runs[i].second);
      double left_limit =
          (i == 0) ? runs[i].first - 1.0 : 0.5 * (runs[i - 1].second + runs[i].first);
      double right_limit = (i + 1 == runs.size())
                               ? runs[i].second + 1.0
                               : 0.5 * (runs[i].second + runs[i + 1].first);
      auto left = refine_edge(runs[i].first, +1.0, center, left_limit);
      auto right = refine_edge(runs[i].second, -1.0, center, right_limit);
      if (!left) {
        if (i == 0) {
          left = left_limit;  // density reaches the outer bracket margin
        } else {
          runs[i - 1].second = runs[i].second;
          runs.erase(runs.begin() + i);
          stable = false;
          break;
        }
      }
      if (!right) {
        if (i + 1 == runs.size()) {
          right = right_limit;
        } else {
          runs[i].second = runs[i + 1].second;
          runs.erase(runs.begin() + i + 1);
          stable = false;
          break;
        }
      }
      double lo = std::min(*left, *right), hi = std::max(*left, *right);
      sc.intervals.emplace_back(lo, hi);
    }
  }
  // safety net: merge any residual overlaps
  for (size_t i = 1; i < sc.intervals.size();) {
    if (sc.intervals[i].first <= sc.intervals[i - 1].second) {
      sc.intervals[i - 1].second = std::max(sc.intervals[i - 1].second, sc.intervals[i].second);
      sc.intervals.erase(sc.intervals.begin() + i);
    } else {
      ++i;
    }
  }

  if (static_cast<int>(sc.intervals.size()) > P.m)
    throw numeric_error("support_components: " + std::to_string(sc.intervals.size()) +
                        " components exceed the coefficient dimension " + std::to_string(P.m));

  sc.eps0 = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < sc.intervals.size(); ++i)
    sc.eps0 = std::min(sc.eps0, sc.intervals[i].first - sc.intervals[i - 1].second);

  // Degenerate one-point components: after refinement an atom leaves an
  // interval of width comparable to the smallest smoothing scale.
  double atom_width = std::max(2.0 * step, 10.0 * opt.y_refine.back());
  for (size_t i = 0; i < sc.intervals.size(); ++i) {
    auto& iv = sc.intervals[i];
    if (iv.second - iv.first < atom_width) {
      double c = 0.5 * (iv.first + iv.second);
      iv = {c, c};
    }
  }

  // Masses over I + (-eps, eps) with eps = min(0.25, eps0 / 3), integrating
  // the signed extrapolant: its negative side lobes compensate the smoothed
  // overshoot, so the quadrature preserves component masses.
  double eps = std::min(0.25, sc.eps0 / 3.0);
  double total = 0.0;
  for (auto& iv : sc.intervals) {
    double a = iv.first - eps, b = iv.second + eps;
    double mass = 0.0;
    for (size_t i = 1; i < fine.xs.size(); ++i) {
      if (fine.xs[i] < a || fine.xs[i - 1] > b) continue;
      mass += 0.5 * (fine.rho_raw[i] + fine.rho_raw[i - 1]) * (fine.xs[i] - fine.xs[i - 1]);
    }
    sc.masses.push_back(mass);
    total += mass;
  }
  sc.mass_total = total;
  return sc;
}

SupportComponents support_components(const MatrixNCPoly& p, const SupportOptions& opt) {
  if (!p.is_selfadjoint(1e-10))
    throw config_error("support_components: polynomial must be self-adjoint");
  LinearPencil P = assemble_pencil(factorize(p));
  return support_components(P, spectral_bound(p), opt);
}

std::vector<IntegerMassRow> integer_mass_check(const SupportComponents& sc, double tol) {
  std::vector<IntegerMassRow> rows;
  for (size_t i = 0; i < sc.intervals.size(); ++i) {
    double mm = sc.masses[i] * sc.m;
    int nearest = static_cast<int>(std::lround(mm));
    bool pass = std::abs(mm - nearest) <= tol && nearest >= 1;
    rows.push_back({sc.intervals[i], sc.masses[i], mm, nearest, pass});
  }
  return rows;
}

double trace_phi(const DensityGrid& grid, const TestFunction& phi) {
  if (grid.xs.empty()) throw config_error("trace_phi: empty grid");
  if (phi.lo() < grid.xs.front() || phi.hi() > grid.xs.back())
    throw config_error("trace_phi: grid does not cover supp(phi)");
  double acc = 0.0;
  for (size_t i = 1; i < grid.xs.size(); ++i) {
    double f1 = grid.rho[i - 1] * phi(grid.xs[i - 1]);
    double f2 = grid.rho[i] * phi(grid.xs[i]);
    acc += 0.5 * (f1 + f2) * (grid.xs[i] - grid.xs[i - 1]);
  }
  return acc;
}

nlohmann::json support_to_json(const SupportComponents& sc) {
  nlohmann::json intervals = nlohmann::json::array();
  for (auto& iv : sc.intervals) intervals.push_back({iv.first, iv.second});
  return {{"intervals", intervals},
          {"masses", sc.masses},
          {"eps0", std::isfinite(sc.eps0) ? nlohmann::json(sc.eps0) : nlohmann::json(nullptr)},
          {"m", sc.m},
          {"mass_total", sc.mass_total}};
}

}  // namespace freespec
