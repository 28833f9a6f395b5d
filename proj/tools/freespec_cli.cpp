// Command-line front end: polynomial JSON in, CSV/JSON artifacts out.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "freespec/acceptance.hpp"
#include "freespec/correction.hpp"
#include "freespec/experiments.hpp"
#include "freespec/freemoments.hpp"
#include "freespec/parallel.hpp"

using namespace freespec;
using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 2024;  // documented fixed default, never time-based

MatrixNCPoly load_poly(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open polynomial file: " + path);
  json j;
  in >> j;
  MatrixNCPoly p = MatrixNCPoly::from_json(j);
  if (p.terms().empty()) throw config_error("terms must be non-empty");
  return p;
}

std::vector<EnsembleKind> parse_mix(const std::string& s, int r) {
  std::vector<EnsembleKind> mix;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) mix.push_back(ensemble_from_string(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (mix.size() == 1 && r > 1) mix.assign(r, mix[0]);
  validate_mix(mix, r);
  return mix;
}

json run_config_json(const std::string& sub, const json& extra) {
  json j = extra;
  j["subcommand"] = sub;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_report(const std::string& path, const ExperimentReport& rep, const json& cfg) {
  json j = rep.to_json();
  j["run_config"] = cfg;
  write_json(path, j);
}

std::vector<double> make_grid(double a, double b, double step) {
  int n = static_cast<int>(std::ceil((b - a) / step));
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = a + (b - a) * i / n;
  return xs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectra of self-adjoint matrix polynomials in free semicircular variables"};
  app.require_subcommand(1);

  std::string poly_path, out_path = "out.json", sidecar_path, mix_str = "gue", suite = "quick";
  uint64_t seed = kDefaultSeed;
  int threads = 0, n = 100, trials = 100, jmax = 6, cv = 0;
  double tol = 1e-10, eps = 0.25, grid_step = 0.005;
  double lambda_re = 0.0, lambda_im = 2.0;
  std::vector<double> y_schedule = {0.05, 0.025, 0.0125};
  std::vector<int> n_list = {25, 50, 100, 200};
  std::vector<double> grid_window;  // lo hi
  std::string phi_kind = "window";
  double phi_center = 0.0, phi_plateau = 0.0, phi_support = 1.0, phi_shoulder = 0.5;
  std::vector<double> phi_window;
  bool with_rn = false;

  auto add_common = [&](CLI::App* sub, bool needs_poly = true) {
    if (needs_poly) sub->add_option("--poly", poly_path, "polynomial JSON file")->required();
    sub->add_option("--out", out_path, "output file");
    sub->add_option("--seed", seed, "RNG seed (fixed default, never time-based)");
    sub->add_option("--threads", threads, "worker threads (0 = FREESPEC_THREADS or auto)");
    sub->add_option("--tol", tol, "solver residual tolerance");
  };

  auto* c_lin = app.add_subcommand("linearize", "factor and assemble the linear pencil");
  add_common(c_lin);

  auto* c_mom = app.add_subcommand("moments", "oracle vs pipeline moments");
  add_common(c_mom);
  c_mom->add_option("--jmax", jmax, "highest moment order");

  auto* c_den = app.add_subcommand("density", "spectral density by Stieltjes inversion");
  add_common(c_den);
  c_den->add_option("--grid-step", grid_step);
  c_den->add_option("--y-schedule", y_schedule, "decreasing, ratio 2")->expected(1, 3);
  c_den->add_option("--window", grid_window, "grid window lo hi (default: auto)")->expected(2);
  c_den->add_option("--sidecar", sidecar_path, "JSON sidecar path");

  auto* c_sup = app.add_subcommand("support", "support components, masses, gaps");
  add_common(c_sup);
  c_sup->add_option("--grid-step", grid_step);

  auto* c_sim = app.add_subcommand("simulate", "sample eigenvalues of Q_n");
  add_common(c_sim);
  c_sim->add_option("--mix", mix_str, "ensemble kinds, comma separated or one for all");
  c_sim->add_option("--n", n);
  c_sim->add_option("--trials", trials);

  auto* c_mst = app.add_subcommand("master-eq", "Monte Carlo master-equation residual");
  add_common(c_mst);
  c_mst->add_option("--mix", mix_str);
  c_mst->add_option("--n", n);
  c_mst->add_option("--trials", trials);
  c_mst->add_option("--lambda-re", lambda_re);
  c_mst->add_option("--lambda-im", lambda_im);
  c_mst->add_flag("--with-rn", with_rn, "estimate the 1/n term as well");

  auto* c_con = app.add_subcommand("confine", "eigenvalue confinement check");
  add_common(c_con);
  c_con->add_option("--mix", mix_str);
  c_con->add_option("--n", n);
  c_con->add_option("--trials", trials);
  c_con->add_option("--eps", eps);

  auto* c_sep = app.add_subcommand("separate", "exact separation check");
  add_common(c_sep);
  c_sep->add_option("--mix", mix_str);
  c_sep->add_option("--n", n);
  c_sep->add_option("--trials", trials);
  c_sep->add_option("--eps", eps);

  auto* c_bia = app.add_subcommand("bias-scan", "ghat_n - g across sizes");
  add_common(c_bia);
  c_bia->add_option("--mix", mix_str);
  c_bia->add_option("--n-list", n_list)->expected(3, 8);
  c_bia->add_option("--trials", trials);
  c_bia->add_option("--lambda-re", lambda_re);
  c_bia->add_option("--lambda-im", lambda_im);
  c_bia->add_option("--cv", cv, "Chebyshev control-variate order (single-SGRM generator only)");

  auto* c_cor = app.add_subcommand("correction", "real-ensemble 1/n correction l and Delta(phi)");
  add_common(c_cor);
  c_cor->add_option("--mix", mix_str);
  c_cor->add_option("--y-schedule", y_schedule)->expected(3);
  c_cor->add_option("--grid-step", grid_step);
  c_cor->add_option("--phi-kind", phi_kind, "window | bump | plateau-bump");
  c_cor->add_option("--phi-center", phi_center);
  c_cor->add_option("--phi-plateau", phi_plateau);
  c_cor->add_option("--phi-support", phi_support);
  c_cor->add_option("--phi-window", phi_window, "a b for the window kind")->expected(2);
  c_cor->add_option("--phi-shoulder", phi_shoulder);

  auto* c_ver = app.add_subcommand("verify", "run the acceptance suite");
  add_common(c_ver, false);
  c_ver->add_option("--suite", suite, "quick | full");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    threads = effective_threads(threads);
    Eigen::setNbThreads(1);  // trial-level parallelism only; keep runs bit-stable

    if (c_lin->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      LinearPencil P = assemble_pencil(factorize(p));
      json j = P.to_json();
      j["run_config"] = run_config_json("linearize", {{"poly", poly_path}});
      write_json(out_path, j);
      std::cout << "k = " << P.k << ", blocks =" << json(P.block_dims).dump() << "\n";
    } else if (c_mom->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      LinearPencil P = assemble_pencil(factorize(p));
      double radius = spectral_bound(p) + 2.0;
      auto pipeline = moments_from_g(P, jmax, radius, 64, tol);
      json rows = json::array();
      bool all_ok = true;
      for (int j = 0; j <= jmax; ++j) {
        double oracle = poly_moment(p, j);
        double diff = std::abs(pipeline[j] - oracle);
        bool ok = diff <= 1e-3 * std::max(1.0, std::abs(oracle));
        all_ok = all_ok && ok;
        rows.push_back({{"j", j}, {"oracle", oracle}, {"pipeline", pipeline[j]}, {"ok", ok}});
        std::cout << "m_" << j << ": oracle " << oracle << "  pipeline " << pipeline[j] << "\n";
      }
      write_json(out_path, json{{"moments", rows},
                                {"run_config", run_config_json("moments",
                                                               {{"poly", poly_path},
                                                                {"radius", radius},
                                                                {"tol", tol}})}});
      if (!all_ok) return 1;
    } else if (c_den->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      LinearPencil P = assemble_pencil(factorize(p));
      double lo, hi;
      if (grid_window.size() == 2) {
        lo = grid_window[0];
        hi = grid_window[1];
      } else {
        SupportOptions sopt;
        sopt.density_opt.threads = threads;
        sopt.density_opt.tol = tol;
        SupportComponents sc = support_components(P, spectral_bound(p), sopt);
        lo = sc.intervals.front().first - 1.0;
        hi = sc.intervals.back().second + 1.0;
      }
      DensityOptions dopt;
      dopt.threads = threads;
      dopt.tol = tol;
      dopt.y_schedule = y_schedule;
      DensityGrid grid = density(P, make_grid(lo, hi, grid_step), dopt);
      std::ofstream out(out_path);
      if (!out) throw config_error("cannot write " + out_path);
      json cfg = run_config_json("density", {{"poly", poly_path},
                                             {"seed", seed},
                                             {"tol", tol},
                                             {"grid_step", grid_step},
                                             {"y_schedule", y_schedule},
                                             {"window", {lo, hi}}});
      out << "# " << cfg.dump() << "\n" << "x,rho\n";
      out.precision(12);
      for (size_t i = 0; i < grid.xs.size(); ++i)
        out << grid.xs[i] << "," << grid.rho[i] << "\n";
      {
        SupportOptions sopt;
        sopt.density_opt.threads = threads;
        SupportComponents sc = support_components(P, spectral_bound(p), sopt);
        json j = support_to_json(sc);
        j["mass_total"] = grid.mass;
        j["run_config"] = cfg;
        write_json(sidecar_path.empty() ? out_path + ".sidecar.json" : sidecar_path, j);
      }
      std::cout << "density written, mass = " << grid.mass << "\n";
    } else if (c_sup->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      SupportOptions sopt;
      sopt.grid_step = grid_step;
      sopt.density_opt.threads = threads;
      sopt.density_opt.tol = tol;
      SupportComponents sc = support_components(p, sopt);
      json j = support_to_json(sc);
      j["integer_mass"] = json::array();
      bool all_ok = true;
      for (const auto& row : integer_mass_check(sc)) {
        j["integer_mass"].push_back({{"interval", {row.interval.first, row.interval.second}},
                                     {"mass", row.mass},
                                     {"mass_times_m", row.mass_times_m},
                                     {"nearest_integer", row.nearest_integer},
                                     {"pass", row.pass}});
        all_ok = all_ok && row.pass;
      }
      j["run_config"] = run_config_json("support", {{"poly", poly_path}, {"tol", tol}});
      write_json(out_path, j);
      std::cout << j.dump(2) << "\n";
      if (!all_ok) return 1;
    } else if (c_sim->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      ExperimentConfig cfg;
      cfg.mix = parse_mix(mix_str, p.r());
      cfg.n = n;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      auto spectra = empirical_spectrum(p, cfg);
      std::ofstream out(out_path);
      if (!out) throw config_error("cannot write " + out_path);
      json jcfg = run_config_json("simulate", {{"poly", poly_path}, {"n", n},
                                               {"trials", trials}, {"seed", seed},
                                               {"mix", mix_to_json(cfg.mix)}});
      out << "# " << jcfg.dump() << "\n" << "trial,index,value\n";
      out.precision(12);
      for (int t = 0; t < trials; ++t)
        for (Eigen::Index i = 0; i < spectra[t].size(); ++i)
          out << t << "," << i << "," << spectra[t][i] << "\n";
      std::cout << "eigenvalues written for " << trials << " trials\n";
    } else if (c_mst->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      ExperimentConfig cfg;
      cfg.mix = parse_mix(mix_str, p.r());
      cfg.n = n;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      cfg.tol = tol;
      ExperimentReport rep =
          master_equation_residual(p, cdouble(lambda_re, lambda_im), cfg, with_rn);
      write_report(out_path, rep, run_config_json("master-eq", rep.params));
      double nm = rep.results["norm_mean"].get<double>();
      double se = rep.results["stderr"].get<double>();
      std::cout << "norm of mean = " << nm << " (stderr " << se << ")\n";
      if (!cfg.mix.empty() && cfg.mix[0] == EnsembleKind::SGRM &&
          nm > std::max(0.05, 5.0 * se))
        return 1;
    } else if (c_con->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      SupportOptions sopt;
      sopt.density_opt.threads = threads;
      SupportComponents sc = support_components(p, sopt);
      ExperimentConfig cfg;
      cfg.mix = parse_mix(mix_str, p.r());
      cfg.n = n;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      ExperimentReport rep = confinement_check(p, sc, eps, cfg);
      write_report(out_path, rep, run_config_json("confine", rep.params));
      std::cout << rep.results["pass_trials"] << "/" << trials << " trials confined\n";
      if (!rep.pass) return 1;
    } else if (c_sep->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      SupportOptions sopt;
      sopt.density_opt.threads = threads;
      SupportComponents sc = support_components(p, sopt);
      ExperimentConfig cfg;
      cfg.mix = parse_mix(mix_str, p.r());
      cfg.n = n;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      ExperimentReport rep = separation_check(p, sc, eps, cfg);
      write_report(out_path, rep, run_config_json("separate", rep.params));
      std::cout << rep.results.dump(2) << "\n";
      if (!rep.pass) return 1;
    } else if (c_bia->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      ExperimentConfig cfg;
      cfg.mix = parse_mix(mix_str, p.r());
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      cfg.tol = tol;
      ExperimentReport rep = gn_bias_scan(p, cdouble(lambda_re, lambda_im), n_list, cfg, cv);
      write_report(out_path, rep, run_config_json("bias-scan", rep.params));
      std::cout << "log-log slope = " << rep.results["loglog_slope"] << "\n";
    } else if (c_cor->parsed()) {
      MatrixNCPoly p = load_poly(poly_path);
      LinearPencil P = assemble_pencil(factorize(p));
      auto mix = parse_mix(mix_str, p.r());
      for (auto k : mix)
        if (k == EnsembleKind::SGRM)
          throw config_error("correction: the complex ensemble has no 1/n term; use the real"
                             " kinds");
      DoubledPencil dp = make_doubled(P, transpose_signs(mix));
      TestFunction phi = TestFunction::window(-1, 1, phi_shoulder);
      if (phi_kind == "window") {
        if (phi_window.size() == 2)
          phi = TestFunction::window(phi_window[0], phi_window[1], phi_shoulder);
        else {
          SupportOptions sopt;
          sopt.density_opt.threads = threads;
          SupportComponents sc = support_components(P, spectral_bound(p), sopt);
          phi = TestFunction::window(sc.intervals.front().first - 1.0,
                                     sc.intervals.back().second + 1.0, phi_shoulder);
        }
      } else if (phi_kind == "bump") {
        phi = TestFunction::bump(phi_center, phi_support);
      } else if (phi_kind == "plateau-bump") {
        phi = TestFunction::plateau_bump(phi_center, phi_plateau, phi_support);
      } else {
        throw config_error("unknown phi kind: " + phi_kind);
      }
      double step = std::min(grid_step, 0.0025);
      DeltaDiagnostics diag;
      double delta = delta_functional(dp, phi, y_schedule, step, tol, &diag, threads);
      // CSV: l along the real axis at each y
      std::ofstream out(out_path);
      if (!out) throw config_error("cannot write " + out_path);
      json cfg = run_config_json("correction", {{"poly", poly_path},
                                                {"phi", phi.to_json()},
                                                {"y_schedule", y_schedule},
                                                {"grid_step", step},
                                                {"seed", seed},
                                                {"mix", mix_to_json(mix)}});
      out << "# " << cfg.dump() << "\n";
      out << "x";
      for (double y : y_schedule) out << ",re_l_y" << y << ",im_l_y" << y;
      out << "\n";
      out.precision(12);
      for (double x = phi.lo(); x <= phi.hi() + 1e-12; x += 0.02) {
        out << x;
        for (double y : y_schedule) {
          cdouble l = compute_l(dp, cdouble(x, y), tol);
          out << "," << l.real() << "," << l.imag();
        }
        out << "\n";
      }
      json summary = {{"delta_phi", delta},
                      {"y_schedule", y_schedule},
                      {"extrapolation_error", diag.extrapolation_error},
                      {"run_config", cfg}};
      std::string sum_path = out_path + ".summary.json";
      write_json(sum_path, summary);
      std::cout << "Delta(phi) = " << delta << " (extrapolation error "
                << diag.extrapolation_error << ")\n";
    } else if (c_ver->parsed()) {
      if (suite != "quick" && suite != "full")
        throw config_error("suite must be quick or full");
      AcceptanceOptions aopts;
      aopts.threads = threads;
      aopts.seed = seed;
      aopts.full = (suite == "full");
      aopts.log = &std::cout;
      auto results = run_acceptance(aopts);
      json summary = acceptance_summary(results);
      summary["run_config"] =
          run_config_json("verify", {{"suite", suite}, {"seed", seed}, {"threads", threads}});
      write_json(out_path, summary);
      bool all = summary["all_pass"].get<bool>();
      std::cout << (all ? "ALL PASS" : "FAILURES PRESENT") << "  (total "
                << summary["total_seconds"].get<double>() << " s)\n";
      return all ? 0 : 1;
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
