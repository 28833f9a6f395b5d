#include "freespec/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "freespec/parallel.hpp"

namespace freespec {

namespace {

template <class T>
T pairwise_impl(const T* data, size_t n) {
  if (n == 1) return data[0];
  size_t half = n / 2;
  return pairwise_impl(data, half) + pairwise_impl(data + half, n - half);
}

nlohmann::json cplx(cdouble z) { return {z.real(), z.imag()}; }

double sd_complex(const std::vector<cdouble>& v, cdouble mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (auto z : v) acc += std::norm(z - mean);
  return std::sqrt(acc / (v.size() - 1));
}

// Jackknife standard error of the norm of the mean of matrix samples.
double jackknife_norm_stderr(const std::vector<CMat>& samples, const CMat& total) {
  size_t T = samples.size();
  if (T < 2) return 0.0;
  std::vector<double> loo(T);
  for (size_t i = 0; i < T; ++i) loo[i] = opnorm((total - samples[i]) / double(T - 1));
  double mean = pairwise_sum(loo) / T;
  double acc = 0.0;
  for (double v : loo) acc += (v - mean) * (v - mean);
  return std::sqrt(acc * double(T - 1) / T);
}

}  // namespace

double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_impl(v.data(), v.size());
}
cdouble pairwise_sum(const std::vector<cdouble>& v) {
  return v.empty() ? cdouble(0, 0) : pairwise_impl(v.data(), v.size());
}
CMat pairwise_sum(const std::vector<CMat>& v) {
  if (v.empty()) return CMat();
  return pairwise_impl(v.data(), v.size());
}

nlohmann::json mix_to_json(const std::vector<EnsembleKind>& mix) {
  nlohmann::json j = nlohmann::json::array();
  for (auto k : mix) j.push_back(to_string(k));
  return j;
}

std::vector<RVec> empirical_spectrum(const MatrixNCPoly& p, const ExperimentConfig& cfg) {
  validate_mix(cfg.mix, p.r());
  if (cfg.trials < 1) throw config_error("trials must be >= 1");
  CounterRng rng(cfg.seed);
  std::vector<RVec> out(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    auto x = sample_mix(cfg.mix, cfg.n, 0.0, rng, static_cast<uint32_t>(t));
    CMat q = p.evaluate(x);
    out[t] = hermitian_eigenvalues(q);
  });
  return out;
}

std::vector<double> sgrm_exact_even_trace_moments(int n, int jmax) {
  // Three-term recurrence for E Tr H^{2j} of the unit-variance complex
  // ensemble, then rescaled to sigma^2 = 1/n.
  std::vector<double> T(jmax + 1);
  double nn = n;
  std::vector<double> raw(jmax + 1);
  raw[0] = nn;
  if (jmax >= 1) raw[1] = nn * nn;
  for (int j = 1; j < jmax; ++j)
    raw[j + 1] = ((4.0 * j + 2.0) * nn * raw[j] + j * (4.0 * j * j - 1.0) * raw[j - 1]) /
                 (j + 2.0);
  for (int j = 0; j <= jmax; ++j) T[j] = raw[j] / std::pow(nn, j);
  return T;
}

GnEstimate mc_scalar_gn(const MatrixNCPoly& p, cdouble lambda, const ExperimentConfig& cfg,
                        int cv_order) {
  validate_mix(cfg.mix, p.r());
  if (cfg.trials < 2) throw config_error("mc_scalar_gn: trials must be >= 2");
  if (lambda.imag() == 0.0) throw config_error("mc_scalar_gn: Im lambda must be nonzero");

  bool cv_ok = cv_order > 0 && p.r() == 1 && p.m() == 1 && p.degree() == 1 &&
               cfg.mix[0] == EnsembleKind::SGRM &&
               (p.coeff(NCWord{1}) - CMat::Identity(1, 1)).norm() == 0.0 &&
               p.coeff(NCWord{}).norm() == 0.0;
  if (cv_order > 0 && !cv_ok)
    throw config_error("mc_scalar_gn: control variates need p = X_1 over one SGRM generator");

  std::vector<double> etr;
  cdouble Gcoef = 0.0;
  if (cv_ok) {
    etr = sgrm_exact_even_trace_moments(cfg.n, cv_order);
    Gcoef = (lambda - std::sqrt(lambda * lambda - 4.0)) / 2.0;
    if (std::abs(Gcoef) > 1.0) Gcoef = 1.0 / Gcoef;  // branch with |G| < 1
  }

  CounterRng rng(cfg.seed);
  std::vector<cdouble> vals(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    auto x = sample_mix(cfg.mix, cfg.n, 0.0, rng, static_cast<uint32_t>(t));
    CMat q = p.evaluate(x);
    RVec ev = hermitian_eigenvalues(q);
    cdouble h = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) h += 1.0 / (lambda - ev[i]);
    h /= static_cast<double>(ev.size());
    if (cv_ok) {
      // Chebyshev control variates: subtract zero-mean fluctuations of
      // Tr U_k(X/2), whose exact expectations follow from the even trace
      // moments (odd ones vanish by symmetry).
      int n = cfg.n;
      RVec ukm1 = RVec::Ones(n), uk = ev;
      cdouble corr = Gcoef * Gcoef * uk.sum();  // E Tr U_1 = 0
      cdouble gp = Gcoef * Gcoef;
      for (int k = 2; k <= cv_order; ++k) {
        RVec ukp = ev.cwiseProduct(uk) - ukm1;
        ukm1 = uk;
        uk = ukp;
        gp *= Gcoef;
        double exact = 0.0;
        if (k % 2 == 0) {
          // U_k(x/2) = sum_i (-1)^i C(k-i, i) x^{k-2i}
          for (int i = 0; i <= k / 2; ++i) {
            double binom = 1.0;
            for (int b = 1; b <= i; ++b)
              binom *= static_cast<double>(k - i - b + 1) / static_cast<double>(b);
            double c = (i % 2 == 0) ? binom : -binom;
            exact += c * etr[(k - 2 * i) / 2];
          }
        }
        corr += gp * (uk.sum() - exact);
      }
      h -= corr / static_cast<double>(n);
    }
    vals[t] = h;
  });
  cdouble mean = pairwise_sum(vals) / static_cast<double>(cfg.trials);
  double se = sd_complex(vals, mean) / std::sqrt(static_cast<double>(cfg.trials));
  return {mean, se, cfg.trials};
}

ExperimentReport master_equation_residual(const MatrixNCPoly& p, cdouble lambda,
                                          const ExperimentConfig& cfg, bool with_rn) {
  validate_mix(cfg.mix, p.r());
  if (lambda.imag() <= 0.0)
    throw config_error("master_equation_residual: Im lambda must be positive");
  LinearPencil P = assemble_pencil(factorize(p));
  const int k = P.k;
  CMat Lam = P.Lambda(lambda);
  auto eps = transpose_signs(cfg.mix);

  CounterRng rng(cfg.seed);
  std::vector<CMat> exprs(cfg.trials), rns;
  if (with_rn) rns.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    auto x = sample_mix(cfg.mix, cfg.n, 0.0, rng, static_cast<uint32_t>(t));
    int n = static_cast<int>(x[0].rows());
    CMat A = P.evaluate_A(lambda * CMat::Identity(P.m, P.m), x);
    CMat Ainv = A.partialPivLu().solve(CMat::Identity(A.rows(), A.cols()));
    // H = (id_k (x) tr_n) of the inverse
    CMat H = CMat::Zero(k, k);
    for (int u = 0; u < k; ++u)
      for (int v = 0; v < k; ++v)
        H(u, v) = Ainv.block(u * n, v * n, n, n).trace() / static_cast<double>(n);
    CMat e = (P.a[0] - Lam) * H + CMat::Identity(k, k);
    for (int i = 1; i <= P.r; ++i) e += P.a[i] * H * P.a[i] * H;
    exprs[t] = e;
    if (with_rn) {
      // R contribution: sum_j eps_j sum_{u,v,z} a_j(x,u) a_j(v,z) T[u,v,z,y]
      // with T the unconjugated pairing of inverse blocks.
      std::vector<CMat> blk(static_cast<size_t>(k) * k);
      for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v) blk[u * k + v] = Ainv.block(u * n, v * n, n, n);
      std::vector<cdouble> T(static_cast<size_t>(k) * k * k * k);
      for (int u = 0; u < k; ++u)
        for (int pq = 0; pq < k; ++pq)
          for (int z = 0; z < k; ++z)
            for (int q = 0; q < k; ++q)
              T[((u * k + pq) * k + z) * k + q] =
                  blk[u * k + pq].cwiseProduct(blk[z * k + q]).sum() / static_cast<double>(n);
      CMat R = CMat::Zero(k, k);
      for (int j = 1; j <= P.r; ++j)
        for (int xx = 0; xx < k; ++xx)
          for (int y = 0; y < k; ++y) {
            cdouble acc = 0.0;
            for (int u = 0; u < k; ++u)
              for (int v = 0; v < k; ++v)
                for (int z = 0; z < k; ++z)
                  acc += P.a[j](xx, u) * P.a[j](v, z) * T[((u * k + v) * k + z) * k + y];
            R(xx, y) += static_cast<double>(eps[j - 1]) * acc;
          }
      rns[t] = R;
    }
  });

  CMat total = pairwise_sum(exprs);
  CMat mean = total / static_cast<double>(cfg.trials);
  double norm_mean = opnorm(mean);
  double se = jackknife_norm_stderr(exprs, total);

  ExperimentReport rep;
  rep.kind = "master_equation_residual";
  rep.params = {{"lambda", cplx(lambda)}, {"n", cfg.n},       {"trials", cfg.trials},
                {"seed", cfg.seed},       {"mix", mix_to_json(cfg.mix)}, {"k", k}};
  rep.results = {{"norm_mean", norm_mean}, {"stderr", se}};
  if (cfg.trials < 2) rep.results["stderr_undefined"] = true;
  if (with_rn) {
    CMat rn_mean = pairwise_sum(rns) / static_cast<double>(cfg.trials);
    // mean + (1/n) R_n should vanish to O(1/n^2)
    rep.results["rn_norm"] = opnorm(rn_mean);
    rep.results["norm_mean_plus_rn_over_n"] = opnorm(mean + rn_mean / static_cast<double>(cfg.n));
  }
  return rep;
}

namespace {

bool inside_intervals(double x, const std::vector<std::pair<double, double>>& ivs, double eps) {
  for (auto& iv : ivs)
    if (x > iv.first - eps && x < iv.second + eps) return true;
  return false;
}

}  // namespace

ExperimentReport confinement_check(const MatrixNCPoly& p, const SupportComponents& sc,
                                   double eps, const ExperimentConfig& cfg) {
  if (eps <= 0.0) throw config_error("confinement_check: eps must be positive");
  if (sc.intervals.size() > 1 && eps >= sc.eps0)
    throw config_error("confinement_check: eps must stay below the smallest gap");
  auto spectra = empirical_spectrum(p, cfg);
  int ok = 0;
  std::vector<int> strays(cfg.trials, 0);
  for (int t = 0; t < cfg.trials; ++t) {
    int bad = 0;
    for (Eigen::Index i = 0; i < spectra[t].size(); ++i)
      if (!inside_intervals(spectra[t][i], sc.intervals, eps)) ++bad;
    strays[t] = bad;
    if (bad == 0) ++ok;
  }
  ExperimentReport rep;
  rep.kind = "confinement_check";
  rep.params = {{"n", cfg.n},   {"trials", cfg.trials},        {"eps", eps},
                {"seed", cfg.seed}, {"mix", mix_to_json(cfg.mix)},
                {"intervals", support_to_json(sc)["intervals"]}};
  rep.results = {{"pass_trials", ok}, {"stray_counts", strays}};
  rep.pass = (ok == cfg.trials);
  return rep;
}

ExperimentReport separation_check(const MatrixNCPoly& p, const SupportComponents& sc,
                                  double eps, const ExperimentConfig& cfg) {
  if (sc.intervals.size() < 2) {
    ExperimentReport rep;
    rep.kind = "separation_check";
    rep.params = {{"n", cfg.n}, {"seed", cfg.seed}};
    rep.results = {{"note", "single component: separation is vacuous"}};
    return rep;
  }
  if (eps >= sc.eps0)
    throw config_error("separation_check: eps must stay below the smallest gap");
  // Enlarged intervals may touch once eps passes eps0/2; eigenvalues are
  // assigned to the first interval that contains them.

  std::vector<int> expected;
  for (double mass : sc.masses)
    expected.push_back(static_cast<int>(std::lround(mass * sc.m)) * cfg.n);

  auto spectra = empirical_spectrum(p, cfg);
  int exact = 0;
  std::vector<std::vector<int>> counts(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    std::vector<int> c(sc.intervals.size(), 0);
    int covered = 0;
    for (Eigen::Index i = 0; i < spectra[t].size(); ++i)
      for (size_t j = 0; j < sc.intervals.size(); ++j)
        if (spectra[t][i] > sc.intervals[j].first - eps &&
            spectra[t][i] < sc.intervals[j].second + eps) {
          ++c[j];
          ++covered;
          break;
        }
    counts[t] = c;
    bool match = (covered == static_cast<int>(spectra[t].size()));
    for (size_t j = 0; j < c.size(); ++j) match = match && (c[j] == expected[j]);
    if (match) ++exact;
  }
  ExperimentReport rep;
  rep.kind = "separation_check";
  rep.params = {{"n", cfg.n},   {"trials", cfg.trials},        {"eps", eps},
                {"seed", cfg.seed}, {"mix", mix_to_json(cfg.mix)},
                {"expected_counts", expected},
                {"eps_to_gap_ratio", eps / sc.eps0}};
  rep.results = {{"exact_trials", exact}, {"counts", counts}};
  rep.pass = (exact == cfg.trials);
  return rep;
}

ExperimentReport gn_bias_scan(const MatrixNCPoly& p, cdouble lambda,
                              const std::vector<int>& n_list, const ExperimentConfig& cfg,
                              int cv_order) {
  if (n_list.size() < 3 || n_list.back() < 4 * n_list.front())
    throw config_error("gn_bias_scan: need >= 3 sizes spanning a factor >= 4");
  cdouble g_limit;
  if (p.degree() == 0) {
    // constant polynomial: Q_n is deterministic and the transform is exact
    CMat c = p.coeff(NCWord{});
    g_limit = ((lambda * CMat::Identity(p.m(), p.m()) - c).inverse()).trace() /
              static_cast<double>(p.m());
  } else {
    LinearPencil P = assemble_pencil(factorize(p));
    g_limit = scalar_g(P, lambda, cfg.tol);
  }

  bool real_mix = false;
  for (auto k : cfg.mix) real_mix = real_mix || k != EnsembleKind::SGRM;

  nlohmann::json per_n = nlohmann::json::array();
  std::vector<double> logn, logdiff;
  cdouble weighted_v = 0.0;
  double weight_total = 0.0, combined_var = 0.0;
  for (int n : n_list) {
    ExperimentConfig c = cfg;
    c.n = n;
    GnEstimate est = mc_scalar_gn(p, lambda, c, cv_order);
    cdouble diff = est.mean - g_limit;
    nlohmann::json row = {{"n", n},
                          {"gn", cplx(est.mean)},
                          {"diff", cplx(diff)},
                          {"abs_diff", std::abs(diff)},
                          {"stderr", est.stderr_}};
    if (real_mix) {
      cdouble v = static_cast<double>(n) * diff;
      double sev = n * est.stderr_;
      row["n_times_diff"] = cplx(v);
      row["stderr_n_times_diff"] = sev;
      double w = 1.0 / (sev * sev);
      weighted_v += w * v;
      weight_total += w;
    }
    per_n.push_back(row);
    logn.push_back(std::log(static_cast<double>(n)));
    logdiff.push_back(std::log(std::max(std::abs(diff), 1e-300)));
  }

  ExperimentReport rep;
  rep.kind = "gn_bias_scan";
  rep.params = {{"lambda", cplx(lambda)},      {"n_list", n_list}, {"trials", cfg.trials},
                {"seed", cfg.seed},            {"mix", mix_to_json(cfg.mix)},
                {"cv_order", cv_order},        {"g_limit", cplx(g_limit)}};
  rep.results = {{"per_n", per_n}};

  // least-squares slope of log|diff| vs log n
  double mx = pairwise_sum(logn) / logn.size();
  double my = pairwise_sum(logdiff) / logdiff.size();
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < logn.size(); ++i) {
    sxx += (logn[i] - mx) * (logn[i] - mx);
    sxy += (logn[i] - mx) * (logdiff[i] - my);
  }
  rep.results["loglog_slope"] = sxy / sxx;

  if (real_mix && weight_total > 0.0) {
    cdouble vbar = weighted_v / weight_total;
    combined_var = 1.0 / weight_total;
    rep.results["n_diff_weighted_mean"] = cplx(vbar);
    rep.results["n_diff_combined_stderr"] = std::sqrt(combined_var);
  }
  return rep;
}

ExperimentReport variance_scan(const MatrixNCPoly& p, const TestFunction& phi,
                               const std::vector<int>& n_list, const ExperimentConfig& cfg) {
  nlohmann::json per_n = nlohmann::json::array();
  for (int n : n_list) {
    ExperimentConfig c = cfg;
    c.n = n;
    auto spectra = empirical_spectrum(p, c);
    std::vector<double> vals(c.trials);
    for (int t = 0; t < c.trials; ++t) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < spectra[t].size(); ++i) acc += phi(spectra[t][i]);
      vals[t] = acc / static_cast<double>(spectra[t].size());
    }
    double mean = pairwise_sum(vals) / c.trials;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = c.trials > 1 ? var / (c.trials - 1) : 0.0;
    per_n.push_back({{"n", n},
                     {"mean", mean},
                     {"variance", var},
                     {"stderr", std::sqrt(var / c.trials)}});
  }
  ExperimentReport rep;
  rep.kind = "variance_scan";
  rep.params = {{"n_list", n_list}, {"trials", cfg.trials}, {"seed", cfg.seed},
                {"mix", mix_to_json(cfg.mix)}, {"phi", phi.to_json()}};
  rep.results = {{"per_n", per_n}};
  return rep;
}

}  // namespace freespec
