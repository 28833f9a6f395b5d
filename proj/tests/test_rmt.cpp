#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freespec/acceptance.hpp"
#include "freespec/experiments.hpp"
#include "freespec/freemoments.hpp"

using namespace freespec;

namespace {

double tr_sq(const CMat& x) {
  return (x * x).trace().real() / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("GOE draws are exactly real symmetric; star draws purely imaginary") {
  CounterRng rng(1);
  CMat g = sample_matrix(EnsembleKind::GOE, 40, 0.0, rng, 0, 0);
  CHECK(g.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(opnorm(g - g.transpose()) == 0.0);

  CMat s = sample_matrix(EnsembleKind::GOEstar, 40, 0.0, rng, 0, 4);
  CHECK(s.real().cwiseAbs().maxCoeff() == 0.0);
  CHECK(opnorm(s - s.adjoint()) <= 1e-15);
  CHECK(s.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("GSE draws have Kramers-degenerate spectra") {
  CounterRng rng(2);
  CMat x = sample_matrix(EnsembleKind::GSE, 20, 0.0, rng, 3, 0);
  CHECK(x.rows() == 40);
  CHECK(opnorm(x - x.adjoint()) <= 1e-14);
  RVec ev = hermitian_eigenvalues(x);
  for (int i = 0; i < 40; i += 2) CHECK(std::abs(ev[i] - ev[i + 1]) <= 1e-8);

  // the star variant is anti-self-dual: spectrum symmetric about zero
  CMat s = sample_matrix(EnsembleKind::GSEstar, 20, 0.0, rng, 7, 0);
  RVec es = hermitian_eigenvalues(s);
  for (int i = 0; i < 40; ++i) CHECK(std::abs(es[i] + es[39 - i]) <= 1e-8);
}

TEST_CASE("normalization: mean of tr X^2 matches the exact finite-n value") {
  const int n = 200, trials = 200;
  CounterRng rng(777);
  for (auto kind : {EnsembleKind::SGRM, EnsembleKind::GOE, EnsembleKind::GOEstar,
                    EnsembleKind::GSE, EnsembleKind::GSEstar}) {
    std::vector<double> vals(trials);
    for (int t = 0; t < trials; ++t)
      vals[t] = tr_sq(sample_matrix(kind, n, 0.0, rng, static_cast<uint32_t>(t), 0));
    double mean = pairwise_sum(vals) / trials;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    double se = std::sqrt(var / (trials - 1) / trials);
    double exact = exact_tr_sq_mean(kind, n);
    INFO(to_string(kind), " mean=", mean, " exact=", exact, " se=", se);
    CHECK(std::abs(mean - exact) <= 3.0 * se);
    // and the idealized value 1 up to the finite-n offset
    CHECK(std::abs(mean - 1.0) <= 3.0 * se + 2.0 / n);
  }
}

TEST_CASE("tail sanity: no operator-norm excursions at moderate n") {
  CounterRng rng(909);
  for (int t = 0; t < 30; ++t) {
    CMat x = sample_matrix(EnsembleKind::SGRM, 100, 0.0, rng, static_cast<uint32_t>(t), 0);
    RVec ev = hermitian_eigenvalues(x);
    CHECK(std::max(std::abs(ev[0]), std::abs(ev[99])) < 3.0);
  }
  for (int t = 0; t < 30; ++t) {
    CMat x = sample_matrix(EnsembleKind::GOE, 100, 0.0, rng, static_cast<uint32_t>(t), 0);
    RVec ev = hermitian_eigenvalues(x);
    CHECK(std::max(std::abs(ev[0]), std::abs(ev[99])) < 3.0 * std::sqrt(2.0));
  }
}

TEST_CASE("empirical CDF of one large draw is close to the semicircle law") {
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 500;
  cfg.trials = 1;
  cfg.seed = 4;
  auto spectra = empirical_spectrum(fixture_semicircle(), cfg);
  auto cdf = [](double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * M_PI) + std::asin(x / 2.0) / M_PI;
  };
  double ks = 0.0;
  const RVec& ev = spectra[0];
  for (int i = 0; i < ev.size(); ++i) {
    double f = cdf(ev[i]);
    ks = std::max(ks, std::abs(f - (i + 1.0) / ev.size()));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / ev.size()));
  }
  CHECK(ks <= 0.05);
}

TEST_CASE("constant polynomial has deterministic spectrum with multiplicity n") {
  CMat c(2, 2);
  c << 1.0, 0.0, 0.0, -3.0;
  auto p = MatrixNCPoly::constant(c, 1);
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 10;
  cfg.trials = 2;
  cfg.seed = 5;
  auto spectra = empirical_spectrum(p, cfg);
  for (const RVec& ev : spectra) {
    CHECK(ev.size() == 20);
    for (int i = 0; i < 10; ++i) CHECK(ev[i] == doctest::Approx(-3.0).epsilon(1e-12));
    for (int i = 10; i < 20; ++i) CHECK(ev[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("confinement: squared generator at moderate scale") {
  MatrixNCPoly p = fixture_square();
  SupportOptions sopt;
  SupportComponents sc = support_components(p, sopt);
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 200;
  cfg.trials = 5;
  cfg.seed = 6;
  ExperimentReport rep = confinement_check(p, sc, 0.3, cfg);
  CHECK(rep.results["pass_trials"].get<int>() == 5);

  ExperimentReport trivial = confinement_check(p, sc, 10.0, cfg);
  CHECK(trivial.results["pass_trials"].get<int>() == 5);
}

TEST_CASE("separation is vacuous for a single component") {
  MatrixNCPoly p = fixture_semicircle();
  SupportComponents sc = support_components(p);
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 20;
  cfg.trials = 2;
  cfg.seed = 7;
  ExperimentReport rep = separation_check(p, sc, 0.2, cfg);
  CHECK(rep.results.contains("note"));
}

TEST_CASE("master equation: complex case vanishes, real case carries a 1/n term") {
  MatrixNCPoly p = fixture_semicircle();
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 40;
  cfg.trials = 1200;
  cfg.seed = 8;
  ExperimentReport rep = master_equation_residual(p, cdouble(0, 2), cfg);
  double nm = rep.results["norm_mean"].get<double>();
  double se = rep.results["stderr"].get<double>();
  CHECK(nm <= std::max(0.05, 5.0 * se));

  cfg.mix = {EnsembleKind::GOE};
  cfg.n = 80;
  cfg.trials = 800;
  ExperimentReport goe = master_equation_residual(p, cdouble(0, 2), cfg, true);
  double nm_goe = goe.results["norm_mean"].get<double>();
  double se_goe = goe.results["stderr"].get<double>();
  // the mean alone is C/n, clearly above noise
  CHECK(nm_goe > 5.0 * se_goe);
  // adding back the estimated (1/n) R_n cancels it
  double corrected = goe.results["norm_mean_plus_rn_over_n"].get<double>();
  CHECK(corrected <= 5.0 * se_goe + 10.0 / (cfg.n * cfg.n));
  // and the R_n estimate itself approaches -g'(2i) = -0.146447
  CHECK(goe.results["rn_norm"].get<double>() == doctest::Approx(0.1464).epsilon(0.1));
}

TEST_CASE("master equation: degenerate single trial is flagged") {
  MatrixNCPoly p = fixture_semicircle();
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 20;
  cfg.trials = 1;
  cfg.seed = 9;
  ExperimentReport rep = master_equation_residual(p, cdouble(0, 2), cfg);
  CHECK(rep.results.contains("stderr_undefined"));
  CHECK(std::isfinite(rep.results["norm_mean"].get<double>()));
}

TEST_CASE("mc_scalar_gn: minimal trials yield a finite standard error") {
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 30;
  cfg.trials = 2;
  cfg.seed = 10;
  GnEstimate est = mc_scalar_gn(fixture_semicircle(), cdouble(0, 2), cfg);
  CHECK(std::isfinite(est.stderr_));
  CHECK(est.stderr_ > 0.0);
}

TEST_CASE("mc_scalar_gn approaches the limit transform") {
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 100;
  cfg.trials = 400;
  cfg.seed = 11;
  GnEstimate est = mc_scalar_gn(fixture_semicircle(), cdouble(0, 2), cfg);
  cdouble g(0.0, 1.0 - std::sqrt(2.0));
  CHECK(std::abs(est.mean - g) <= 3.0 * est.stderr_ + 0.01);
}

TEST_CASE("exact trace moments: recurrence reproduces the known values") {
  auto t10 = sgrm_exact_even_trace_moments(10, 4);
  CHECK(t10[0] == doctest::Approx(10.0));
  CHECK(t10[1] == doctest::Approx(10.0));               // E Tr X^2 = n sigma^2 n = n/n * n
  CHECK(t10[2] == doctest::Approx(2.0 * 10 + 1.0 / 10));  // 2n + 1/n
  CHECK(t10[3] == doctest::Approx(5.0 * 10 + 10.0 / 10));  // 5n + 10/n
  // genus-0 coefficients are the Catalan numbers = the pairing oracle
  auto big = sgrm_exact_even_trace_moments(100000, 6);
  for (int j = 0; j <= 6; ++j) {
    NCWord w(2 * j, 1);
    CHECK(big[j] / 100000.0 == doctest::Approx(word_trace(w)).epsilon(1e-6));
  }
}

TEST_CASE("control variates do not bias the estimator") {
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.n = 60;
  cfg.trials = 300;
  cfg.seed = 12;
  GnEstimate raw = mc_scalar_gn(fixture_semicircle(), cdouble(0, 2), cfg, 0);
  GnEstimate cv = mc_scalar_gn(fixture_semicircle(), cdouble(0, 2), cfg, 12);
  // same trials, dramatically smaller spread, overlapping confidence ranges
  CHECK(cv.stderr_ < 0.05 * raw.stderr_);
  CHECK(std::abs(cv.mean - raw.mean) <= 4.0 * raw.stderr_);
  // cv estimator is only defined for the single-generator identity polynomial
  CHECK_THROWS_AS(mc_scalar_gn(fixture_square(), cdouble(0, 2), cfg, 12), config_error);
}

TEST_CASE("variance scan: gap bump means shrink with n; zero function is exact") {
  MatrixNCPoly p = fixture_twoband();
  TestFunction gap = TestFunction::plateau_bump(2.5, 0.1, 0.2);
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.trials = 60;
  cfg.seed = 13;
  ExperimentReport rep = variance_scan(p, gap, {50, 100, 200}, cfg);
  auto per_n = rep.results["per_n"];
  double m50 = std::abs(per_n[0]["mean"].get<double>());
  double m200 = std::abs(per_n[2]["mean"].get<double>());
  CHECK(m200 < m50 + 1e-12);

  TestFunction far = TestFunction::plateau_bump(40.0, 0.5, 1.0);
  ExperimentReport zero = variance_scan(p, far, {50}, cfg);
  CHECK(zero.results["per_n"][0]["mean"].get<double>() == 0.0);
  CHECK(zero.results["per_n"][0]["variance"].get<double>() == 0.0);

  // a bump overlapping the first band captures that band's mass
  TestFunction band = TestFunction::window(-2.5, 2.5, 0.5);
  ExperimentConfig c2 = cfg;
  c2.trials = 50;
  ExperimentReport bulk = variance_scan(p, band, {200}, c2);
  double mean = bulk.results["per_n"][0]["mean"].get<double>();
  double se = bulk.results["per_n"][0]["stderr"].get<double>();
  CHECK(std::abs(mean - 0.5) <= 3.0 * se + 0.01);
}

TEST_CASE("constant polynomial bias scan is exact at every size") {
  CMat c(2, 2);
  c << 0.5, 0.0, 0.0, -1.5;
  auto p = MatrixNCPoly::constant(c, 1);
  ExperimentConfig cfg;
  cfg.mix = {EnsembleKind::SGRM};
  cfg.trials = 4;
  cfg.seed = 21;
  ExperimentReport rep = gn_bias_scan(p, cdouble(0, 2), {8, 16, 32}, cfg);
  for (const auto& row : rep.results["per_n"])
    CHECK(row["abs_diff"].get<double>() <= 1e-13);
}

TEST_CASE("sample_ensemble: spec-driven draws match the addressed stream") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::GOE;
  spec.n = 12;
  spec.seed = 5;
  auto draws = sample_ensemble(spec, 2);
  CHECK(draws.size() == 2);
  CounterRng rng(5);
  CHECK(opnorm(draws[0] - sample_matrix(EnsembleKind::GOE, 12, 0.0, rng, 0, 0)) == 0.0);
  CHECK(opnorm(draws[1] - sample_matrix(EnsembleKind::GOE, 12, 0.0, rng, 0, 4)) == 0.0);
  CHECK(opnorm(draws[0] - draws[1]) > 0.0);
}

TEST_CASE("ensemble mix validation") {
  CHECK_THROWS_AS(validate_mix({EnsembleKind::GSE, EnsembleKind::GOE}, 2), config_error);
  CHECK_THROWS_AS(validate_mix({EnsembleKind::GOE}, 2), config_error);
  CHECK(ensemble_from_string("gue") == EnsembleKind::SGRM);
  CHECK(ensemble_from_string("GOE*") == EnsembleKind::GOEstar);
  CHECK_THROWS_AS(ensemble_from_string("bogus"), config_error);
  CHECK(transpose_signs({EnsembleKind::GOE, EnsembleKind::GOEstar}) ==
        std::vector<int>{1, -1});
}
