#pragma once

#include "freespec/ovcauchy.hpp"
#include "freespec/rmt.hpp"
#include "freespec/spectrum.hpp"

#include <nlohmann/json.hpp>

namespace freespec {

// Seeded Monte Carlo experiment output. Reports serialize to JSON and are
// byte-identical for a fixed (seed, parameters) regardless of thread count:
// per-trial values land in preallocated slots and reductions run in fixed
// order.
struct ExperimentReport {
  std::string kind;
  nlohmann::json params;
  nlohmann::json results;
  bool pass = true;
  nlohmann::json to_json() const {
    return {{"kind", kind}, {"params", params}, {"results", results}, {"pass", pass}};
  }
};

struct ExperimentConfig {
  std::vector<EnsembleKind> mix;
  int n = 100;
  int trials = 100;
  uint64_t seed = 2024;
  int threads = 1;
  double tol = 1e-10;
};

// Pairwise deterministic sums (fixed reduction order).
double pairwise_sum(const std::vector<double>& v);
cdouble pairwise_sum(const std::vector<cdouble>& v);
CMat pairwise_sum(const std::vector<CMat>& v);

// Sorted eigenvalues of Q_n per trial.
std::vector<RVec> empirical_spectrum(const MatrixNCPoly& p, const ExperimentConfig& cfg);

// Sample mean and standard error of (tr_m (x) tr_n)[(lambda - Q_n)^{-1}].
// For a single-SGRM generator polynomial X_1, cv_order > 0 subtracts
// Chebyshev control variates with exact finite-n means (unbiased, variance
// reduced by several orders of magnitude).
struct GnEstimate {
  cdouble mean;
  double stderr_;
  int trials;
};
GnEstimate mc_scalar_gn(const MatrixNCPoly& p, cdouble lambda, const ExperimentConfig& cfg,
                        int cv_order = 0);

// Exact E Tr X^{2j}, j = 0..jmax, for one SGRM(n, 1/n) matrix.
std::vector<double> sgrm_exact_even_trace_moments(int n, int jmax);

// Monte Carlo mean of sum_i a_i H a_i H + (a_0 - Lambda) H + 1 with
// H = (id_k (x) tr_n)[(Lambda (x) 1 - S_n)^{-1}]; zero in expectation for
// the complex ensemble, -(1/n) R_n for the real ones. with_rn additionally
// estimates R_n from the same trials.
ExperimentReport master_equation_residual(const MatrixNCPoly& p, cdouble lambda,
                                          const ExperimentConfig& cfg, bool with_rn = false);

// Fraction of trials with every eigenvalue inside union of
// intervals + (-eps, eps).
ExperimentReport confinement_check(const MatrixNCPoly& p, const SupportComponents& sc,
                                   double eps, const ExperimentConfig& cfg);

// Exact per-component eigenvalue counts against n * (mass * m).
ExperimentReport separation_check(const MatrixNCPoly& p, const SupportComponents& sc,
                                  double eps, const ExperimentConfig& cfg);

// ghat_n(lambda) across sizes; complex mixes report the log-log slope of
// |ghat_n - g|, real mixes report n (ghat_n - g) per size plus an
// inverse-variance weighted mean.
ExperimentReport gn_bias_scan(const MatrixNCPoly& p, cdouble lambda,
                              const std::vector<int>& n_list, const ExperimentConfig& cfg,
                              int cv_order = 0);

// Mean/variance of (tr (x) tr) phi(Q_n) per size (exploratory).
ExperimentReport variance_scan(const MatrixNCPoly& p, const TestFunction& phi,
                               const std::vector<int>& n_list, const ExperimentConfig& cfg);

nlohmann::json mix_to_json(const std::vector<EnsembleKind>& mix);

}  // namespace freespec
