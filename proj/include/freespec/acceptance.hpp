#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace freespec {

struct CriterionResult {
  std::string id;
  std::string description;
  bool pass = false;
  nlohmann::json details;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 1;
  uint64_t seed = 2024;  // documented default seed; fixed, never time-based
  bool full = false;     // adds the slower cross-validation experiments
  std::ostream* log = nullptr;
};

// Runs the acceptance criteria and prints one pass/fail line per criterion
// to opts.log (when set). The returned list is in criterion order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

nlohmann::json acceptance_summary(const std::vector<CriterionResult>& results);

// Shared fixture polynomials.
class MatrixNCPoly;
MatrixNCPoly fixture_semicircle();   // X_1
MatrixNCPoly fixture_square();       // X_1^2
MatrixNCPoly fixture_anticomm();     // X_1 X_2 + X_2 X_1
MatrixNCPoly fixture_twoband();      // diag(X_1, X_1 + 5)
// Seeded random self-adjoint polynomial (m <= max_m, r <= max_r, d <= max_d).
MatrixNCPoly random_selfadjoint_poly(uint64_t seed, int index, int max_m, int max_r, int max_d);

}  // namespace freespec
