#pragma once

#include <functional>

#include "freespec/types.hpp"

namespace freespec::detail {

struct FixedPointResult {
  CMat G;
  double residual_fro;  // Frobenius norm of rhs(G) + G^{-1} - target
  int iterations = 0;
  bool converged = false;
};

// Solves G for  rhs_of(G) + G^{-1} = target  by Anderson-accelerated mixing
// of the map G -> (target - rhs_of(G))^{-1}, with damped fallback steps when
// acceleration stalls. rhs_of(G) = a_0 + sum_i a_i G a_i in both the single
// and the doubled system.
FixedPointResult solve_fixed_point(const std::function<CMat(const CMat&)>& rhs_of,
                                   const CMat& target, CMat G0, double tol, int max_iter,
                                   int plateau_window, bool accelerate = true);

}  // namespace freespec::detail
