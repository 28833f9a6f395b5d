#pragma once

#include "freespec/ncpoly.hpp"

namespace freespec {

// Brute-force moment oracle for a standard semicircular family
// (tau(x_i^2) = 1, support [-2,2]). Independent of the pencil pipeline.

// Number of non-crossing perfect matchings of the word's positions that
// pair equal generator indices; 0 for odd length. tau(x_{w_1}...x_{w_len}).
double word_trace(const NCWord& w);

// (tr_m (x) tau)(p^j) by symbolic expansion of p^j. Throws numeric_error
// when the expansion exceeds term_guard terms, config_error when p is not
// square or the result has a non-negligible imaginary part.
double poly_moment(const MatrixNCPoly& p, int j, size_t term_guard = 1000000);

}  // namespace freespec
