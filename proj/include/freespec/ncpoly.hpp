#pragma once

#include <map>
#include <utility>
#include <vector>

#include "freespec/types.hpp"

#include <nlohmann/json_fwd.hpp>

namespace freespec {

// Word in the generators X_1..X_r; the empty word is the unit monomial.
using NCWord = std::vector<int>;

struct WordLess {
  bool operator()(const NCWord& a, const NCWord& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// Polynomial in r noncommuting generators with m x m' complex matrix
// coefficients, kept in canonical form: like terms collected, zero
// coefficients dropped, words ordered by (length, letters).
class MatrixNCPoly {
 public:
  using TermMap = std::map<NCWord, CMat, WordLess>;

  MatrixNCPoly(int m, int m_prime, int r);

  static MatrixNCPoly build(int m, int m_prime, int r,
                            const std::vector<std::pair<NCWord, CMat>>& terms);
  // Single generator X_i as a 1x1 polynomial.
  static MatrixNCPoly generator(int i, int r);
  static MatrixNCPoly constant(const CMat& c, int r);

  int m() const { return m_; }
  int m_prime() const { return m_prime_; }
  int r() const { return r_; }
  int degree() const;  // 0 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  CMat coeff(const NCWord& w) const;  // zero matrix when absent

  MatrixNCPoly adjoint() const;
  bool is_selfadjoint(double tol = 1e-12) const;

  MatrixNCPoly operator+(const MatrixNCPoly& o) const;
  MatrixNCPoly operator-(const MatrixNCPoly& o) const;
  MatrixNCPoly operator*(const MatrixNCPoly& o) const;
  MatrixNCPoly scaled(cdouble c) const;

  // Sum over words of coeff(w) (x) v_{w_1} ... v_{w_len}; the empty word
  // contributes coeff (x) identity. All v_i must be square of equal size.
  CMat evaluate(const std::vector<CMat>& v) const;

  nlohmann::json to_json() const;
  static MatrixNCPoly from_json(const nlohmann::json& j);

 private:
  void insert_term(const NCWord& w, const CMat& c);
  int m_, m_prime_, r_;
  TermMap terms_;
};

MatrixNCPoly multiply(const MatrixNCPoly& p, const MatrixNCPoly& q);

}  // namespace freespec
