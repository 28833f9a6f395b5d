#include "freespec/ncpoly.hpp"

#include <nlohmann/json.hpp>

namespace freespec {

MatrixNCPoly::MatrixNCPoly(int m, int m_prime, int r)
    : m_(m), m_prime_(m_prime), r_(r) {
  if (m <= 0 || m_prime <= 0) throw config_error("coefficient dimensions must be positive");
  if (r < 0) throw config_error("generator count must be nonnegative");
}

void MatrixNCPoly::insert_term(const NCWord& w, const CMat& c) {
  if (c.rows() != m_ || c.cols() != m_prime_)
    throw config_error("coefficient shape mismatch: expected " + std::to_string(m_) + "x" +
                       std::to_string(m_prime_));
  for (int letter : w)
    if (letter < 1 || letter > r_)
      throw config_error("word letter " + std::to_string(letter) + " out of range 1.." +
                         std::to_string(r_));
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    if (c.cwiseAbs().maxCoeff() != 0.0) terms_.emplace(w, c);
  } else {
    it->second += c;
    if (it->second.cwiseAbs().maxCoeff() == 0.0) terms_.erase(it);
  }
}

MatrixNCPoly MatrixNCPoly::build(int m, int m_prime, int r,
                                 const std::vector<std::pair<NCWord, CMat>>& terms) {
  MatrixNCPoly p(m, m_prime, r);
  for (const auto& [w, c] : terms) p.insert_term(w, c);
  return p;
}

MatrixNCPoly MatrixNCPoly::generator(int i, int r) {
  CMat one = CMat::Identity(1, 1);
  return build(1, 1, r, {{NCWord{i}, one}});
}

MatrixNCPoly MatrixNCPoly::constant(const CMat& c, int r) {
  return build(static_cast<int>(c.rows()), static_cast<int>(c.cols()), r, {{NCWord{}, c}});
}

int MatrixNCPoly::degree() const {
  int d = 0;
  for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
  return d;
}

CMat MatrixNCPoly::coeff(const NCWord& w) const {
  auto it = terms_.find(w);
  if (it == terms_.end()) return CMat::Zero(m_, m_prime_);
  return it->second;
}

MatrixNCPoly MatrixNCPoly::adjoint() const {
  MatrixNCPoly out(m_prime_, m_, r_);
  for (const auto& [w, c] : terms_) {
    NCWord rw(w.rbegin(), w.rend());
    out.insert_term(rw, c.adjoint());
  }
  return out;
}

bool MatrixNCPoly::is_selfadjoint(double tol) const {
  if (m_ != m_prime_) return false;
  for (const auto& [w, c] : terms_) {
    NCWord rw(w.rbegin(), w.rend());
    if ((coeff(rw) - c.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

MatrixNCPoly MatrixNCPoly::operator+(const MatrixNCPoly& o) const {
  if (m_ != o.m_ || m_prime_ != o.m_prime_ || r_ != o.r_)
    throw config_error("polynomial shape mismatch in addition");
  MatrixNCPoly out = *this;
  for (const auto& [w, c] : o.terms_) out.insert_term(w, c);
  return out;
}

MatrixNCPoly MatrixNCPoly::operator-(const MatrixNCPoly& o) const {
  return *this + o.scaled(-1.0);
}

MatrixNCPoly MatrixNCPoly::scaled(cdouble c) const {
  MatrixNCPoly out(m_, m_prime_, r_);
  if (c == 0.0) return out;
  for (const auto& [w, mat] : terms_) out.insert_term(w, CMat(c * mat));
  return out;
}

MatrixNCPoly multiply(const MatrixNCPoly& p, const MatrixNCPoly& q) {
  if (p.m_prime() != q.m()) throw config_error("inner dimension mismatch in product");
  if (p.r() != q.r()) throw config_error("generator count mismatch in product");
  MatrixNCPoly out(p.m(), q.m_prime(), p.r());
  std::vector<std::pair<NCWord, CMat>> acc;
  for (const auto& [w1, c1] : p.terms())
    for (const auto& [w2, c2] : q.terms()) {
      NCWord w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      acc.emplace_back(std::move(w), CMat(c1 * c2));
    }
  return MatrixNCPoly::build(p.m(), q.m_prime(), p.r(), acc);
}

MatrixNCPoly MatrixNCPoly::operator*(const MatrixNCPoly& o) const { return multiply(*this, o); }

CMat MatrixNCPoly::evaluate(const std::vector<CMat>& v) const {
  if (static_cast<int>(v.size()) != r_)
    throw config_error("evaluate: expected " + std::to_string(r_) + " matrices");
  Eigen::Index n = v.empty() ? 1 : v[0].rows();
  for (const auto& vi : v)
    if (vi.rows() != n || vi.cols() != n)
      throw config_error("evaluate: inputs must be square and of equal size");
  CMat out = CMat::Zero(m_ * n, m_prime_ * n);
  for (const auto& [w, c] : terms_) {
    if (w.empty()) {
      out += kron(c, CMat::Identity(n, n));
      continue;
    }
    CMat prod = v[w[0] - 1];
    for (size_t i = 1; i < w.size(); ++i) prod = prod * v[w[i] - 1];
    out += kron(c, prod);
  }
  return out;
}

namespace {

nlohmann::json cmat_to_json(const CMat& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      row.push_back({c(i, j).real(), c(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

CMat cmat_from_json(const nlohmann::json& j, int m, int m_prime) {
  if (!j.is_array() || static_cast<int>(j.size()) != m)
    throw config_error("coeff must have " + std::to_string(m) + " rows");
  CMat c(m, m_prime);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(j[i].size()) != m_prime)
      throw config_error("coeff row must have " + std::to_string(m_prime) + " entries");
    for (int k = 0; k < m_prime; ++k) {
      const auto& e = j[i][k];
      if (!e.is_array() || e.size() != 2) throw config_error("complex entries must be [re,im]");
      c(i, k) = cdouble(e[0].get<double>(), e[1].get<double>());
    }
  }
  return c;
}

}  // namespace

nlohmann::json MatrixNCPoly::to_json() const {
  nlohmann::json j;
  j["m"] = m_;
  j["m_prime"] = m_prime_;
  j["r"] = r_;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [w, c] : terms_) terms.push_back({{"word", w}, {"coeff", cmat_to_json(c)}});
  j["terms"] = terms;
  return j;
}

MatrixNCPoly MatrixNCPoly::from_json(const nlohmann::json& j) {
  for (const char* field : {"m", "m_prime", "r", "terms"})
    if (!j.contains(field)) throw config_error(std::string("polynomial JSON missing field ") + field);
  int m = j["m"].get<int>();
  int m_prime = j["m_prime"].get<int>();
  int r = j["r"].get<int>();
  std::vector<std::pair<NCWord, CMat>> terms;
  for (const auto& t : j["terms"]) {
    if (!t.contains("word") || !t.contains("coeff"))
      throw config_error("each term needs word and coeff");
    terms.emplace_back(t["word"].get<NCWord>(), cmat_from_json(t["coeff"], m, m_prime));
  }
  return build(m, m_prime, r, terms);
}

}  // namespace freespec
