#include "freespec/linearize.hpp"

#include <numeric>

#include <nlohmann/json.hpp>

namespace freespec {

MatrixNCPoly Factorization::product() const {
  if (factors.empty()) throw config_error("empty factorization");
  MatrixNCPoly acc = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) acc = multiply(acc, factors[i]);
  return acc;
}

Factorization factorize(const MatrixNCPoly& p) {
  const int d = p.degree();
  if (p.is_zero() || d < 1) throw config_error("factorize: polynomial must be nonzero of degree >= 1");
  const int m = p.m(), mp = p.m_prime(), r = p.r();

  Factorization f;
  f.dims.resize(d + 1);
  f.dims[0] = m;
  for (int j = 1; j < d; ++j) f.dims[j] = (r + 1) * f.dims[j - 1];
  f.dims[d] = mp;
  if (d == 1) {
    f.factors = {p};
    return f;
  }

  // Row factors (1 (x) X_0  1 (x) X_1 ... 1 (x) X_r), block column i holds
  // the identity times X_i (X_0 = unit).
  for (int j = 1; j <= d - 1; ++j) {
    int mj = f.dims[j - 1];
    std::vector<std::pair<NCWord, CMat>> terms;
    for (int i = 0; i <= r; ++i) {
      CMat c = CMat::Zero(mj, (r + 1) * mj);
      c.block(0, i * mj, mj, mj) = CMat::Identity(mj, mj);
      terms.emplace_back(i == 0 ? NCWord{} : NCWord{i}, c);
    }
    f.factors.push_back(MatrixNCPoly::build(mj, (r + 1) * mj, r, terms));
  }

  // Coefficient factor: block rows indexed by the tuples (i_1,...,i_{d-1});
  // the composite index weights i_j by (r+1)^{j-1}, matching the column
  // order produced by the row factors. Words of length l < d are padded on
  // the left with X_0.
  const int md = f.dims[d - 1];
  std::vector<std::pair<NCWord, CMat>> dterms;
  for (const auto& [w, c] : p.terms()) {
    const int len = static_cast<int>(w.size());
    std::vector<int> tuple(d, 0);
    for (int i = 0; i < len; ++i) tuple[d - len + i] = w[i];
    int row = 0, weight = 1;
    for (int j = 0; j < d - 1; ++j) {
      row += tuple[j] * weight;
      weight *= (r + 1);
    }
    CMat block = CMat::Zero(md, mp);
    block.block(row * m, 0, m, mp) = c;
    dterms.emplace_back(tuple[d - 1] == 0 ? NCWord{} : NCWord{tuple[d - 1]}, block);
  }
  f.factors.push_back(MatrixNCPoly::build(md, mp, r, dterms));
  return f;
}

Factorization make_factorization(std::vector<MatrixNCPoly> factors, const MatrixNCPoly* expect,
                                 double tol) {
  if (factors.empty()) throw config_error("factorization needs at least one factor");
  Factorization f;
  f.dims.push_back(factors[0].m());
  for (size_t j = 0; j < factors.size(); ++j) {
    if (factors[j].degree() > 1) throw config_error("factors must have degree <= 1");
    if (factors[j].m() != f.dims.back() && j > 0)
      throw config_error("factor shapes must chain");
    if (j > 0 && factors[j].m() != factors[j - 1].m_prime())
      throw config_error("factor shapes must chain");
    f.dims.push_back(factors[j].m_prime());
  }
  f.factors = std::move(factors);
  if (expect) {
    MatrixNCPoly diff = f.product() - *expect;
    double err = 0.0;
    for (const auto& [w, c] : diff.terms()) err = std::max(err, c.cwiseAbs().maxCoeff());
    if (err > tol)
      throw config_error("factor product deviates from target by " + std::to_string(err));
  }
  return f;
}

LinearPencil assemble_pencil(const Factorization& f) {
  const int d = f.degree();
  if (d < 1) throw config_error("assemble_pencil: empty factorization");
  if (f.dims.front() != f.dims.back())
    throw config_error("assemble_pencil: polynomial must be square (m = m')");

  LinearPencil P;
  P.m = f.dims[0];
  P.r = f.r();
  P.block_dims.assign(f.dims.begin(), f.dims.end() - 1);
  P.k = std::accumulate(P.block_dims.begin(), P.block_dims.end(), 0);
  P.a.assign(P.r + 1, CMat::Zero(P.k, P.k));

  std::vector<int> offset(d, 0);
  for (int j = 1; j < d; ++j) offset[j] = offset[j - 1] + P.block_dims[j - 1];

  for (int j = 0; j < d; ++j) {
    const MatrixNCPoly& u = f.factors[j];
    const int row = offset[j];
    const int col = (j + 1 < d) ? offset[j + 1] : offset[0];
    const int nr = P.block_dims[j];
    const int nc = (j + 1 < d) ? P.block_dims[j + 1] : P.block_dims[0];
    for (const auto& [w, c] : u.terms()) {
      int i = w.empty() ? 0 : w[0];
      P.a[i].block(row, col, nr, nc) += c;
    }
  }
  return P;
}

CMat LinearPencil::Lambda(const CMat& lambda_m) const {
  if (lambda_m.rows() != m || lambda_m.cols() != m)
    throw config_error("Lambda: spectral parameter must be " + std::to_string(m) + "x" +
                       std::to_string(m));
  CMat L = CMat::Identity(k, k);
  L.topLeftCorner(m, m) = lambda_m;
  return L;
}

CMat LinearPencil::corner_E() const {
  CMat E = CMat::Zero(k, k);
  E.topLeftCorner(m, m) = CMat::Identity(m, m);
  return E;
}

CMat LinearPencil::evaluate_S(const std::vector<CMat>& v) const {
  if (static_cast<int>(v.size()) != r)
    throw config_error("evaluate_S: expected " + std::to_string(r) + " matrices");
  Eigen::Index n = v.empty() ? 1 : v[0].rows();
  CMat S = kron(a[0], CMat::Identity(n, n));
  for (int i = 1; i <= r; ++i) S += kron(a[i], v[i - 1]);
  return S;
}

CMat LinearPencil::evaluate_A(const CMat& lambda_m, const std::vector<CMat>& v) const {
  Eigen::Index n = v.empty() ? 1 : v[0].rows();
  return kron(Lambda(lambda_m), CMat::Identity(n, n)) - evaluate_S(v);
}

nlohmann::json LinearPencil::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["m"] = m;
  j["r"] = r;
  j["block_dims"] = block_dims;
  nlohmann::json mats = nlohmann::json::array();
  for (const CMat& ai : a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index u = 0; u < ai.rows(); ++u) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index w = 0; w < ai.cols(); ++w) row.push_back({ai(u, w).real(), ai(u, w).imag()});
      rows.push_back(row);
    }
    mats.push_back(rows);
  }
  j["a"] = mats;
  return j;
}

CMat pencil_block_inverse(const Factorization& f, const CMat& lambda_m,
                          const std::vector<CMat>& v, double cond_limit) {
  const int d = f.degree();
  const int m = f.dims[0];
  if (f.dims.back() != m) throw config_error("block inverse needs a square polynomial");
  Eigen::Index n = v.empty() ? 1 : v[0].rows();

  std::vector<CMat> vj(d);
  for (int j = 0; j < d; ++j) vj[j] = f.factors[j].evaluate(v);

  CMat core = kron(lambda_m, CMat::Identity(n, n)) - f.product().evaluate(v);
  Eigen::JacobiSVD<CMat> svd(core);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > cond_limit) {
    std::string where = "lambda = [";
    for (Eigen::Index i = 0; i < lambda_m.rows(); ++i)
      where += std::to_string(lambda_m(i, i).real()) + "+" +
               std::to_string(lambda_m(i, i).imag()) + "i ";
    throw numeric_error("pencil_block_inverse: lambda (x) 1 - p(v) is numerically singular at " +
                        where + "]");
  }
  CMat core_inv = core.inverse();

  // Left column: 1, u_2..u_d, u_3..u_d, ..., u_d ; right row: 1, u_1,
  // u_1 u_2, ..., u_1..u_{d-1} (all evaluated).
  std::vector<CMat> left(d), right(d);
  left[0] = CMat::Identity(m * n, m * n);
  for (int j = d - 1; j >= 1; --j)
    left[j] = (j == d - 1) ? vj[d - 1] : CMat(vj[j] * left[j + 1]);
  right[0] = CMat::Identity(m * n, m * n);
  for (int j = 1; j < d; ++j) right[j] = (j == 1) ? vj[0] : CMat(right[j - 1] * vj[j - 1]);

  std::vector<int> rows(d), offset(d, 0);
  for (int j = 0; j < d; ++j) rows[j] = f.dims[j] * static_cast<int>(n);
  for (int j = 1; j < d; ++j) offset[j] = offset[j - 1] + rows[j - 1];
  const int kn = offset[d - 1] + rows[d - 1];

  CMat out = CMat::Zero(kn, kn);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.block(offset[i], offset[j], rows[i], rows[j]) = left[i] * core_inv * right[j];

  // Constant part: partial products u_i...u_{j-1} strictly inside the
  // lower-right (d-1) x (d-1) block triangle.
  for (int i = 1; i < d; ++i) {
    CMat partial = CMat::Identity(rows[i], rows[i]);
    for (int j = i; j < d; ++j) {
      out.block(offset[i], offset[j], rows[i], rows[j]) += partial;
      if (j + 1 < d) partial = partial * vj[j];
    }
  }
  return out;
}

}  // namespace freespec
