#include "freespec/rmt.hpp"

#include <algorithm>

namespace freespec {

EnsembleKind ensemble_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "sgrm" || s == "gue") return EnsembleKind::SGRM;
  if (s == "goe") return EnsembleKind::GOE;
  if (s == "goe*" || s == "goestar") return EnsembleKind::GOEstar;
  if (s == "gse") return EnsembleKind::GSE;
  if (s == "gse*" || s == "gsestar") return EnsembleKind::GSEstar;
  throw config_error("unknown ensemble kind: " + name);
}

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::SGRM: return "SGRM";
    case EnsembleKind::GOE: return "GOE";
    case EnsembleKind::GOEstar: return "GOE*";
    case EnsembleKind::GSE: return "GSE";
    case EnsembleKind::GSEstar: return "GSE*";
  }
  return "?";
}

bool is_star(EnsembleKind k) {
  return k == EnsembleKind::GOEstar || k == EnsembleKind::GSEstar;
}

bool is_quaternionic(EnsembleKind k) {
  return k == EnsembleKind::GSE || k == EnsembleKind::GSEstar;
}

int ambient_dim(EnsembleKind k, int n) { return is_quaternionic(k) ? 2 * n : n; }

double exact_tr_sq_mean(EnsembleKind k, int n) {
  double nn = n;
  switch (k) {
    case EnsembleKind::SGRM: return 1.0;
    case EnsembleKind::GOE: return (nn + 1.0) / nn;
    case EnsembleKind::GOEstar: return (nn - 1.0) / nn;
    case EnsembleKind::GSE: return (2.0 * nn - 1.0) / (2.0 * nn);
    case EnsembleKind::GSEstar: return (2.0 * nn + 1.0) / (2.0 * nn);
  }
  return 1.0;
}

namespace {

// Independent N(0, sigma2) entries, one gaussian per ordinal.
RMat real_iid(int n, double sigma2, const CounterRng& rng, uint32_t trial, uint32_t slot) {
  RMat y(n, n);
  double sd = std::sqrt(sigma2);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      y(u, v) = sd * rng.gauss(trial, slot, static_cast<uint32_t>(u) * n + v);
  return y;
}

CMat sgrm(int n, double sigma2, const CounterRng& rng, uint32_t trial, uint32_t slot) {
  CMat x(n, n);
  double sd_diag = std::sqrt(sigma2);
  double sd_off = std::sqrt(sigma2 / 2.0);
  for (int u = 0; u < n; ++u) {
    auto [g1, g2] = rng.gauss_pair(trial, slot, static_cast<uint32_t>(u) * n + u);
    x(u, u) = sd_diag * g1;
    (void)g2;
    for (int v = u + 1; v < n; ++v) {
      auto [a, b] = rng.gauss_pair(trial, slot, static_cast<uint32_t>(u) * n + v);
      x(u, v) = cdouble(sd_off * a, sd_off * b);
      x(v, u) = std::conj(x(u, v));
    }
  }
  return x;
}

// Quaternion y1 + j y2 + k y3 + l y4 realized in M_2(C) with
// j = diag(i,-i), k = [[0,1],[-1,0]], l = [[0,i],[i,0]].
CMat quaternion_realization(const RMat& y1, const RMat& y2, const RMat& y3, const RMat& y4) {
  int n = static_cast<int>(y1.rows());
  CMat y(2 * n, 2 * n);
  y.topLeftCorner(n, n) = y1.cast<cdouble>() + I * y2.cast<cdouble>();
  y.topRightCorner(n, n) = y3.cast<cdouble>() + I * y4.cast<cdouble>();
  y.bottomLeftCorner(n, n) = -y3.cast<cdouble>() + I * y4.cast<cdouble>();
  y.bottomRightCorner(n, n) = y1.cast<cdouble>() - I * y2.cast<cdouble>();
  return y;
}

}  // namespace

CMat sample_matrix(EnsembleKind kind, int n, double sigma2, const CounterRng& rng,
                   uint32_t trial, uint32_t slot) {
  if (n < 1) throw config_error("sample_matrix: n must be >= 1");
  if (sigma2 <= 0.0) sigma2 = 1.0 / n;
  switch (kind) {
    case EnsembleKind::SGRM:
      return sgrm(n, sigma2, rng, trial, slot);
    case EnsembleKind::GOE: {
      RMat y = real_iid(n, sigma2, rng, trial, slot);
      RMat x = (y + y.transpose()) / std::sqrt(2.0);
      return x.cast<cdouble>();
    }
    case EnsembleKind::GOEstar: {
      RMat y = real_iid(n, sigma2, rng, trial, slot);
      RMat anti = (y - y.transpose()) / std::sqrt(2.0);
      return -I * anti.cast<cdouble>();  // 1/(i sqrt 2) (Y - Y^T)
    }
    case EnsembleKind::GSE:
    case EnsembleKind::GSEstar: {
      RMat y1 = real_iid(n, sigma2 / 4.0, rng, trial, slot);
      RMat y2 = real_iid(n, sigma2 / 4.0, rng, trial, slot + 1);
      RMat y3 = real_iid(n, sigma2 / 4.0, rng, trial, slot + 2);
      RMat y4 = real_iid(n, sigma2 / 4.0, rng, trial, slot + 3);
      CMat y = quaternion_realization(y1, y2, y3, y4);
      if (kind == EnsembleKind::GSE) return (y + y.adjoint()) / std::sqrt(2.0);
      return (y - y.adjoint()) / (I * std::sqrt(2.0));
    }
  }
  throw config_error("sample_matrix: bad kind");
}

std::vector<CMat> sample_ensemble(const EnsembleSpec& spec, int slots, uint32_t trial) {
  CounterRng rng(spec.seed);
  std::vector<CMat> out;
  out.reserve(slots);
  for (int i = 0; i < slots; ++i)
    out.push_back(sample_matrix(spec.kind, spec.n, spec.sigma2, rng, trial,
                                static_cast<uint32_t>(4 * i)));
  return out;
}

std::vector<CMat> sample_mix(const std::vector<EnsembleKind>& mix, int n, double sigma2,
                             const CounterRng& rng, uint32_t trial) {
  std::vector<CMat> out;
  out.reserve(mix.size());
  for (size_t i = 0; i < mix.size(); ++i)
    out.push_back(sample_matrix(mix[i], n, sigma2, rng, trial, static_cast<uint32_t>(4 * i)));
  return out;
}

RVec hermitian_eigenvalues(const CMat& h) {
  bool real = (h.imag().cwiseAbs().maxCoeff() == 0.0);
  if (real) {
    Eigen::SelfAdjointEigenSolver<RMat> es(h.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::vector<int> transpose_signs(const std::vector<EnsembleKind>& mix) {
  std::vector<int> eps;
  eps.reserve(mix.size());
  for (auto k : mix) eps.push_back(is_star(k) ? -1 : 1);
  return eps;
}

void validate_mix(const std::vector<EnsembleKind>& mix, int r) {
  if (static_cast<int>(mix.size()) != r)
    throw config_error("ensemble mix must list one kind per generator (" + std::to_string(r) +
                       ")");
  if (mix.empty()) return;
  bool quat = is_quaternionic(mix[0]);
  for (auto k : mix)
    if (is_quaternionic(k) != quat)
      throw config_error("cannot mix quaternionic and non-quaternionic ensembles");
}

}  // namespace freespec
