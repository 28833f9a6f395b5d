#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freespec/ncpoly.hpp"
#include "freespec/rng.hpp"

namespace freespec {

// Gaussian self-adjoint ensembles. SGRM is the complex (unitary) ensemble;
// GOE / GOEstar are the real symmetric and i*antisymmetric ensembles;
// GSE / GSEstar are the quaternionic ones realized as 2n x 2n complex
// matrices. With sigma2 = 1/n every kind has E tr X^2 -> 1.
enum class EnsembleKind { SGRM, GOE, GOEstar, GSE, GSEstar };

EnsembleKind ensemble_from_string(const std::string& name);
std::string to_string(EnsembleKind k);
bool is_star(EnsembleKind k);          // carries transpose sign -1
bool is_quaternionic(EnsembleKind k);  // ambient dimension doubles
int ambient_dim(EnsembleKind k, int n);

// Exact finite-n mean of tr X^2 at sigma2 = 1/n (used by normalization
// tests; the finite-size offsets are O(1/n)).
double exact_tr_sq_mean(EnsembleKind k, int n);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::SGRM;
  int n = 1;
  double sigma2 = 0.0;  // <= 0 means the default 1/n
  uint64_t seed = 0;
};

// One draw, addressed by (seed, trial, slot). The slot keys the generator
// index so that draws for different generators are independent streams.
CMat sample_matrix(EnsembleKind kind, int n, double sigma2, const CounterRng& rng,
                   uint32_t trial, uint32_t slot);

// Independent draws for `slots` generator positions of one kind.
std::vector<CMat> sample_ensemble(const EnsembleSpec& spec, int slots, uint32_t trial = 0);

// One matrix per generator slot, slot strides reserved per generator.
std::vector<CMat> sample_mix(const std::vector<EnsembleKind>& mix, int n, double sigma2,
                             const CounterRng& rng, uint32_t trial);

// Ascending eigenvalues of a Hermitian matrix; exactly-real inputs take the
// real symmetric path (faster, still deterministic).
RVec hermitian_eigenvalues(const CMat& h);

// Transpose signs per generator: +1 plain kinds, -1 star kinds.
std::vector<int> transpose_signs(const std::vector<EnsembleKind>& mix);

void validate_mix(const std::vector<EnsembleKind>& mix, int r);

}  // namespace freespec
