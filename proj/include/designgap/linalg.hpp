#pragma once

// Dense complex linear algebra on the replicated N-qudit space.
//
// Index convention: the 2t-fold replica space of N qudits of dimension d is
// flattened replica-major, then site-major within each replica, row-major.
// Replicas 0..t-1 carry U, replicas t..2t-1 carry U*. With this layout
// U^{(x)t,t} is the plain Kronecker product U (x) ... (x) U (x) U* (x) ... (x) U*.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "designgap/errors.hpp"

namespace designgap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 16;
/// Largest matrix handed to a dense eigensolver.
inline constexpr std::size_t kEigenBudget = 4096;
/// Largest residual for which a failed power iteration falls back to dense SVD.
inline constexpr std::size_t kSvdFallbackDim = 1024;

/// Dense-dimension guardrail. Initialised from DESIGNGAP_MAX_DIM when set.
std::size_t dense_max_dim();
/// Overrides the guardrail. Not synchronised; call before spawning workers.
void set_dense_max_dim(std::size_t value);

/// base^exp, throwing GuardrailError when the result exceeds dense_max_dim().
std::size_t guarded_pow(std::size_t base, std::size_t exp);
void require_within_guardrail(std::size_t dim, const char* what);

bool all_finite(const CMatrix& a);

CMatrix kron(const CMatrix& a, const CMatrix& b);
/// U^{(x)t} (x) (U*)^{(x)t}.
CMatrix replica_power(const CMatrix& u, int t);

/// Places a local operator on chosen sites of the N-site, 2t-replica space.
struct SiteEmbedding {
  int n_sites = 0;
  int local_dim = 2;
  int t = 1;
  std::vector<int> target_sites;

  /// d^{2tN}.
  std::size_t dim() const;
  /// d^{2t|targets|}.
  std::size_t local_op_dim() const;
  void validate() const;
};

/// Dense embedding: op on the targets' replicas, identity elsewhere. The op's
/// 2t replica factors are ordered forward copies first, each factor ordered as
/// target_sites.
CMatrix embed_local(const CMatrix& op, const SiteEmbedding& emb);

/// Row offsets splitting a global index into (target part, rest part):
/// global = target_offsets[a] + rest_offsets[b].
struct SlotOffsets {
  std::vector<Index> target;
  std::vector<Index> rest;
};
/// `copies` tensor copies of an N-site register (2t for the replica space,
/// 1 for plain state/unitary space).
SlotOffsets slot_offsets(int n_sites, int local_dim, int copies, std::span<const int> targets);

/// block <- embed(op) * block, without materialising the embedding.
void apply_embedded(const CMatrix& op, const SlotOffsets& offsets, CMatrix& block);
/// Same with the local action given as a function on the gathered
/// (local_dim x (rest * cols)) matrix.
void apply_embedded_with(const SlotOffsets& offsets, CMatrix& block,
                         const std::function<CMatrix(const CMatrix&)>& local);

/// Matrix-free square operator; apply and apply_adjoint act on column blocks.
struct LinearMap {
  Index dim = 0;
  std::function<CMatrix(const CMatrix&)> apply;
  std::function<CMatrix(const CMatrix&)> apply_adjoint;
};

LinearMap as_linear_map(const CMatrix& a);

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kNormTol = 1e-10;
inline constexpr int kNormMaxIters = 10000;

/// Largest singular value by block power iteration on a·a† with a
/// Rayleigh-Ritz convergence test on the leading eigenvalue of the Gram
/// matrix. Deterministic start block. Throws ConvergenceError.
NormResult op_norm_detailed(const LinearMap& a, double tol = kNormTol, int max_iters = kNormMaxIters);
double op_norm(const CMatrix& a, double tol = kNormTol, int max_iters = kNormMaxIters);
double op_norm(const LinearMap& a, double tol = kNormTol, int max_iters = kNormMaxIters);

/// Largest singular value by dense SVD.
double op_norm_dense(const CMatrix& a);

/// max |lambda| over the full spectrum (dense eigensolver, <= kEigenBudget).
double spectral_radius(const CMatrix& a);
/// Smallest eigenvalue of the Hermitian part of a (dense, <= kEigenBudget).
double min_eigenvalue_hermitian(const CMatrix& a);

/// Derives an independent seed for stream `index` from `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) moved into Q.
CMatrix haar_sample(Index q, Rng& rng);
CMatrix haar_sample(Index q, std::uint64_t seed);

/// ‖U†U − I‖ (operator norm, dense).
double unitarity_defect(const CMatrix& u);

}  // namespace designgap
