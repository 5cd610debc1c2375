#pragma once

// Gate ensembles, t-th moment operators, Haar projectors built from
// permutation states, and spectral gaps.

#include <string>
#include <vector>

#include "designgap/bound_check.hpp"
#include "designgap/linalg.hpp"

namespace designgap {

inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kOrthogonalityTol = 1e-9;
inline constexpr double kRankTol = 1e-10;

struct GateMember {
  double probability = 0.0;
  CMatrix unitary;
};

/// Finite probability-weighted set of q x q unitaries.
class GateEnsemble {
 public:
  GateEnsemble() = default;
  /// Validates probabilities and unitarity; throws EnsembleError.
  explicit GateEnsemble(std::vector<GateMember> members);
  /// Skips probability/unitarity validation (shape is still checked).
  static GateEnsemble unchecked(std::vector<GateMember> members);
  static GateEnsemble singleton(CMatrix u);
  static GateEnsemble uniform(const std::vector<CMatrix>& unitaries);

  Index dim() const { return dim_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<GateMember>& members() const { return members_; }

 private:
  static void check_shape(const std::vector<GateMember>& members);
  Index dim_ = 0;
  std::vector<GateMember> members_;
};

struct MomentOperator {
  Index q = 0;
  int t = 0;
  CMatrix matrix;
};

/// Orthogonal projector onto span{|σ⟩ : σ ∈ S_t} in (C^q)^{⊗2t}.
class HaarProjector {
 public:
  HaarProjector() = default;
  HaarProjector(Index q, int t, CMatrix basis) : q_(q), t_(t), basis_(std::move(basis)) {}

  Index q() const { return q_; }
  int t() const { return t_; }
  Index dim() const { return basis_.rows(); }
  Index rank() const { return basis_.cols(); }
  /// Orthonormal columns spanning the permutation states.
  const CMatrix& basis() const { return basis_; }
  /// Dense P = basis·basis†.
  CMatrix matrix() const;
  CMatrix apply(const CMatrix& x) const { return basis_ * (basis_.adjoint() * x); }

 private:
  Index q_ = 0;
  int t_ = 0;
  CMatrix basis_;
};

struct GapReport {
  double gap = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  double tolerance = kNormTol;
  /// "power" or "dense-svd".
  std::string method = "power";
};

/// All permutations of {0..t-1} in lexicographic order.
std::vector<std::vector<int>> permutations(int t);
int cycle_count(const std::vector<int>& perm);
/// σ⁻¹ ∘ τ.
std::vector<int> relative_permutation(const std::vector<int>& sigma, const std::vector<int>& tau);
/// |σ⟩ = q^{-t/2} Σ_i |i_1…i_t⟩|i_σ(1)…i_σ(t)⟩.
CVector permutation_state(Index q, int t, const std::vector<int>& sigma);
/// Columns |σ⟩ for σ in permutations(t).
CMatrix permutation_states(Index q, int t);

MomentOperator moment_operator(const GateEnsemble& e, int t);
HaarProjector haar_projector(Index q, int t);
/// Memoised haar_projector for repeated small (q, t).
const HaarProjector& cached_haar_projector(Index q, int t);

/// ‖V†R‖ and ‖RV‖ for the residual map R and the projector basis V; throws
/// OrthogonalityError beyond kOrthogonalityTol.
void require_orthogonal(const LinearMap& residual_map, const CMatrix& basis);

/// Gap of the matrix-free operator m against the projector basis·basis†.
GapReport spectral_gap(const LinearMap& m, const CMatrix& basis);
GapReport spectral_gap(const MomentOperator& m, const HaarProjector& p);
/// ‖a‖ with the dense-SVD fallback for small dimensions on non-convergence.
NormResult robust_norm(const LinearMap& a);

CMatrix residual(const MomentOperator& m, const HaarProjector& p);

/// ‖composite − P‖ <= exp(−Σ gaps).
BoundCheck convolution_bound_check(const std::vector<GapReport>& layers, const MomentOperator& composite,
                                   const HaarProjector& p);

}  // namespace designgap
