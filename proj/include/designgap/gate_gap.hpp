#pragma once

// Diagnostics for discrete gate sets: adjoint and convolved ensembles, the
// spectral radius / gap relation, and sweeps of the gap over t.

#include <string>
#include <vector>

#include "designgap/moment.hpp"

namespace designgap {

/// Same probabilities, members U†.
GateEnsemble adjoint_ensemble(const GateEnsemble& e);
/// Members U_i V_j with weights p_i q_j, so that M_{e1∗e2} = M_{e1} M_{e2}.
GateEnsemble convolve(const GateEnsemble& e1, const GateEnsemble& e2);

struct RelationEntry {
  int t = 0;
  double gap = 0.0;
  /// ρ(M_{ν†∗ν} − P) from a full Hermitian eigendecomposition.
  double radius = 0.0;
  /// |ρ − (1 − Δ)²|.
  double relation_residual = 0.0;
  /// ‖H − H†‖ for H = M_{ν†∗ν} − P, before symmetrisation.
  double hermiticity_defect = 0.0;
};

/// Budget on q^{2t} for the dense eigendecomposition in the relation check.
inline constexpr std::size_t kRelationBudget = 1024;

RelationEntry radius_relation_check(const GateEnsemble& e, int t);

struct GateSetDiagnostic {
  std::vector<int> t_values;
  std::vector<double> gaps;
  std::vector<double> radii;
  std::vector<double> relation_residuals;
  /// The sweep stopped before t_max because q^{2t} exceeded the budget.
  bool truncated = false;
  int t_requested = 0;
};

GateSetDiagnostic gap_sweep(const GateEnsemble& e, int t_max);

/// min_φ ‖V − e^{iφ}U‖ from the eigenphases of V U†.
double phase_distance(const CMatrix& v, const CMatrix& u);

}  // namespace designgap
