#pragma once

// Closed-form depth formulas and numerical checks of the gap inequalities.

#include <string>
#include <utility>
#include <vector>

#include "designgap/architectures.hpp"
#include "designgap/bound_check.hpp"

namespace designgap {

struct DepthBound {
  std::string formula;
  /// Natural-log form; callers round up to whole layers.
  double depth = 0.0;
  /// Same formula with base-2 logarithms.
  double depth_log2 = 0.0;
  int n_sites = 0;
  int t = 0;
  int local_dim = 2;
  double eps = 0.0;
  std::vector<std::pair<std::string, double>> inputs;
};

/// 2Nt ln d − ln ε (and its base-2 counterpart).
double log_dimension_term(int n, int t, int d, double eps);
double log2_dimension_term(int n, int t, int d, double eps);

/// Δ_H⁻¹ (2Nt ln d − ln ε).
DepthBound haar_depth(double gap_h, int n, int t, int d, double eps);
/// 2 Δ_loc⁻¹ L^H.
DepthBound theorem1_depth(double local_gap_avg, const DepthBound& haar);
/// min over prefixes of the running average.
double averaged_local_gap(const std::vector<double>& per_layer_gaps);
/// Δ_loc^{−l} f^{−l+1} l (2Nt ln d − ln ε).
DepthBound theorem2_depth(double local_gap_avg, int l, double f_value, int n, int t, int d, double eps);

struct PatchworkDepth {
  int xi = 0;
  double m_haar = 0.0;
  double m = 0.0;
  double c0 = 1.0;
};
/// ξ = ⌈log₂(Nt²/ε)⌉, m_H = c₀(ξt + ln(N/ε)), m = m_H / Δ_loc². Order-level only.
PatchworkDepth patchwork_depth(int n, int t, double eps, double local_gap, double c0 = 1.0);

/// 8⌈log₂⌊log₂(N+1)⌋⌉ + 1.
int h_exponent(int n);

struct FValue {
  double f_complete = 1.0;
  double f_incomplete = 1.0;
  int h = 1;
  /// Largest brickwork size actually computed (0 when none was needed).
  int m_computed = 0;
  /// The minimum did not range over every m ≤ N.
  bool truncated = false;
  std::vector<std::pair<int, double>> brickwork_gaps;
};
/// Gap of the two-layer Haar brickwork on m sites (memoised).
double haar_brickwork_gap(int m, int d, int t);
/// min over 3 ≤ m ≤ min(m_max, N) of the Haar brickwork gap; m_max = 0 means
/// as far as the dense guardrail allows.
FValue f_values(int n, int t, int d, int m_max = 0);
double f_complete(int n, int t, int d, int m_max = 0);
double f_incomplete(int n, int t, int d, int m_max = 0);

/// A check together with the auxiliary quantities it used.
struct CheckReport {
  BoundCheck check;
  std::vector<std::pair<std::string, double>> details;
  bool truncated = false;
};

/// Δ_ν ≥ (Δ_loc/2) Δ_{ν^H}.
CheckReport prop1_check(const LayerEnsemble& layer, int t);
/// Δ_bw ≥ Δ_loc² Δ_{bw^H} for a two-layer brickwork block.
CheckReport brickwork_check(const FixedArchitecture& arch, int t);
/// Δ_A ≥ Δ_loc^l · (f_c if complete else f_i).
CheckReport prop3_check(const FixedArchitecture& arch, int t, int m_max = 0);
/// 1 − Πα Πγ ≥ (1 − Δ)².
CheckReport lemma_decomp_check(const FixedArchitecture& arch, int t);
/// λ_min(Σ q M M† − (Σ q M)(Σ q M)†) ≥ 0.
BoundCheck lemma_cs_check(const std::vector<CMatrix>& matrices, const std::vector<double>& probabilities);
/// (1 − (1−x)^l (1−y)^k)² ≥ 1 − (1−x²)^l (1−y²)^k.
BoundCheck lemma_alg_check(double x, double y, int l, int k);
/// (1−Δ)²𝟙 + [1−(1−Δ)²] M_{η^H} − M_η M_η† ≽ 0 for a single protocol.
BoundCheck lemma_protocol_check(const Protocol& protocol, int n, int d, int t);
/// [1−αγ]𝟙 + αγ P_{c(ν∗μ)} − M_ν P_{c(μ)} M_ν† ≽ 0 for a single-protocol
/// layer ν and a cluster μ.
CheckReport lemma_cluster_check(const LayerEnsemble& layer, const Cluster& mu, int t);

/// ‖M^L − P‖ ≤ exp(−LΔ) on the dense moment operator.
BoundCheck convolution_power_check(const MomentOperator& m, const HaarProjector& p, double gap, int power);

/// Smallest L ≤ max_depth with ‖M^L − P‖ ≤ ε / q^{2t}; -1 if none.
int empirical_formation_depth(const MomentOperator& m, const HaarProjector& p, double eps, int max_depth);

}  // namespace designgap
