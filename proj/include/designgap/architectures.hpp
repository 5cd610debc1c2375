#pragma once

// Layer and protocol ensembles for the circuit families, cluster projectors,
// and the gamma / alpha / Q quantities of fixed architectures.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "designgap/moment.hpp"
#include "designgap/structured.hpp"

namespace designgap {

struct Pair {
  int a = 0;
  int b = 0;
  friend bool operator==(const Pair&, const Pair&) = default;
};

/// Two-qudit ensemble placed on a pair: either exactly Haar or discrete.
class LocalEnsemble {
 public:
  static LocalEnsemble haar();
  static LocalEnsemble discrete(GateEnsemble e);

  bool is_haar() const { return !ensemble_; }
  /// Throws for Haar locals.
  const GateEnsemble& ensemble() const;

  /// Dense d^{4t} moment operator (Haar: the projector P^{(t)} of dim d²).
  CMatrix moment(int d, int t) const;
  /// 1 − ‖M − P‖ at the two-qudit level (1 for Haar).
  double gap(int d, int t) const;
  LocalFactor factor(const Pair& p, int n_sites, int d, int t) const;

 private:
  std::shared_ptr<const GateEnsemble> ensemble_;
};

struct Protocol {
  double probability = 0.0;
  std::vector<Pair> pairs;
  std::vector<LocalEnsemble> locals;  // one per pair
};

struct LayerEnsemble {
  int n_sites = 0;
  int local_dim = 2;
  std::vector<Protocol> protocols;

  /// Probabilities, disjointness, local dimensions; throws ArchitectureError.
  void validate() const;
};

/// Partition of a subset of sites into blocks (sorted, normalized).
struct Cluster {
  std::vector<std::vector<int>> blocks;
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct FixedArchitecture {
  int n_sites = 0;
  int local_dim = 2;
  std::vector<LayerEnsemble> layers;

  int connection_depth() const { return static_cast<int>(layers.size()); }
  /// Every layer places ⌊N/2⌋ gates.
  bool complete() const;
  void validate() const;
};

/// Chooses the local ensemble for a pair; `index` is the protocol index for
/// single-layer families and the layer index for fixed architectures.
using LocalsProvider = std::function<LocalEnsemble(std::size_t index, const Pair& pair)>;
LocalsProvider shared_locals(LocalEnsemble e);

LayerEnsemble make_1d_local(int n, int d, const LocalsProvider& locals);
LayerEnsemble make_1d_parallel(int n, int d, const LocalsProvider& locals);
LayerEnsemble make_all_to_all(int n, int d, const LocalsProvider& locals);
LayerEnsemble make_graph(int n, int d, const std::vector<Pair>& edges, const LocalsProvider& locals);
FixedArchitecture make_brickwork_block(int n, int d, const LocalsProvider& locals);
/// One single-protocol layer per entry of `layer_pairs`.
FixedArchitecture make_fixed(int n, int d, const std::vector<std::vector<Pair>>& layer_pairs,
                             const LocalsProvider& locals);

/// Single-protocol layer of probability 1.
LayerEnsemble single_protocol_layer(int n, int d, std::vector<Pair> pairs, std::vector<LocalEnsemble> locals);

bool pairs_connected(int n, const std::vector<Pair>& edges);

/// Matrix-free Σ_η q_η ⊗_pairs M_pair ⊗ 𝟙.
SumOperator layer_operator(const LayerEnsemble& layer, int t);
MomentOperator layer_moment(const LayerEnsemble& layer, int t);
LayerEnsemble haarized_layer(const LayerEnsemble& layer);
FixedArchitecture haarized(const FixedArchitecture& arch);

/// Global Haar projector P_all = haar_projector(d^N, t).
const HaarProjector& global_projector(int n, int d, int t);
GapReport layer_gap(const LayerEnsemble& layer, int t);

/// Min over all pairs in all protocols of the two-qudit gap.
double local_gap(const LayerEnsemble& layer, int t);
double local_gap(const FixedArchitecture& arch, int t);

/// M_{ν_l} ⋯ M_{ν_1}.
StructuredOperator block_operator(const FixedArchitecture& arch, int t);
GapReport block_gap(const FixedArchitecture& arch, int t);

Cluster normalize(Cluster c);
Cluster merge_clusters(const Cluster& a, const Cluster& b);
/// Blocks = the pairs of a single-protocol layer.
Cluster layer_cluster(const LayerEnsemble& layer);

SumOperator cluster_operator(const Cluster& c, int n, int d, int t);
CMatrix cluster_projector(const Cluster& c, int n, int d, int t);

/// 1 − ‖P_{c(μ)} P_{c(ν)} − P_{c(ν∗μ)}‖².
double gamma(const Cluster& c_nu, const Cluster& c_mu, const Cluster& c_merge, int n, int d, int t);
/// 1 − ‖M_ν − P_{c(ν)}‖² for a single-protocol layer.
double alpha(const LayerEnsemble& layer, int t);
/// γ(ν_j, ∗_{k<j} ν_k) for j = 2..l.
std::vector<double> gamma_sequence(const FixedArchitecture& arch, int t);

struct QDecomposition {
  CMatrix p_merge;
  CMatrix q_nu_minus_mu;
  CMatrix q_mu_minus_nu;
};
QDecomposition q_decomposition(const Cluster& c_nu, const Cluster& c_mu, int n, int d, int t);

/// Two staggered layers of 2ξ-site patches, each patch applying the template
/// architecture's layers `repetitions` times; the second layer is shifted by ξ
/// with periodic wrap.
StructuredOperator patchwork_operator(int n, int xi, const FixedArchitecture& patch_template, int repetitions,
                                      int t);
MomentOperator patchwork_assemble(int n, int xi, const FixedArchitecture& patch_template, int repetitions, int t);

}  // namespace designgap
