#include "designgap/architectures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace designgap {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }

 private:
  std::vector<int> parent_;
};

std::size_t site_count_of(int d, int n) {
  return guarded_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(n));
}

void require_n(int n, int minimum, const char* what) {
  if (n < minimum) {
    throw ArchitectureError(std::string(what) + ": need N >= " + std::to_string(minimum) + ", got " +
                            std::to_string(n));
  }
}

Protocol protocol_from(double probability, std::vector<Pair> pairs, std::size_t index, const LocalsProvider& locals) {
  Protocol p{probability, std::move(pairs), {}};
  for (const auto& pr : p.pairs) p.locals.push_back(locals(index, pr));
  return p;
}

}  // namespace

LocalEnsemble LocalEnsemble::haar() { return LocalEnsemble{}; }

LocalEnsemble LocalEnsemble::discrete(GateEnsemble e) {
  LocalEnsemble l;
  l.ensemble_ = std::make_shared<const GateEnsemble>(std::move(e));
  return l;
}

const GateEnsemble& LocalEnsemble::ensemble() const {
  if (!ensemble_) throw ArchitectureError("LocalEnsemble: Haar locals carry no discrete ensemble");
  return *ensemble_;
}

CMatrix LocalEnsemble::moment(int d, int t) const {
  if (is_haar()) return cached_haar_projector(static_cast<Index>(d) * d, t).matrix();
  if (ensemble_->dim() != static_cast<Index>(d) * d) {
    throw ArchitectureError("LocalEnsemble: ensemble dimension " + std::to_string(ensemble_->dim()) +
                            " does not match d^2 = " + std::to_string(d * d));
  }
  return moment_operator(*ensemble_, t).matrix;
}

double LocalEnsemble::gap(int d, int t) const {
  if (is_haar()) return 1.0;
  const MomentOperator m{static_cast<Index>(d) * d, t, moment(d, t)};
  return spectral_gap(m, cached_haar_projector(static_cast<Index>(d) * d, t)).gap;
}

LocalFactor LocalEnsemble::factor(const Pair& p, int n_sites, int d, int t) const {
  if (is_haar()) {
    return LocalFactor::projector({p.a, p.b}, cached_haar_projector(static_cast<Index>(d) * d, t).basis(), n_sites, d,
                                  t);
  }
  return LocalFactor::dense({p.a, p.b}, moment(d, t), n_sites, d, t);
}

void LayerEnsemble::validate() const {
  if (n_sites < 1) throw ArchitectureError("layer: n_sites must be >= 1");
  if (local_dim < 2) throw ArchitectureError("layer: local_dim must be >= 2");
  if (protocols.empty()) throw ArchitectureError("layer: no protocols");
  double total = 0.0;
  for (std::size_t k = 0; k < protocols.size(); ++k) {
    const auto& p = protocols[k];
    const std::string where = "layer protocol " + std::to_string(k);
    if (!(p.probability >= 0.0)) throw ArchitectureError(where + ": negative probability");
    total += p.probability;
    if (p.locals.size() != p.pairs.size()) throw ArchitectureError(where + ": one local ensemble per pair required");
    std::set<int> used;
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
      const auto& pr = p.pairs[i];
      if (pr.a == pr.b || pr.a < 0 || pr.b < 0 || pr.a >= n_sites || pr.b >= n_sites) {
        throw ArchitectureError(where + ": invalid pair (" + std::to_string(pr.a) + "," + std::to_string(pr.b) + ")");
      }
      if (!used.insert(pr.a).second || !used.insert(pr.b).second) {
        throw ArchitectureError(where + ": pairs are not disjoint");
      }
      if (!p.locals[i].is_haar() && p.locals[i].ensemble().dim() != static_cast<Index>(local_dim) * local_dim) {
        throw ArchitectureError(where + ": local ensemble dimension does not match d^2");
      }
    }
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw ArchitectureError("layer: protocol probabilities sum to " + std::to_string(total));
  }
}

bool FixedArchitecture::complete() const {
  for (const auto& l : layers) {
    if (static_cast<int>(l.protocols.front().pairs.size()) != n_sites / 2) return false;
  }
  return true;
}

void FixedArchitecture::validate() const {
  if (layers.empty()) throw ArchitectureError("fixed architecture: no layers");
  std::vector<Pair> all;
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const auto& l = layers[j];
    l.validate();
    if (l.n_sites != n_sites || l.local_dim != local_dim) {
      throw ArchitectureError("fixed architecture: layer " + std::to_string(j) + " has mismatched N or d");
    }
    if (l.protocols.size() != 1 || std::abs(l.protocols.front().probability - 1.0) > kProbabilityTol) {
      throw ArchitectureError("fixed architecture: layer " + std::to_string(j) +
                              " must have exactly one protocol of probability 1");
    }
    all.insert(all.end(), l.protocols.front().pairs.begin(), l.protocols.front().pairs.end());
  }
  if (!pairs_connected(n_sites, all)) {
    throw ArchitectureError("fixed architecture: the union of all layers does not connect all sites");
  }
}

LocalsProvider shared_locals(LocalEnsemble e) {
  return [e = std::move(e)](std::size_t, const Pair&) { return e; };
}

bool pairs_connected(int n, const std::vector<Pair>& edges) {
  if (n <= 1) return true;
  UnionFind uf(n);
  for (const auto& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) return false;
    uf.unite(e.a, e.b);
  }
  const int root = uf.find(0);
  for (int s = 1; s < n; ++s) {
    if (uf.find(s) != root) return false;
  }
  return true;
}

LayerEnsemble make_1d_local(int n, int d, const LocalsProvider& locals) {
  require_n(n, 2, "1D local");
  LayerEnsemble l{n, d, {}};
  for (int i = 0; i + 1 < n; ++i) {
    l.protocols.push_back(protocol_from(1.0 / (n - 1), {{i, i + 1}}, static_cast<std::size_t>(i), locals));
  }
  l.validate();
  return l;
}

LayerEnsemble make_1d_parallel(int n, int d, const LocalsProvider& locals) {
  require_n(n, 2, "1D parallel");
  LayerEnsemble l{n, d, {}};
  for (int offset = 0; offset < 2; ++offset) {
    std::vector<Pair> pairs;
    for (int i = offset; i + 1 < n; i += 2) pairs.push_back({i, i + 1});
    l.protocols.push_back(protocol_from(0.5, std::move(pairs), static_cast<std::size_t>(offset), locals));
  }
  l.validate();
  return l;
}

LayerEnsemble make_all_to_all(int n, int d, const LocalsProvider& locals) {
  require_n(n, 2, "all-to-all");
  LayerEnsemble l{n, d, {}};
  const double q = 2.0 / (static_cast<double>(n) * (n - 1));
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) l.protocols.push_back(protocol_from(q, {{i, j}}, k++, locals));
  }
  l.validate();
  return l;
}

LayerEnsemble make_graph(int n, int d, const std::vector<Pair>& edges, const LocalsProvider& locals) {
  require_n(n, 2, "graph");
  if (edges.empty()) throw ArchitectureError("graph: no edges");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (!seen.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second) {
      throw ArchitectureError("graph: duplicate edge (" + std::to_string(e.a) + "," + std::to_string(e.b) + ")");
    }
  }
  if (!pairs_connected(n, edges)) throw ArchitectureError("graph: edges do not connect all sites");
  LayerEnsemble l{n, d, {}};
  for (std::size_t k = 0; k < edges.size(); ++k) {
    l.protocols.push_back(protocol_from(1.0 / static_cast<double>(edges.size()), {edges[k]}, k, locals));
  }
  l.validate();
  return l;
}

LayerEnsemble single_protocol_layer(int n, int d, std::vector<Pair> pairs, std::vector<LocalEnsemble> locals) {
  LayerEnsemble l{n, d, {Protocol{1.0, std::move(pairs), std::move(locals)}}};
  l.validate();
  return l;
}

FixedArchitecture make_fixed(int n, int d, const std::vector<std::vector<Pair>>& layer_pairs,
                             const LocalsProvider& locals) {
  FixedArchitecture arch{n, d, {}};
  for (std::size_t j = 0; j < layer_pairs.size(); ++j) {
    std::vector<LocalEnsemble> ls;
    for (const auto& p : layer_pairs[j]) ls.push_back(locals(j, p));
    arch.layers.push_back(single_protocol_layer(n, d, layer_pairs[j], std::move(ls)));
  }
  arch.validate();
  return arch;
}

FixedArchitecture make_brickwork_block(int n, int d, const LocalsProvider& locals) {
  require_n(n, 3, "brickwork block");
  std::vector<std::vector<Pair>> layers(2);
  for (int offset = 0; offset < 2; ++offset) {
    for (int i = offset; i + 1 < n; i += 2) layers[static_cast<std::size_t>(offset)].push_back({i, i + 1});
  }
  return make_fixed(n, d, layers, locals);
}

SumOperator layer_operator(const LayerEnsemble& layer, int t) {
  layer.validate();
  SumOperator s(layer.n_sites, layer.local_dim, t);
  for (const auto& p : layer.protocols) {
    ProductTerm term{p.probability, {}};
    for (std::size_t i = 0; i < p.pairs.size(); ++i) {
      term.factors.push_back(p.locals[i].factor(p.pairs[i], layer.n_sites, layer.local_dim, t));
    }
    s.add(std::move(term));
  }
  return s;
}

MomentOperator layer_moment(const LayerEnsemble& layer, int t) {
  const auto q = static_cast<Index>(site_count_of(layer.local_dim, layer.n_sites));
  return MomentOperator{q, t, StructuredOperator(layer_operator(layer, t)).to_dense()};
}

LayerEnsemble haarized_layer(const LayerEnsemble& layer) {
  LayerEnsemble out = layer;
  for (auto& p : out.protocols) {
    for (auto& l : p.locals) l = LocalEnsemble::haar();
  }
  return out;
}

FixedArchitecture haarized(const FixedArchitecture& arch) {
  FixedArchitecture out = arch;
  for (auto& l : out.layers) l = haarized_layer(l);
  return out;
}

const HaarProjector& global_projector(int n, int d, int t) {
  return cached_haar_projector(static_cast<Index>(site_count_of(d, n)), t);
}

GapReport layer_gap(const LayerEnsemble& layer, int t) {
  const StructuredOperator m(layer_operator(layer, t));
  return spectral_gap(m.as_map(), global_projector(layer.n_sites, layer.local_dim, t).basis());
}

double local_gap(const LayerEnsemble& layer, int t) {
  layer.validate();
  double g = 1.0;
  for (const auto& p : layer.protocols) {
    for (const auto& l : p.locals) g = std::min(g, l.gap(layer.local_dim, t));
  }
  return g;
}

double local_gap(const FixedArchitecture& arch, int t) {
  double g = 1.0;
  for (const auto& l : arch.layers) g = std::min(g, local_gap(l, t));
  return g;
}

StructuredOperator block_operator(const FixedArchitecture& arch, int t) {
  arch.validate();
  std::vector<SumOperator> chain;
  for (auto it = arch.layers.rbegin(); it != arch.layers.rend(); ++it) chain.push_back(layer_operator(*it, t));
  StructuredOperator out(chain.front().dim());
  out.add(1.0, std::move(chain));
  return out;
}

GapReport block_gap(const FixedArchitecture& arch, int t) {
  const StructuredOperator m = block_operator(arch, t);
  return spectral_gap(m.as_map(), global_projector(arch.n_sites, arch.local_dim, t).basis());
}

Cluster normalize(Cluster c) {
  std::vector<std::vector<int>> blocks;
  for (auto& b : c.blocks) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (!b.empty()) blocks.push_back(std::move(b));
  }
  std::sort(blocks.begin(), blocks.end());
  return Cluster{std::move(blocks)};
}

Cluster merge_clusters(const Cluster& a, const Cluster& b) {
  int max_site = -1;
  for (const auto* c : {&a, &b}) {
    for (const auto& blk : c->blocks) {
      for (int s : blk) {
        if (s < 0) throw ArchitectureError("merge_clusters: negative site index");
        max_site = std::max(max_site, s);
      }
    }
  }
  if (max_site < 0) return Cluster{};
  UnionFind uf(max_site + 1);
  std::vector<bool> present(static_cast<std::size_t>(max_site + 1), false);
  for (const auto* c : {&a, &b}) {
    for (const auto& blk : c->blocks) {
      for (int s : blk) {
        present[static_cast<std::size_t>(s)] = true;
        uf.unite(s, blk.front());
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int s = 0; s <= max_site; ++s) {
    if (present[static_cast<std::size_t>(s)]) groups[uf.find(s)].push_back(s);
  }
  Cluster out;
  for (auto& [root, sites] : groups) out.blocks.push_back(std::move(sites));
  return normalize(std::move(out));
}

Cluster layer_cluster(const LayerEnsemble& layer) {
  if (layer.protocols.size() != 1) {
    throw ArchitectureError("layer_cluster: the cluster is only defined for single-protocol layers");
  }
  Cluster c;
  for (const auto& p : layer.protocols.front().pairs) c.blocks.push_back({p.a, p.b});
  return normalize(std::move(c));
}

SumOperator cluster_operator(const Cluster& c, int n, int d, int t) {
  const Cluster norm = normalize(c);
  SumOperator s(n, d, t);
  ProductTerm term{1.0, {}};
  for (const auto& blk : norm.blocks) {
    const auto q = static_cast<Index>(site_count_of(d, static_cast<int>(blk.size())));
    term.factors.push_back(LocalFactor::projector(blk, cached_haar_projector(q, t).basis(), n, d, t));
  }
  s.add(std::move(term));
  return s;
}

CMatrix cluster_projector(const Cluster& c, int n, int d, int t) {
  return StructuredOperator(cluster_operator(c, n, d, t)).to_dense();
}

double gamma(const Cluster& c_nu, const Cluster& c_mu, const Cluster& c_merge, int n, int d, int t) {
  const StructuredOperator pm(cluster_operator(c_mu, n, d, t));
  const StructuredOperator pn(cluster_operator(c_nu, n, d, t));
  const StructuredOperator pmerge(cluster_operator(c_merge, n, d, t));
  const StructuredOperator diff = pm.times(pn).minus(pmerge);
  const double norm = robust_norm(diff.as_map()).value;
  const double g = 1.0 - norm * norm;
  if (g < -kCheckSlack || g > 1.0 + kCheckSlack) {
    throw Error("gamma: value " + std::to_string(g) + " outside [0, 1]; is c_merge the merge of the clusters?");
  }
  return g;
}

double alpha(const LayerEnsemble& layer, int t) {
  const Cluster c = layer_cluster(layer);
  const StructuredOperator m(layer_operator(layer, t));
  const StructuredOperator diff = m.minus(StructuredOperator(cluster_operator(c, layer.n_sites, layer.local_dim, t)));
  const double norm = robust_norm(diff.as_map()).value;
  return 1.0 - norm * norm;
}

std::vector<double> gamma_sequence(const FixedArchitecture& arch, int t) {
  arch.validate();
  std::vector<double> out;
  Cluster prev = layer_cluster(arch.layers.front());
  for (std::size_t j = 1; j < arch.layers.size(); ++j) {
    const Cluster cj = layer_cluster(arch.layers[j]);
    const Cluster merged = merge_clusters(cj, prev);
    out.push_back(gamma(cj, prev, merged, arch.n_sites, arch.local_dim, t));
    prev = merged;
  }
  return out;
}

QDecomposition q_decomposition(const Cluster& c_nu, const Cluster& c_mu, int n, int d, int t) {
  const CMatrix pm = cluster_projector(merge_clusters(c_nu, c_mu), n, d, t);
  return QDecomposition{pm, cluster_projector(c_nu, n, d, t) - pm, cluster_projector(c_mu, n, d, t) - pm};
}

StructuredOperator patchwork_operator(int n, int xi, const FixedArchitecture& patch_template, int repetitions,
                                      int t) {
  if (xi < 1) throw ArchitectureError("patchwork: xi must be >= 1");
  if (n % (2 * xi) != 0) {
    throw ArchitectureError("patchwork: N=" + std::to_string(n) + " is not a multiple of the patch size 2xi=" +
                            std::to_string(2 * xi));
  }
  if (patch_template.n_sites != 2 * xi) {
    throw ArchitectureError("patchwork: template has " + std::to_string(patch_template.n_sites) +
                            " sites, expected 2xi=" + std::to_string(2 * xi));
  }
  if (repetitions < 0) throw ArchitectureError("patchwork: repetitions must be >= 0");
  patch_template.validate();
  const int d = patch_template.local_dim;
  const int patches = n / (2 * xi);

  // Chain factors in multiplication order; the first patch layer acts first.
  std::vector<SumOperator> chain;
  for (int stagger = 1; stagger >= 0; --stagger) {
    for (int k = 0; k < patches; ++k) {
      const int start = stagger * xi + 2 * xi * k;
      for (int r = 0; r < repetitions; ++r) {
        for (auto it = patch_template.layers.rbegin(); it != patch_template.layers.rend(); ++it) {
          LayerEnsemble mapped{n, d, {}};
          for (const auto& p : it->protocols) {
            Protocol q{p.probability, {}, p.locals};
            for (const auto& pr : p.pairs) q.pairs.push_back({(start + pr.a) % n, (start + pr.b) % n});
            mapped.protocols.push_back(std::move(q));
          }
          chain.push_back(layer_operator(mapped, t));
        }
      }
    }
  }
  StructuredOperator out(static_cast<Index>(SiteEmbedding{n, d, t, {}}.dim()));
  out.add(1.0, std::move(chain));
  return out;
}

MomentOperator patchwork_assemble(int n, int xi, const FixedArchitecture& patch_template, int repetitions, int t) {
  const auto q = static_cast<Index>(site_count_of(patch_template.local_dim, n));
  return MomentOperator{q, t, patchwork_operator(n, xi, patch_template, repetitions, t).to_dense()};
}

}  // namespace designgap
