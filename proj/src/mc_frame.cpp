#include "designgap/mc_frame.hpp"

#include <cmath>

namespace designgap {

namespace {

template <class Draw>
FrameEstimate estimate(int t, int n_samples, std::uint64_t seed, Draw draw) {
  if (t < 1) throw Error("frame_potential: t must be >= 1");
  if (n_samples < 2) throw Error("frame_potential: need at least two samples");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const CMatrix u = draw(derive_seed(seed, 2 * static_cast<std::uint64_t>(i)));
    const CMatrix v = draw(derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    const double x = std::pow(std::norm(u.conjugate().cwiseProduct(v).sum()), t);
    sum += x;
    sum_sq += x * x;
  }
  const double n = n_samples;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return FrameEstimate{t, n_samples, mean, std::sqrt(var / n), std::nullopt};
}

std::size_t pick(const std::vector<double>& weights, Rng& rng) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double r = ud(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  return weights.size() - 1;
}

CMatrix sample_local(const LocalEnsemble& l, int d, Rng& rng) {
  if (l.is_haar()) return haar_sample(static_cast<Index>(d) * d, rng);
  const auto& members = l.ensemble().members();
  std::vector<double> w;
  w.reserve(members.size());
  for (const auto& m : members) w.push_back(m.probability);
  return members[pick(w, rng)].unitary;
}

}  // namespace

CircuitFamily CircuitFamily::repeated(const LayerEnsemble& layer) {
  return CircuitFamily{layer.n_sites, layer.local_dim, {layer}};
}

CircuitFamily CircuitFamily::cyclic(const FixedArchitecture& arch) {
  return CircuitFamily{arch.n_sites, arch.local_dim, arch.layers};
}

void CircuitFamily::validate() const {
  if (cycle.empty()) throw ArchitectureError("circuit family has no layers");
  for (const auto& l : cycle) {
    if (l.n_sites != n_sites || l.local_dim != local_dim) {
      throw ArchitectureError("circuit family layers disagree on N or d");
    }
    l.validate();
  }
}

CMatrix sample_circuit(const CircuitFamily& family, int depth, Rng& rng) {
  family.validate();
  if (depth < 0) throw Error("sample_circuit: depth must be >= 0");
  const std::size_t dim = guarded_pow(static_cast<std::size_t>(family.local_dim), static_cast<std::size_t>(family.n_sites));
  if (dim > kUnitaryBudget) {
    throw GuardrailError("sample_circuit: d^N = " + std::to_string(dim) + " exceeds the unitary budget " +
                         std::to_string(kUnitaryBudget));
  }
  CMatrix u = CMatrix::Identity(static_cast<Index>(dim), static_cast<Index>(dim));
  for (int i = 0; i < depth; ++i) {
    const LayerEnsemble& layer = family.cycle[static_cast<std::size_t>(i) % family.cycle.size()];
    std::vector<double> w;
    for (const auto& p : layer.protocols) w.push_back(p.probability);
    const Protocol& p = layer.protocols[pick(w, rng)];
    for (std::size_t k = 0; k < p.pairs.size(); ++k) {
      const CMatrix g = sample_local(p.locals[k], family.local_dim, rng);
      const int targets[2] = {p.pairs[k].a, p.pairs[k].b};
      apply_embedded(g, slot_offsets(family.n_sites, family.local_dim, 1, targets), u);
    }
  }
  return u;
}

CMatrix sample_circuit(const CircuitFamily& family, int depth, std::uint64_t seed) {
  Rng rng(seed);
  return sample_circuit(family, depth, rng);
}

std::optional<double> exact_frame_potential(const CircuitFamily& family, int depth, int t) {
  family.validate();
  const SiteEmbedding emb{family.n_sites, family.local_dim, t, {}};
  const double dim = std::pow(static_cast<double>(family.local_dim), 2.0 * t * family.n_sites);
  if (dim > static_cast<double>(dense_max_dim())) return std::nullopt;
  const auto n = static_cast<Index>(emb.dim());
  StructuredOperator m(n);
  if (depth > 0) {
    std::vector<SumOperator> chain;
    for (int i = depth - 1; i >= 0; --i) {
      chain.push_back(layer_operator(family.cycle[static_cast<std::size_t>(i) % family.cycle.size()], t));
    }
    m.add(1.0, std::move(chain));
  } else {
    m.add(1.0, {SumOperator::identity(family.n_sites, family.local_dim, t)});
  }
  // ‖M‖_F² accumulated over column chunks.
  double total = 0.0;
  constexpr Index chunk = 256;
  for (Index c0 = 0; c0 < n; c0 += chunk) {
    const Index w = std::min(chunk, n - c0);
    CMatrix e = CMatrix::Zero(n, w);
    for (Index j = 0; j < w; ++j) e(c0 + j, j) = 1.0;
    total += m.apply(e).squaredNorm();
  }
  return total;
}

FrameEstimate frame_potential(const CircuitFamily& family, int depth, int t, int n_samples, std::uint64_t seed) {
  family.validate();
  FrameEstimate f =
      estimate(t, n_samples, seed, [&](std::uint64_t s) { return sample_circuit(family, depth, s); });
  f.exact_reference = exact_frame_potential(family, depth, t);
  return f;
}

FrameEstimate haar_frame_potential(Index q, int t, int n_samples, std::uint64_t seed) {
  FrameEstimate f = estimate(t, n_samples, seed, [q](std::uint64_t s) { return haar_sample(q, s); });
  f.exact_reference = static_cast<double>(cached_haar_projector(q, t).rank());
  return f;
}

}  // namespace designgap
