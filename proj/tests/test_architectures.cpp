#include <doctest.h>

#include <cmath>
#include <random>

#include "designgap/architectures.hpp"
#include "designgap/ensembles.hpp"
#include "designgap/gates.hpp"
#include "test_util.hpp"

using namespace designgap;
using testutil::max_abs_diff;

namespace {

// Dense P on a pair, embedded by the dense embedding routine.
CMatrix embedded_pair_projector(int n, int a, int b, int t) {
  return embed_local(haar_projector(4, t).matrix(), SiteEmbedding{n, 2, t, {a, b}});
}

// |I_q⟩⟨I_q| / q: the t=1 global projector written out directly.
CMatrix global_t1_projector(Index q) {
  CVector v = CVector::Zero(q * q);
  for (Index i = 0; i < q; ++i) v(i * q + i) = 1.0 / std::sqrt(static_cast<double>(q));
  return v * v.adjoint();
}

LocalsProvider random_locals(std::uint64_t seed, int members = 3) {
  return [seed, members](std::size_t index, const Pair& p) {
    const std::uint64_t s = derive_seed(seed, index * 131 + static_cast<std::uint64_t>(p.a * 17 + p.b));
    return LocalEnsemble::discrete(ensembles::random(4, members, s));
  };
}

}  // namespace

TEST_CASE("family constructors") {
  const auto haar = shared_locals(LocalEnsemble::haar());
  const auto l1 = make_1d_local(3, 2, haar);
  REQUIRE(l1.protocols.size() == 2);
  CHECK(l1.protocols[0].probability == 0.5);
  CHECK(l1.protocols[0].pairs == std::vector<Pair>{{0, 1}});
  CHECK(l1.protocols[1].pairs == std::vector<Pair>{{1, 2}});

  const auto a2a = make_all_to_all(3, 2, haar);
  REQUIRE(a2a.protocols.size() == 3);
  for (const auto& p : a2a.protocols) CHECK(p.probability == doctest::Approx(1.0 / 3.0));
  CHECK(make_all_to_all(5, 2, haar).protocols.size() == 10);

  const auto par = make_1d_parallel(4, 2, haar);
  REQUIRE(par.protocols.size() == 2);
  CHECK(par.protocols[0].pairs == std::vector<Pair>{{0, 1}, {2, 3}});
  CHECK(par.protocols[1].pairs == std::vector<Pair>{{1, 2}});
  const auto par5 = make_1d_parallel(5, 2, haar);
  CHECK(par5.protocols[0].pairs.size() == 2);
  CHECK(par5.protocols[1].pairs.size() == 2);

  const auto g = make_graph(4, 2, {{0, 1}, {1, 2}, {2, 3}, {0, 2}}, haar);
  CHECK(g.protocols.size() == 4);
  CHECK(g.protocols[3].probability == 0.25);
  CHECK_THROWS_AS(make_graph(4, 2, {{0, 1}, {2, 3}}, haar), ArchitectureError);
  CHECK_THROWS_AS(make_1d_local(1, 2, haar), ArchitectureError);
}

TEST_CASE("brickwork blocks") {
  const auto haar = shared_locals(LocalEnsemble::haar());
  const auto b4 = make_brickwork_block(4, 2, haar);
  CHECK(b4.connection_depth() == 2);
  CHECK(b4.layers[0].protocols[0].pairs == std::vector<Pair>{{0, 1}, {2, 3}});
  CHECK(b4.layers[1].protocols[0].pairs == std::vector<Pair>{{1, 2}});
  CHECK_FALSE(b4.complete());
  const auto b3 = make_brickwork_block(3, 2, haar);
  CHECK(b3.layers[0].protocols[0].pairs == std::vector<Pair>{{0, 1}});
  CHECK(b3.layers[1].protocols[0].pairs == std::vector<Pair>{{1, 2}});
  CHECK(b3.complete());
  for (int n = 3; n <= 8; ++n) {
    const auto b = make_brickwork_block(n, 2, haar);
    std::vector<Pair> all;
    for (const auto& l : b.layers) all.insert(all.end(), l.protocols[0].pairs.begin(), l.protocols[0].pairs.end());
    CHECK(pairs_connected(n, all));
  }
  CHECK_THROWS_AS(make_brickwork_block(2, 2, haar), ArchitectureError);
  CHECK_THROWS_AS(make_fixed(4, 2, {{{0, 1}}, {{2, 3}}}, haar), ArchitectureError);
}

TEST_CASE("layer_moment examples") {
  const auto haar = shared_locals(LocalEnsemble::haar());
  const auto l3 = make_1d_local(3, 2, haar);
  const CMatrix expected = 0.5 * (embedded_pair_projector(3, 0, 1, 1) + embedded_pair_projector(3, 1, 2, 1));
  CHECK(max_abs_diff(layer_moment(l3, 1).matrix, expected) <= 1e-14);
  CHECK(max_abs_diff(layer_moment(l3, 1).matrix, layer_moment(haarized_layer(l3), 1).matrix) == 0.0);

  const auto e = ensembles::thi_two_qubit();
  const auto l2 = make_1d_local(2, 2, shared_locals(LocalEnsemble::discrete(e)));
  CHECK(max_abs_diff(layer_moment(l2, 2).matrix, moment_operator(e, 2).matrix) <= 1e-14);
}

TEST_CASE("haarized layers") {
  const auto th = shared_locals(LocalEnsemble::discrete(ensembles::thi_two_qubit()));
  const auto l = make_1d_local(3, 2, th);
  const auto h = haarized_layer(l);
  REQUIRE(h.protocols.size() == l.protocols.size());
  for (std::size_t k = 0; k < h.protocols.size(); ++k) {
    CHECK(h.protocols[k].pairs == l.protocols[k].pairs);
    CHECK(h.protocols[k].probability == l.protocols[k].probability);
    for (const auto& loc : h.protocols[k].locals) CHECK(loc.is_haar());
  }
  const auto hh = haarized_layer(h);
  CHECK(max_abs_diff(layer_moment(hh, 1).matrix, layer_moment(h, 1).matrix) == 0.0);

  const CMatrix oracle = 0.5 * (embedded_pair_projector(3, 0, 1, 1) + embedded_pair_projector(3, 1, 2, 1)) -
                         global_t1_projector(8);
  CHECK(std::abs(layer_gap(h, 1).gap - (1.0 - op_norm_dense(oracle))) <= 1e-9);
}

TEST_CASE("cluster projectors") {
  const int n = 3, d = 2;
  CHECK(max_abs_diff(cluster_projector(Cluster{{{0, 1, 2}}}, n, d, 1), global_t1_projector(8)) <= 1e-14);
  CHECK(max_abs_diff(cluster_projector(Cluster{}, n, d, 1), CMatrix::Identity(64, 64)) == 0.0);
  CHECK(max_abs_diff(cluster_projector(Cluster{{{0, 1}}}, n, d, 1), embedded_pair_projector(3, 0, 1, 1)) <= 1e-14);
  CHECK(max_abs_diff(cluster_projector(Cluster{{{1, 0}}}, n, d, 1), embedded_pair_projector(3, 0, 1, 1)) <= 1e-14);

  const std::vector<Cluster> cases = {Cluster{{{0, 1}}}, Cluster{{{1, 2}}}, Cluster{{{0, 2}}}, Cluster{{{0, 1, 2}}},
                                      Cluster{{{0, 1}, {2, 3}}}, Cluster{{{1, 3}}}};
  for (int t = 1; t <= 2; ++t) {
    const int nn = t == 1 ? 4 : 3;
    for (const auto& c : cases) {
      bool fits = true;
      for (const auto& b : c.blocks)
        for (int s : b) fits &= s < nn;
      if (!fits) continue;
      if (t == 1) {
        const CMatrix p = cluster_projector(c, nn, d, t);
        CHECK(op_norm_dense(p * p - p) <= 1e-9);
        CHECK(op_norm_dense(p - p.adjoint()) <= 1e-9);
      } else {
        // 4096-dim: probe idempotence and symmetry on random blocks instead of dense products.
        const StructuredOperator p(cluster_operator(c, nn, d, t));
        const CMatrix x = testutil::random_matrix(p.dim(), 6, 31);
        const CMatrix y = testutil::random_matrix(p.dim(), 6, 32);
        const CMatrix px = p.apply(x);
        CHECK((p.apply(px) - px).norm() <= 1e-9 * x.norm());
        CHECK((y.adjoint() * px - p.apply(y).adjoint() * x).norm() <= 1e-9 * x.norm() * y.norm());
      }
    }
  }
  // The merged projector sits inside each factor's range.
  const Cluster a{{{0, 1}}}, b{{{1, 2}}};
  const CMatrix pm = cluster_projector(merge_clusters(a, b), 3, 2, 1);
  CHECK(op_norm_dense(pm - cluster_projector(a, 3, 2, 1) * pm) <= 1e-9);
  CHECK(op_norm_dense(pm - cluster_projector(b, 3, 2, 1) * pm) <= 1e-9);
}

TEST_CASE("merge_clusters") {
  const Cluster a{{{1, 2}, {5, 6}}}, b{{{1, 3}}};
  CHECK(merge_clusters(a, b) == Cluster{{{1, 2, 3}, {5, 6}}});
  CHECK(merge_clusters(a, Cluster{}) == normalize(a));
  CHECK(merge_clusters(Cluster{}, Cluster{}) == Cluster{});

  std::mt19937_64 rng(5);
  auto random_cluster = [&rng]() {
    std::vector<int> sites = {0, 1, 2, 3, 4, 5};
    std::shuffle(sites.begin(), sites.end(), rng);
    Cluster c;
    std::size_t i = 0;
    while (i < sites.size()) {
      const std::size_t len = 1 + rng() % 3;
      if (rng() % 3 == 0) {
        i += len;
        continue;
      }
      std::vector<int> blk;
      for (std::size_t k = 0; k < len && i < sites.size(); ++k) blk.push_back(sites[i++]);
      c.blocks.push_back(blk);
    }
    return c;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Cluster x = random_cluster(), y = random_cluster(), z = random_cluster();
    CHECK(merge_clusters(x, y) == merge_clusters(y, x));
    CHECK(merge_clusters(merge_clusters(x, y), z) == merge_clusters(x, merge_clusters(y, z)));
  }
}

TEST_CASE("gamma") {
  const Cluster a{{{0, 1}}}, b{{{1, 2}}};
  CHECK(gamma(a, a, a, 3, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  const Cluster c{{{0, 1}}}, e{{{2, 3}}};
  CHECK(gamma(c, e, merge_clusters(c, e), 4, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));

  const Cluster m = merge_clusters(a, b);
  const CMatrix dense = cluster_projector(b, 3, 2, 1) * cluster_projector(a, 3, 2, 1) - cluster_projector(m, 3, 2, 1);
  const double oracle = 1.0 - std::pow(op_norm_dense(dense), 2);
  CHECK(std::abs(gamma(a, b, m, 3, 2, 1) - oracle) <= 1e-9);
  CHECK(std::abs(gamma(a, b, m, 3, 2, 1) - gamma(b, a, m, 3, 2, 1)) <= 1e-8);
  CHECK(std::abs(gamma(a, b, m, 3, 2, 2) - gamma(b, a, m, 3, 2, 2)) <= 1e-8);
  CHECK(gamma(a, b, m, 3, 2, 1) > 0.0);
}

TEST_CASE("Q decomposition is orthogonal to the merged projector") {
  const Cluster a{{{0, 1}}}, b{{{1, 2}}};
  const auto q = q_decomposition(a, b, 3, 2, 1);
  CHECK(op_norm_dense(q.q_nu_minus_mu * q.p_merge) <= 1e-9);
  CHECK(op_norm_dense(q.p_merge * q.q_nu_minus_mu) <= 1e-9);
  CHECK(op_norm_dense(q.q_mu_minus_nu * q.p_merge) <= 1e-9);
  CHECK(op_norm_dense(q.p_merge * q.q_mu_minus_nu) <= 1e-9);
}

TEST_CASE("alpha") {
  const auto haar = make_fixed(3, 2, {{{0, 1}}, {{1, 2}}}, shared_locals(LocalEnsemble::haar()));
  CHECK(alpha(haar.layers[0], 1) == doctest::Approx(1.0).epsilon(1e-12));

  const auto single = single_protocol_layer(2, 2, {{0, 1}}, {LocalEnsemble::discrete(GateEnsemble::singleton(gates::CNOT()))});
  const CMatrix r = replica_power(gates::CNOT(), 1) - haar_projector(4, 1).matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r.adjoint() * r);
  const double oracle = 1.0 - es.eigenvalues().maxCoeff();
  CHECK(std::abs(alpha(single, 1) - oracle) <= 1e-9);
  CHECK(std::abs(alpha(single, 1)) <= 1e-9);

  CHECK_THROWS_AS(alpha(make_1d_local(3, 2, shared_locals(LocalEnsemble::haar())), 1), ArchitectureError);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto arch = make_brickwork_block(4, 2, random_locals(s));
    for (const auto& layer : arch.layers) {
      const double dl = local_gap(layer, 1);
      CHECK(alpha(layer, 1) >= 1.0 - (1.0 - dl) * (1.0 - dl) - 1e-8);
    }
  }
}

TEST_CASE("local_gap") {
  CHECK(local_gap(make_1d_local(3, 2, shared_locals(LocalEnsemble::haar())), 2) == 1.0);

  LayerEnsemble mixed = make_1d_parallel(4, 2, shared_locals(LocalEnsemble::haar()));
  mixed.protocols[0].locals[1] = LocalEnsemble::discrete(GateEnsemble::singleton(gates::CNOT()));
  CHECK(std::abs(local_gap(mixed, 1)) <= 1e-10);

  const auto e = ensembles::thi_two_qubit();
  const auto l = make_1d_local(2, 2, shared_locals(LocalEnsemble::discrete(e)));
  const double oracle = 1.0 - op_norm_dense(moment_operator(e, 2).matrix - haar_projector(4, 2).matrix());
  CHECK(std::abs(local_gap(l, 2) - oracle) <= 1e-9);
  CHECK(oracle > 0.0);
  CHECK(local_gap(l, 1) > 0.0);
}

TEST_CASE("block operator equals the dense layer product") {
  const auto arch = make_brickwork_block(3, 2, random_locals(77));
  const CMatrix m1 = layer_moment(arch.layers[0], 1).matrix, m2 = layer_moment(arch.layers[1], 1).matrix;
  CHECK(max_abs_diff(block_operator(arch, 1).to_dense(), m2 * m1) <= 1e-13);
  const double oracle = 1.0 - op_norm_dense(m2 * m1 - global_t1_projector(8));
  CHECK(std::abs(block_gap(arch, 1).gap - oracle) <= 1e-9);
}

TEST_CASE("patchwork assembly") {
  const auto haar2 = make_fixed(2, 2, {{{0, 1}}}, shared_locals(LocalEnsemble::haar()));
  CHECK(max_abs_diff(patchwork_assemble(4, 1, haar2, 0, 1).matrix, CMatrix::Identity(256, 256)) == 0.0);

  // N=4, xi=1: layer 1 patches (0,1),(2,3); layer 2 patches (1,2),(3,0).
  const CMatrix l1 = embed_local(haar_projector(4, 1).matrix(), SiteEmbedding{4, 2, 1, {0, 1}}) *
                     embed_local(haar_projector(4, 1).matrix(), SiteEmbedding{4, 2, 1, {2, 3}});
  const CMatrix l2 = embed_local(haar_projector(4, 1).matrix(), SiteEmbedding{4, 2, 1, {1, 2}}) *
                     embed_local(haar_projector(4, 1).matrix(), SiteEmbedding{4, 2, 1, {3, 0}});
  const auto pw = patchwork_assemble(4, 1, haar2, 1, 1);
  CHECK(max_abs_diff(pw.matrix, l2 * l1) <= 1e-13);
  const double oracle = 1.0 - op_norm_dense(l2 * l1 - global_t1_projector(16));
  CHECK(std::abs(spectral_gap(pw, global_projector(4, 2, 1)).gap - oracle) <= 1e-9);

  // xi = N/2: one patch per layer, the second rotated by xi.
  const auto tmpl = make_brickwork_block(4, 2, random_locals(3));
  const auto single = patchwork_assemble(4, 2, tmpl, 1, 1);
  const auto rotated = make_fixed(4, 2, {{{2, 3}, {0, 1}}, {{3, 0}}}, [&tmpl](std::size_t layer, const Pair& p) {
    const auto& pr = tmpl.layers[layer].protocols[0];
    for (std::size_t i = 0; i < pr.pairs.size(); ++i) {
      if ((pr.pairs[i].a + 2) % 4 == p.a && (pr.pairs[i].b + 2) % 4 == p.b) return pr.locals[i];
    }
    throw std::logic_error("unmapped pair");
  });
  const CMatrix first = block_operator(tmpl, 1).to_dense();
  const CMatrix second = block_operator(rotated, 1).to_dense();
  CHECK(max_abs_diff(single.matrix, second * first) <= 1e-13);

  CHECK_THROWS_AS(patchwork_assemble(6, 2, tmpl, 1, 1), ArchitectureError);
}

TEST_CASE("L-fold convolution contracts as exp(-L gap)") {
  const auto l = make_1d_local(3, 2, shared_locals(LocalEnsemble::discrete(ensembles::thi_two_qubit())));
  const auto g = layer_gap(l, 1);
  const CMatrix m = layer_moment(l, 1).matrix;
  CMatrix power = CMatrix::Identity(64, 64);
  for (int i = 0; i < 10; ++i) power = m * power;
  const auto p = global_projector(3, 2, 1);
  const auto check = convolution_bound_check(std::vector<GapReport>(10, g), MomentOperator{8, 1, power}, p);
  CHECK(check.passed);
  CHECK(std::abs(check.rhs - op_norm_dense(power - p.matrix())) <= 1e-9);
}
