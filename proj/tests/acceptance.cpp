// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance [criterion numbers...]   (all when none given)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "designgap/bounds.hpp"
#include "designgap/commands.hpp"
#include "designgap/ensembles.hpp"
#include "designgap/gate_gap.hpp"
#include "designgap/mc_frame.hpp"

using namespace designgap;

namespace {

// Pinned tolerances.
constexpr double kProjectorTol = 1e-9;
constexpr double kGramTol = 1e-12;
constexpr double kBoundSlack = 1e-8;
constexpr double kRelationTol = 1e-6;
constexpr double kFrameSigmas = 3.0;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

LocalsProvider random_locals(std::uint64_t seed, int members = 3) {
  return [seed, members](std::size_t index, const Pair& p) {
    const std::uint64_t s = derive_seed(seed, index * 131 + static_cast<std::uint64_t>(p.a * 17 + p.b));
    return LocalEnsemble::discrete(ensembles::random(4, members, s));
  };
}

LocalsProvider haar_locals() { return shared_locals(LocalEnsemble::haar()); }
LocalsProvider thi_locals() { return shared_locals(LocalEnsemble::discrete(ensembles::thi_two_qubit())); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Tracks the worst margin of a family of BoundChecks.
struct Tally {
  int count = 0;
  int failures = 0;
  double worst_margin = INFINITY;
  void add(const BoundCheck& c) {
    ++count;
    if (!c.passed) ++failures;
    worst_margin = std::min(worst_margin, c.margin);
  }
  std::string str(const std::string& label) const {
    return label + ": " + std::to_string(failures) + "/" + std::to_string(count) + " violations, worst margin " +
           fmt("%.3g", worst_margin);
  }
};

Outcome projectors() {
  Outcome o;
  double worst_idem = 0, worst_herm = 0, worst_gram = 0;
  for (auto [q, t] : std::vector<std::pair<Index, int>>{{2, 1}, {2, 2}, {3, 2}, {2, 3}}) {
    const HaarProjector p = haar_projector(q, t);
    const CMatrix m = p.matrix();
    worst_idem = std::max(worst_idem, (m * m - m).cwiseAbs().maxCoeff());
    worst_herm = std::max(worst_herm, (m - m.adjoint()).cwiseAbs().maxCoeff());
    // ⟨σ|τ⟩ = q^{cycles(σ⁻¹τ) − t} for the normalised permutation states.
    const CMatrix states = permutation_states(q, t);
    const CMatrix gram = states.adjoint() * states;
    const auto perms = permutations(t);
    for (std::size_t i = 0; i < perms.size(); ++i) {
      for (std::size_t j = 0; j < perms.size(); ++j) {
        const int cycles = cycle_count(relative_permutation(perms[i], perms[j]));
        const double expect = std::pow(static_cast<double>(q), cycles - t);
        worst_gram = std::max(worst_gram, std::abs(gram(i, j) - expect));
      }
    }
  }
  const Index r21 = haar_projector(2, 1).rank();
  const Index r22 = haar_projector(2, 2).rank();
  o.passed = worst_idem <= kProjectorTol && worst_herm <= kProjectorTol && worst_gram <= kGramTol && r21 == 1 &&
             r22 == 2;
  o.detail = fmt("idempotence %.2g, hermiticity %.2g, gram %.2g", worst_idem, worst_herm, worst_gram) +
             ", rank(2,1)=" + std::to_string(r21) + ", rank(2,2)=" + std::to_string(r22);
  return o;
}

Outcome prop1_regression() {
  Tally tally;
  const std::vector<Pair> path_chord = {{0, 1}, {1, 2}, {2, 3}, {0, 2}};
  for (std::uint64_t s = 0; s < 50; ++s) {
    tally.add(prop1_check(make_1d_local(3, 2, random_locals(derive_seed(1, s))), 1).check);
    tally.add(prop1_check(make_1d_local(4, 2, random_locals(derive_seed(2, s))), 1).check);
    tally.add(prop1_check(make_1d_parallel(4, 2, random_locals(derive_seed(3, s))), 1).check);
    tally.add(prop1_check(make_all_to_all(3, 2, random_locals(derive_seed(4, s))), 1).check);
    tally.add(prop1_check(make_graph(4, 2, path_chord, random_locals(derive_seed(5, s))), 1).check);
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    tally.add(prop1_check(make_1d_local(3, 2, random_locals(derive_seed(6, s))), 2).check);
  }
  return {tally.failures == 0 && tally.count == 260, tally.str("prop1")};
}

Outcome brickwork_bound() {
  Tally tally;
  for (std::uint64_t s = 0; s < 20; ++s) {
    tally.add(brickwork_check(make_brickwork_block(3, 2, random_locals(derive_seed(11, s))), 1).check);
    tally.add(brickwork_check(make_brickwork_block(3, 2, random_locals(derive_seed(12, s))), 2).check);
    tally.add(brickwork_check(make_brickwork_block(4, 2, random_locals(derive_seed(13, s))), 1).check);
  }
  return {tally.failures == 0 && tally.count == 60, tally.str("brickwork")};
}

Outcome decomposition() {
  const std::vector<std::vector<Pair>> layers = {
      {{0, 1}, {2, 3}, {4, 5}}, {{1, 2}, {3, 4}}, {{0, 1}, {2, 3}, {4, 5}}, {{1, 2}, {3, 4}}};
  Tally tally;
  for (std::uint64_t s = 0; s < 10; ++s) {
    tally.add(lemma_decomp_check(make_fixed(6, 2, layers, random_locals(derive_seed(21, s))), 1).check);
  }
  return {tally.failures == 0 && tally.count == 10, tally.str("decomposition")};
}

Outcome formation_and_convolution(bool convolution) {
  Outcome o;
  const double eps = 0.01;
  for (const bool haar : {true, false}) {
    const LayerEnsemble layer = make_1d_local(3, 2, haar ? haar_locals() : thi_locals());
    const MomentOperator m = layer_moment(layer, 1);
    const HaarProjector& p = global_projector(3, 2, 1);
    const GapReport gap = layer_gap(layer, 1);
    const std::string tag = haar ? "haar" : "thi";
    if (convolution) {
      Tally tally;
      for (int l : {1, 2, 5, 10, 20}) tally.add(convolution_power_check(m, p, gap.gap, l));
      o.passed = o.passed && tally.failures == 0;
      o.detail += (o.detail.empty() ? "" : "; ") + tally.str(tag);
      continue;
    }
    const int empirical = empirical_formation_depth(m, p, eps, 100000);
    const DepthBound hd = haar_depth(layer_gap(haarized_layer(layer), 1).gap, 3, 1, 2, eps);
    const DepthBound t1 = theorem1_depth(local_gap(layer, 1), hd);
    bool ok = empirical > 0 && empirical <= t1.depth;
    if (haar) ok = ok && empirical <= hd.depth;
    o.passed = o.passed && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + tag + ": empirical " + std::to_string(empirical) +
                fmt(", haar %.4g, theorem1 %.4g", hd.depth, t1.depth);
  }
  return o;
}

std::vector<std::vector<std::vector<int>>> partitions_of_four() {
  return {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}, {{0, 1, 2}}, {{1, 2, 3}},
          {{0, 1}},         {{2, 3}},         {{1, 2}},         {{0, 3}},    {{0, 1, 2, 3}}};
}

Outcome operator_inequalities() {
  Tally cs, protocol, cluster, alg;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(0.05, 1.0);

  // Cauchy–Schwarz on moment operators of random single-qubit ensembles and on
  // unstructured random matrices (t is fixed within an instance).
  for (int i = 0; i < 120; ++i) {
    const int k = 2 + i % 4;
    std::vector<CMatrix> ms;
    std::vector<double> ps;
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      const std::uint64_t s = derive_seed(32, static_cast<std::uint64_t>(10 * i + j));
      if (i % 2 == 0) {
        ms.push_back(moment_operator(ensembles::random(2, 2, s), 1 + i % 3).matrix);
      } else {
        Rng r(s);
        std::normal_distribution<double> nd;
        CMatrix a(8, 8);
        for (Index c = 0; c < 8; ++c) {
          for (Index rr = 0; rr < 8; ++rr) a(rr, c) = {nd(r), nd(r)};
        }
        ms.push_back(a);
      }
      ps.push_back(ud(rng));
      total += ps.back();
    }
    for (auto& p : ps) p /= total;
    cs.add(lemma_cs_check(ms, ps));
  }

  // Protocol inequality on parallel layers (two protocols each) and 2-site t=2.
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto par = make_1d_parallel(4, 2, random_locals(derive_seed(33, s)));
    protocol.add(lemma_protocol_check(par.protocols[0], 4, 2, 1));
    protocol.add(lemma_protocol_check(par.protocols[1], 4, 2, 1));
  }
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto two = make_1d_local(2, 2, random_locals(derive_seed(34, s)));
    protocol.add(lemma_protocol_check(two.protocols[0], 2, 2, 2));
  }

  // Cluster inequality for random single-gate layers against every partition.
  const auto parts = partitions_of_four();
  const std::vector<Pair> pairs = {{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 3}, {0, 3}};
  for (std::uint64_t s = 0; s < 110; ++s) {
    const Pair pr = pairs[s % pairs.size()];
    const auto layer = single_protocol_layer(4, 2, {pr}, {random_locals(derive_seed(35, s))(0, pr)});
    cluster.add(lemma_cluster_check(layer, Cluster{parts[s % parts.size()]}, 1).check);
  }

  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      for (int l = 0; l <= 6; ++l) {
        for (int k = 0; k <= 6; ++k) alg.add(lemma_alg_check(i / 10.0, j / 10.0, l, k));
      }
    }
  }

  Outcome o;
  for (const Tally* t : {&cs, &protocol, &cluster, &alg}) o.passed = o.passed && t->failures == 0 && t->count >= 100;
  o.detail = cs.str("cauchy-schwarz") + "; " + protocol.str("protocol") + "; " + cluster.str("cluster") + "; " +
             alg.str("algebraic");
  return o;
}

Outcome relation_identity() {
  std::vector<GateEnsemble> sets;
  for (std::uint64_t s = 0; s < 30; ++s) sets.push_back(ensembles::random(2, 2 + static_cast<int>(s % 3), derive_seed(41, s)));
  sets.push_back(ensembles::th());
  double worst = 0.0;
  int count = 0;
  for (const auto& e : sets) {
    for (int t = 1; t <= 3; ++t) {
      worst = std::max(worst, radius_relation_check(e, t).relation_residual);
      ++count;
    }
  }
  return {worst <= kRelationTol && count == 93,
          std::to_string(count) + " (ensemble, t) pairs, worst residual " + fmt("%.3g", worst)};
}

Outcome identity_augmentation() {
  Outcome o;
  const GateSetDiagnostic thi = gap_sweep(ensembles::thi(), 4);
  const GateSetDiagnostic th = gap_sweep(ensembles::th(), 4);
  o.passed = !thi.truncated && thi.gaps.size() == 4 && !th.truncated && th.gaps.size() == 4;
  o.detail = "{T,H,I} gaps";
  for (double g : thi.gaps) {
    o.passed = o.passed && g > 0.0;
    o.detail += fmt(" %.6g", g);
  }
  o.detail += "; {T,H} gaps";
  for (double g : th.gaps) o.detail += fmt(" %.6g", g);
  o.detail += "; {T,H} nonincreasing";
  for (std::size_t i = 1; i < th.gaps.size(); ++i) {
    o.detail += th.gaps[i] <= th.gaps[i - 1] + kBoundSlack ? " yes" : " no";
  }
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  constexpr int kSamples = 10000;
  for (int n : {2, 3}) {
    const CircuitFamily family = CircuitFamily::repeated(make_1d_local(n, 2, haar_locals()));
    for (int t : {1, 2}) {
      const FrameEstimate est = frame_potential(family, 2, t, kSamples, derive_seed(51, 10 * n + t));
      const double exact = est.exact_reference.value_or(NAN);
      const double z = std::abs(est.mean - exact) / est.std_error;
      o.passed = o.passed && est.exact_reference && z <= kFrameSigmas;
      o.detail += fmt("N=%g t=%g z=%.2f; ", n, t, z);
    }
  }
  for (int t : {1, 2}) {
    const FrameEstimate est = haar_frame_potential(4, t, kSamples, derive_seed(52, t));
    const double rank = static_cast<double>(haar_projector(4, t).rank());
    const double z = std::abs(est.mean - rank) / est.std_error;
    o.passed = o.passed && z <= kFrameSigmas;
    o.detail += fmt("haar q=4 t=%g mean %.4g vs rank %g", t, est.mean, rank) + fmt(" (z=%.2f); ", z);
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome determinism() {
  const std::vector<std::string> configs = {
      R"({"family": "local1d", "n_sites": 3, "locals": {"random": {"members": 3}}, "t": [1], "seeds": [0, 1, 2]})",
      R"({"family": "brickwork", "n_sites": 4, "locals": {"random": {"members": 2}}, "t": [1], "seeds": [3]})"};
  Outcome o;
  std::size_t bytes = 0;
  bool all_checks = true;
  for (const auto& text : configs) {
    const RunConfig cfg = parse_config(text);
    const CommandResult a = run_command("verify", cfg);
    const CommandResult b = run_command("verify", cfg);
    const std::string ca = to_csv(a.report), cb = to_csv(b.report);
    const std::string ja = to_json(a.report), jb = to_json(b.report);
    o.passed = o.passed && ca == cb && ja == jb;
    all_checks = all_checks && !a.checks_failed;
    bytes += ca.size() + ja.size();
  }
  o.detail = std::to_string(bytes) + " report bytes compared" + (all_checks ? ", all checks passed" : ", some checks failed");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "projector correctness", 5, projectors},
      {2, "single-layer bound regression", 600, prop1_regression},
      {3, "brickwork bound", 1200, brickwork_bound},
      {4, "block decomposition bound", 900, decomposition},
      {5, "formation depth dominance", 120, [] { return formation_and_convolution(false); }},
      {6, "convolution contraction", 120, [] { return formation_and_convolution(true); }},
      {7, "operator inequality suites", 300, operator_inequalities},
      {8, "adjoint-convolution radius relation", 300, relation_identity},
      {9, "identity augmentation contrast", 300, identity_augmentation},
      {10, "Monte Carlo frame potential", 300, monte_carlo},
      {11, "determinism", 600, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool ok = o.passed && in_budget;
    if (!ok) ++failed;
    std::printf("[%s] %2d %s: %s (%.1f s of %.0f s%s)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                secs, c.budget_s, in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
