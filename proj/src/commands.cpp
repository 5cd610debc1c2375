#include "designgap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "designgap/bounds.hpp"
#include "designgap/gate_gap.hpp"
#include "designgap/mc_frame.hpp"

namespace designgap {

namespace {

// Dense per-instance checks (eigensolvers, matrix powers) run only up to this
// dimension from the CLI; larger instances are reported as skipped.
constexpr std::size_t kDenseCheckDim = 1024;

using I64 = std::int64_t;

Report new_report(const std::string& command, const RunConfig& cfg) {
  Report r;
  r.command = command;
  r.meta = {{"max_dim", static_cast<I64>(cfg.max_dim)},
            {"eigen_budget", static_cast<I64>(kEigenBudget)},
            {"svd_fallback_dim", static_cast<I64>(kSvdFallbackDim)},
            {"relation_budget", static_cast<I64>(kRelationBudget)},
            {"dense_check_dim", static_cast<I64>(kDenseCheckDim)},
            {"norm_tol", kNormTol},
            {"check_slack", kCheckSlack},
            {"m_max", static_cast<I64>(cfg.m_max)},
            {"log_base", std::string("e (base-2 variant in depth_log2)")}};
  return r;
}

Record base_record(const std::string& kind, std::uint64_t seed, int t) {
  Record r;
  r.set("kind", kind).set("seed", static_cast<I64>(seed)).set("t", static_cast<I64>(t));
  return r;
}

double replica_dim(int n, int d, int t) { return std::pow(static_cast<double>(d), 2.0 * t * n); }

bool dense_ok(const BuiltArchitecture& b, int t) {
  return replica_dim(b.n_sites, b.local_dim, t) <= static_cast<double>(kDenseCheckDim);
}

// Layers in one application of the repeated unit.
int unit_layers(const BuiltArchitecture& b) {
  if (b.layer) return 1;
  if (b.is_patchwork()) return 2 * b.repetitions * b.fixed->connection_depth();
  return b.fixed->connection_depth();
}

StructuredOperator unit_operator(const BuiltArchitecture& b, int t) {
  if (b.layer) return StructuredOperator(layer_operator(*b.layer, t));
  if (b.is_patchwork()) return patchwork_operator(b.n_sites, b.xi, *b.fixed, b.repetitions, t);
  return block_operator(*b.fixed, t);
}

BuiltArchitecture haarized(const BuiltArchitecture& b) {
  BuiltArchitecture h = b;
  if (h.layer) h.layer = haarized_layer(*h.layer);
  if (h.fixed) h.fixed = designgap::haarized(*h.fixed);
  return h;
}

GapReport unit_gap(const BuiltArchitecture& b, int t) {
  const StructuredOperator m = unit_operator(b, t);
  return spectral_gap(m.as_map(), global_projector(b.n_sites, b.local_dim, t).basis());
}

double unit_local_gap(const BuiltArchitecture& b, int t) {
  return b.layer ? local_gap(*b.layer, t) : local_gap(*b.fixed, t);
}

MomentOperator unit_moment(const BuiltArchitecture& b, int t) {
  const auto q = static_cast<Index>(std::llround(std::pow(b.local_dim, b.n_sites)));
  return MomentOperator{q, t, unit_operator(b, t).to_dense()};
}

// rank P^{(t)} = t! once q ≥ t (the permutation states are independent).
double haar_rank(double q, int t) {
  if (q >= t) {
    double f = 1.0;
    for (int k = 2; k <= t; ++k) f *= k;
    return f;
  }
  return static_cast<double>(cached_haar_projector(static_cast<Index>(q), t).rank());
}

void add_check(CommandResult& out, const BoundCheck& c, std::uint64_t seed, int t,
               const std::vector<std::pair<std::string, double>>& details = {}) {
  Record r = base_record("check", seed, t);
  r.set("check", c.name)
      .set("relation", c.relation)
      .set("lhs", c.lhs)
      .set("rhs", c.rhs)
      .set("slack", c.slack)
      .set("margin", c.margin)
      .set("passed", c.passed);
  out.report.records.push_back(std::move(r));
  for (const auto& [k, v] : details) {
    Record d = base_record("detail", seed, t);
    d.set("check", c.name).set("key", k).set("value", v);
    out.report.records.push_back(std::move(d));
  }
  if (!c.passed) out.checks_failed = true;
}

void add_skip(CommandResult& out, const std::string& check, std::uint64_t seed, int t, const std::string& why) {
  Record r = base_record("skip", seed, t);
  r.set("check", check).set("reason", why);
  out.report.records.push_back(std::move(r));
}

Record depth_record(const DepthBound& d, std::uint64_t seed) {
  Record r = base_record("depth", seed, d.t);
  r.set("formula", d.formula)
      .set("depth", d.depth)
      .set("depth_log2", d.depth_log2)
      .set("n_sites", static_cast<I64>(d.n_sites))
      .set("local_dim", static_cast<I64>(d.local_dim))
      .set("eps", d.eps);
  for (const auto& [k, v] : d.inputs) r.set(k, v);
  return r;
}

// Discrete local ensembles of the architecture, first occurrence order.
std::vector<GateEnsemble> discrete_locals(const BuiltArchitecture& b) {
  std::vector<GateEnsemble> out;
  std::vector<const GateEnsemble*> seen;
  const auto scan = [&](const LayerEnsemble& l) {
    for (const auto& p : l.protocols) {
      for (const auto& loc : p.locals) {
        if (loc.is_haar()) continue;
        const GateEnsemble* e = &loc.ensemble();
        if (std::find(seen.begin(), seen.end(), e) != seen.end()) continue;
        seen.push_back(e);
        out.push_back(*e);
      }
    }
  };
  if (b.layer) scan(*b.layer);
  if (b.fixed) {
    for (const auto& l : b.fixed->layers) scan(l);
  }
  return out;
}

void run_verify_check(CommandResult& out, const std::string& name, const RunConfig& cfg,
                      const BuiltArchitecture& b, std::uint64_t seed, int t) {
  const bool single = b.layer.has_value();
  const bool fixed = b.fixed.has_value() && !b.is_patchwork();
  if (name == "prop1") {
    if (!single) return add_skip(out, name, seed, t, "needs a single-layer family");
    const auto r = prop1_check(*b.layer, t);
    return add_check(out, r.check, seed, t, r.details);
  }
  if (name == "brickwork") {
    if (!fixed || b.fixed->layers.size() != 2) return add_skip(out, name, seed, t, "needs a two-layer block");
    const auto r = brickwork_check(*b.fixed, t);
    return add_check(out, r.check, seed, t, r.details);
  }
  if (name == "prop3") {
    if (!fixed) return add_skip(out, name, seed, t, "needs a fixed architecture");
    const auto r = prop3_check(*b.fixed, t, cfg.m_max);
    if (r.truncated) out.truncated = true;
    auto details = r.details;
    details.emplace_back("truncated", r.truncated ? 1.0 : 0.0);
    return add_check(out, r.check, seed, t, details);
  }
  if (name == "lemma_decomp") {
    if (!fixed) return add_skip(out, name, seed, t, "needs a fixed architecture");
    const auto r = lemma_decomp_check(*b.fixed, t);
    return add_check(out, r.check, seed, t, r.details);
  }
  if (name == "lemma_cs") {
    if (!dense_ok(b, t) || b.is_patchwork()) return add_skip(out, name, seed, t, "dimension above the dense check limit");
    std::vector<CMatrix> ms;
    std::vector<double> ps;
    const auto add_layer = [&](const LayerEnsemble& l, double weight) {
      for (const auto& p : l.protocols) {
        ms.push_back(layer_moment(single_protocol_layer(l.n_sites, l.local_dim, p.pairs, p.locals), t).matrix);
        ps.push_back(weight * p.probability);
      }
    };
    if (single) {
      add_layer(*b.layer, 1.0);
    } else {
      for (const auto& l : b.fixed->layers) add_layer(l, 1.0 / static_cast<double>(b.fixed->layers.size()));
    }
    // Renormalise against rounding in the products.
    double total = 0.0;
    for (double p : ps) total += p;
    for (double& p : ps) p /= total;
    return add_check(out, lemma_cs_check(ms, ps), seed, t);
  }
  if (name == "lemma_protocol") {
    if (!dense_ok(b, t) || b.is_patchwork()) return add_skip(out, name, seed, t, "dimension above the dense check limit");
    const auto run = [&](const LayerEnsemble& l) {
      for (const auto& p : l.protocols) add_check(out, lemma_protocol_check(p, l.n_sites, l.local_dim, t), seed, t);
    };
    if (single) {
      run(*b.layer);
    } else {
      for (const auto& l : b.fixed->layers) run(l);
    }
    return;
  }
  if (name == "lemma_cluster") {
    if (!fixed) return add_skip(out, name, seed, t, "needs a fixed architecture");
    if (!dense_ok(b, t)) return add_skip(out, name, seed, t, "dimension above the dense check limit");
    Cluster mu = layer_cluster(b.fixed->layers.front());
    for (std::size_t j = 1; j < b.fixed->layers.size(); ++j) {
      const auto r = lemma_cluster_check(b.fixed->layers[j], mu, t);
      add_check(out, r.check, seed, t, r.details);
      mu = merge_clusters(layer_cluster(b.fixed->layers[j]), mu);
    }
    return;
  }
  if (name == "radius_relation") {
    std::vector<GateEnsemble> sets = discrete_locals(b);
    if (cfg.gate_set) sets.push_back(build_gate_set(*cfg.gate_set, cfg.gate_set->dim));
    if (sets.empty()) return add_skip(out, name, seed, t, "no discrete gate set");
    for (const auto& e : sets) {
      if (std::pow(static_cast<double>(e.dim()), 2.0 * t) > static_cast<double>(kRelationBudget)) {
        add_skip(out, name, seed, t, "q^{2t} above the relation budget");
        continue;
      }
      const RelationEntry r = radius_relation_check(e, t);
      add_check(out, make_check(name, "1e-6 >= |rho - (1 - gap)^2|", 1e-6, r.relation_residual, 0.0), seed, t,
                {{"q", static_cast<double>(e.dim())},
                 {"gap", r.gap},
                 {"radius", r.radius},
                 {"hermiticity_defect", r.hermiticity_defect}});
    }
    return;
  }
  if (name == "convolution") {
    if (!dense_ok(b, t)) return add_skip(out, name, seed, t, "dimension above the dense check limit");
    const MomentOperator m = unit_moment(b, t);
    const HaarProjector& p = global_projector(b.n_sites, b.local_dim, t);
    const double g = unit_gap(b, t).gap;
    for (int power : cfg.convolution_powers) {
      add_check(out, convolution_power_check(m, p, g, power), seed, t,
                {{"power", static_cast<double>(power)}, {"gap", g}});
    }
    return;
  }
  throw ConfigError("unknown check '" + name + "'");
}

}  // namespace

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names = {"prop1",          "brickwork",     "prop3",
                                                 "lemma_decomp",   "lemma_cs",      "lemma_alg",
                                                 "lemma_protocol", "lemma_cluster", "radius_relation",
                                                 "convolution"};
  return names;
}

CommandResult cmd_gap(const RunConfig& cfg) {
  CommandResult out{new_report("gap", cfg)};
  for (std::uint64_t seed : cfg.seeds) {
    const BuiltArchitecture b = build_architecture(cfg.arch, seed);
    for (int t : cfg.t_values) {
      const GapReport g = unit_gap(b, t);
      const GapReport gh = unit_gap(haarized(b), t);
      Record r = base_record("gap", seed, t);
      r.set("family", b.family)
          .set("n_sites", static_cast<I64>(b.n_sites))
          .set("local_dim", static_cast<I64>(b.local_dim))
          .set("layers", static_cast<I64>(unit_layers(b)))
          .set("gap", g.gap)
          .set("residual_norm", g.residual_norm)
          .set("iterations", static_cast<I64>(g.iterations))
          .set("method", g.method)
          .set("tolerance", g.tolerance)
          .set("gap_haar", gh.gap)
          .set("local_gap", unit_local_gap(b, t));
      out.report.records.push_back(std::move(r));
    }
  }
  return out;
}

CommandResult cmd_depth(const RunConfig& cfg) {
  CommandResult out{new_report("depth", cfg)};
  const int n = cfg.arch.n_sites, d = cfg.arch.local_dim;
  const auto unbounded = [&out](const std::string& formula, std::uint64_t seed, int t, const std::string& why) {
    Record r = base_record("depth", seed, t);
    r.set("formula", formula).set("depth", std::numeric_limits<double>::infinity()).set("status", "unbounded: " + why);
    out.report.records.push_back(std::move(r));
    out.checks_failed = true;
  };
  for (std::uint64_t seed : cfg.seeds) {
    const BuiltArchitecture b = build_architecture(cfg.arch, seed);
    for (int t : cfg.t_values) {
      const double gl = unit_local_gap(b, t);
      double bound = std::numeric_limits<double>::infinity();
      if (b.is_patchwork()) {
        if (d != 2) throw ConfigError("field /local_dim: patchwork depth is defined for qubits (local_dim 2)");
        try {
          const PatchworkDepth p = patchwork_depth(n, t, cfg.eps, gl, cfg.c0);
          Record r = base_record("depth", seed, t);
          r.set("formula", "patchwork")
              .set("depth", 2.0 * p.m)
              .set("n_sites", static_cast<I64>(n))
              .set("local_dim", static_cast<I64>(d))
              .set("eps", cfg.eps)
              .set("xi", static_cast<I64>(p.xi))
              .set("m", p.m)
              .set("m_haar", p.m_haar)
              .set("c0", p.c0)
              .set("local_gap", gl)
              .set("status", "order-level");
          out.report.records.push_back(std::move(r));
        } catch (const UnboundedError& e) {
          unbounded("patchwork", seed, t, e.what());
        }
        continue;
      }
      try {
        if (b.layer) {
          const double gh = unit_gap(haarized(b), t).gap;
          const DepthBound lh = haar_depth(gh, n, t, d, cfg.eps);
          const DepthBound t1 = theorem1_depth(averaged_local_gap({gl}), lh);
          out.report.records.push_back(depth_record(lh, seed));
          out.report.records.push_back(depth_record(t1, seed));
          bound = t1.depth;
        } else {
          const FValue f = f_values(n, t, d, cfg.m_max);
          if (f.truncated) out.truncated = true;
          const bool complete = b.fixed->complete();
          const double fv = complete ? f.f_complete : f.f_incomplete;
          DepthBound t2 = theorem2_depth(averaged_local_gap({gl}), b.fixed->connection_depth(), fv, n, t, d, cfg.eps);
          Record r = depth_record(t2, seed);
          r.set("complete", complete).set("h", static_cast<I64>(f.h)).set("m_computed", static_cast<I64>(f.m_computed));
          r.set("truncated", f.truncated);
          out.report.records.push_back(std::move(r));
          bound = t2.depth;
        }
      } catch (const UnboundedError& e) {
        unbounded(b.layer ? "theorem1" : "theorem2", seed, t, e.what());
        continue;
      }
      if (dense_ok(b, t)) {
        const MomentOperator m = unit_moment(b, t);
        const int units = empirical_formation_depth(m, global_projector(n, d, t), cfg.eps, cfg.max_depth);
        Record r = base_record("depth", seed, t);
        const int layers = units < 0 ? -1 : units * unit_layers(b);
        r.set("formula", "empirical")
            .set("depth", static_cast<double>(layers))
            .set("n_sites", static_cast<I64>(n))
            .set("local_dim", static_cast<I64>(d))
            .set("eps", cfg.eps)
            .set("dominated", units > 0 && layers <= bound);
        out.report.records.push_back(std::move(r));
        if (units < 0 || layers > bound) out.checks_failed = true;
      }
    }
  }
  return out;
}

CommandResult cmd_verify(const RunConfig& cfg) {
  CommandResult out{new_report("verify", cfg)};
  std::vector<std::string> checks = cfg.checks.empty() ? verify_check_names() : cfg.checks;
  for (const auto& c : checks) {
    const auto& names = verify_check_names();
    if (std::find(names.begin(), names.end(), c) == names.end()) throw ConfigError("unknown check '" + c + "'");
  }
  if (std::find(checks.begin(), checks.end(), "lemma_alg") != checks.end()) {
    // Exhaustive grid, independent of seed and t; one summary row.
    double worst = std::numeric_limits<double>::infinity();
    I64 count = 0;
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        for (int l = 0; l <= 6; ++l) {
          for (int k = 0; k <= 6; ++k) {
            worst = std::min(worst, lemma_alg_check(i / 10.0, j / 10.0, l, k).margin);
            ++count;
          }
        }
      }
    }
    Record r;
    r.set("kind", "check").set("check", "lemma_alg").set("relation", "min over grid of lhs - rhs >= 0");
    r.set("lhs", worst).set("rhs", 0.0).set("slack", kCheckSlack).set("margin", worst);
    r.set("passed", worst >= -kCheckSlack).set("grid_points", count);
    out.report.records.push_back(std::move(r));
    if (worst < -kCheckSlack) out.checks_failed = true;
    checks.erase(std::remove(checks.begin(), checks.end(), "lemma_alg"), checks.end());
  }
  for (std::uint64_t seed : cfg.seeds) {
    const BuiltArchitecture b = build_architecture(cfg.arch, seed);
    for (int t : cfg.t_values) {
      for (const auto& c : checks) run_verify_check(out, c, cfg, b, seed, t);
    }
  }
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  CommandResult out{new_report("sweep", cfg)};
  out.report.columns = {"parameter", "value", "t", "metric", "result"};
  std::vector<int> values = cfg.sweep.values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const auto row = [&out](const std::string& param, int value, int t, const std::string& metric, Value result) {
    Record r;
    r.set("parameter", param).set("value", static_cast<I64>(value)).set("t", static_cast<I64>(t));
    r.set("metric", metric).set("result", std::move(result));
    out.report.records.push_back(std::move(r));
  };
  if (cfg.sweep.parameter == "t") {
    if (!cfg.gate_set) throw ConfigError("field /gate_set: a t sweep needs a gate set");
    const GateEnsemble e = build_gate_set(*cfg.gate_set, cfg.gate_set->dim);
    double prev = std::numeric_limits<double>::quiet_NaN();
    int prev_t = 0;
    for (int t : values) {
      if (t < 1) throw ConfigError("field /sweep/values: t must be >= 1");
      if (std::pow(static_cast<double>(e.dim()), 2.0 * t) > static_cast<double>(kRelationBudget)) {
        row("t", t, t, "truncated", static_cast<I64>(1));
        out.truncated = true;
        break;
      }
      const RelationEntry r = radius_relation_check(e, t);
      row("t", t, t, "gap", r.gap);
      row("t", t, t, "radius", r.radius);
      row("t", t, t, "relation_residual", r.relation_residual);
      if (prev_t == t - 1 && prev_t > 0) row("t", t, t, "nonincreasing", r.gap <= prev + kCheckSlack);
      prev = r.gap;
      prev_t = t;
    }
    return out;
  }
  for (int n : values) {
    ArchitectureSpec spec = cfg.arch;
    spec.n_sites = n;
    for (std::uint64_t seed : cfg.seeds) {
      const BuiltArchitecture b = build_architecture(spec, seed);
      for (int t : cfg.t_values) {
        if (replica_dim(n, spec.local_dim, t) > static_cast<double>(cfg.max_dim)) {
          row("n", n, t, "truncated", static_cast<I64>(1));
          out.truncated = true;
          continue;
        }
        row("n", n, t, "gap", unit_gap(b, t).gap);
        row("n", n, t, "gap_haar", unit_gap(haarized(b), t).gap);
        row("n", n, t, "local_gap", unit_local_gap(b, t));
      }
    }
  }
  // Sorted by (parameter, value); rows within a value keep their emission order.
  std::stable_sort(out.report.records.begin(), out.report.records.end(), [](const Record& a, const Record& b) {
    return std::get<I64>(*a.find("value")) < std::get<I64>(*b.find("value"));
  });
  return out;
}

CommandResult cmd_frame(const RunConfig& cfg) {
  CommandResult out{new_report("frame", cfg)};
  for (std::uint64_t seed : cfg.seeds) {
    const BuiltArchitecture b = build_architecture(cfg.arch, seed);
    if (b.is_patchwork()) throw ConfigError("field /family: frame potentials are not sampled for patchwork circuits");
    const CircuitFamily f = b.layer ? CircuitFamily::repeated(*b.layer) : CircuitFamily::cyclic(*b.fixed);
    for (int t : cfg.t_values) {
      const FrameEstimate e = frame_potential(f, cfg.frame.depth, t, cfg.frame.samples, seed);
      Record r = base_record("frame", seed, t);
      r.set("depth", static_cast<I64>(cfg.frame.depth))
          .set("samples", static_cast<I64>(e.samples))
          .set("mean", e.mean)
          .set("std_error", e.std_error)
          .set("haar_value", haar_rank(std::pow(b.local_dim, b.n_sites), t));
      if (e.exact_reference) {
        r.set("exact_reference", *e.exact_reference);
        r.set("z_score", e.std_error > 0 ? std::abs(e.mean - *e.exact_reference) / e.std_error : 0.0);
      }
      out.report.records.push_back(std::move(r));
    }
  }
  return out;
}

CommandResult run_command(const std::string& command, const RunConfig& cfg) {
  struct Guard {
    std::size_t saved = dense_max_dim();
    ~Guard() { set_dense_max_dim(saved); }
  } guard;
  set_dense_max_dim(std::min(cfg.max_dim, guard.saved));
  if (command == "gap") return cmd_gap(cfg);
  if (command == "depth") return cmd_depth(cfg);
  if (command == "verify") return cmd_verify(cfg);
  if (command == "sweep") return cmd_sweep(cfg);
  if (command == "frame") return cmd_frame(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

int exit_status(const CommandResult& r, bool allow_truncation) {
  if (r.checks_failed) return kExitCheckFailed;
  if (r.truncated && !allow_truncation) return kExitTruncated;
  return kExitOk;
}

}  // namespace designgap
