#include "designgap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace designgap {

namespace {

void require_positive_gap(double g, const char* what) {
  if (!(g > 0.0)) throw UnboundedError(std::string(what) + ": gap is zero, the depth bound is unbounded");
  if (g > 1.0 + kCheckSlack) throw Error(std::string(what) + ": gap exceeds 1");
}

void require_eps(double eps, const char* what) {
  if (!(eps > 0.0)) throw Error(std::string(what) + ": eps must be positive");
}

// ‖a‖ for a dense matrix, SVD for small dimensions.
double dense_norm(const CMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) <= kSvdFallbackDim) return op_norm_dense(a);
  return robust_norm(as_linear_map(a)).value;
}

CMatrix dense_moment(const Protocol& protocol, int n, int d, int t, bool haarize) {
  SumOperator s(n, d, t);
  ProductTerm term{1.0, {}};
  for (std::size_t i = 0; i < protocol.pairs.size(); ++i) {
    const LocalEnsemble l = haarize ? LocalEnsemble::haar() : protocol.locals[i];
    term.factors.push_back(l.factor(protocol.pairs[i], n, d, t));
  }
  s.add(std::move(term));
  return StructuredOperator(s).to_dense();
}

void require_eigen_budget(Index dim, const char* what) {
  if (static_cast<std::size_t>(dim) > kEigenBudget) {
    throw GuardrailError(std::string(what) + ": dimension " + std::to_string(dim) +
                         " exceeds the dense eigensolver budget " + std::to_string(kEigenBudget));
  }
}

}  // namespace

double log_dimension_term(int n, int t, int d, double eps) {
  return 2.0 * n * t * std::log(static_cast<double>(d)) - std::log(eps);
}

double log2_dimension_term(int n, int t, int d, double eps) {
  return 2.0 * n * t * std::log2(static_cast<double>(d)) - std::log2(eps);
}

DepthBound haar_depth(double gap_h, int n, int t, int d, double eps) {
  require_positive_gap(gap_h, "haar_depth");
  require_eps(eps, "haar_depth");
  DepthBound b{"haar", log_dimension_term(n, t, d, eps) / gap_h, log2_dimension_term(n, t, d, eps) / gap_h,
               n, t, d, eps, {{"gap_haar", gap_h}}};
  return b;
}

DepthBound theorem1_depth(double local_gap_avg, const DepthBound& haar) {
  require_positive_gap(local_gap_avg, "theorem1_depth");
  DepthBound b = haar;
  b.formula = "theorem1";
  b.depth = 2.0 * haar.depth / local_gap_avg;
  b.depth_log2 = 2.0 * haar.depth_log2 / local_gap_avg;
  b.inputs.emplace_back("local_gap_avg", local_gap_avg);
  return b;
}

double averaged_local_gap(const std::vector<double>& per_layer_gaps) {
  if (per_layer_gaps.empty()) throw Error("averaged_local_gap: empty gap list");
  double sum = 0.0;
  double best = per_layer_gaps.front();
  for (std::size_t k = 0; k < per_layer_gaps.size(); ++k) {
    sum += per_layer_gaps[k];
    best = std::min(best, sum / static_cast<double>(k + 1));
  }
  return best;
}

DepthBound theorem2_depth(double local_gap_avg, int l, double f_value, int n, int t, int d, double eps) {
  require_positive_gap(local_gap_avg, "theorem2_depth");
  require_positive_gap(f_value, "theorem2_depth (f)");
  require_eps(eps, "theorem2_depth");
  if (l < 1) throw Error("theorem2_depth: connection depth must be >= 1");
  const double prefactor = std::pow(local_gap_avg, -l) * std::pow(f_value, 1 - l) * l;
  return DepthBound{"theorem2",
                    prefactor * log_dimension_term(n, t, d, eps),
                    prefactor * log2_dimension_term(n, t, d, eps),
                    n,
                    t,
                    d,
                    eps,
                    {{"local_gap_avg", local_gap_avg}, {"connection_depth", l}, {"f", f_value}}};
}

PatchworkDepth patchwork_depth(int n, int t, double eps, double local_gap, double c0) {
  require_positive_gap(local_gap, "patchwork_depth");
  require_eps(eps, "patchwork_depth");
  if (n < 1 || t < 1) throw Error("patchwork_depth: N and t must be >= 1");
  const double ratio = static_cast<double>(n) * t * t / eps;
  const int xi = std::max(1, static_cast<int>(std::ceil(std::log2(ratio) - 1e-12)));
  const double m_h = c0 * (xi * t + std::log(n / eps));
  return PatchworkDepth{xi, m_h, m_h / (local_gap * local_gap), c0};
}

int h_exponent(int n) {
  if (n < 1) throw Error("h_exponent: N must be >= 1");
  int a = 0;  // ⌊log₂(N+1)⌋
  for (unsigned v = static_cast<unsigned>(n) + 1; v > 1; v >>= 1) ++a;
  int c = 0;  // ⌈log₂ a⌉
  while ((1 << c) < a) ++c;
  return 8 * c + 1;
}

double haar_brickwork_gap(int m, int d, int t) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, double> cache;
  const auto key = std::make_tuple(m, d, t);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double g = block_gap(make_brickwork_block(m, d, shared_locals(LocalEnsemble::haar())), t).gap;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, g);
  return g;
}

FValue f_values(int n, int t, int d, int m_max) {
  FValue f;
  f.h = h_exponent(n);
  int limit = n;
  if (m_max > 0) limit = std::min(limit, m_max);
  for (int m = 3; m <= limit; ++m) {
    const double dim = std::pow(static_cast<double>(d), 2.0 * t * m);
    if (dim > static_cast<double>(dense_max_dim())) {
      if (f.m_computed == 0) {
        throw GuardrailError("f_complete: no brickwork size m >= 3 fits the dimension guardrail");
      }
      break;
    }
    const double g = haar_brickwork_gap(m, d, t);
    f.brickwork_gaps.emplace_back(m, g);
    f.f_complete = std::min(f.f_complete, g);
    f.m_computed = m;
  }
  f.truncated = n >= 3 && f.m_computed < n;
  f.f_incomplete = std::pow(f.f_complete, f.h);
  return f;
}

double f_complete(int n, int t, int d, int m_max) { return f_values(n, t, d, m_max).f_complete; }
double f_incomplete(int n, int t, int d, int m_max) { return f_values(n, t, d, m_max).f_incomplete; }

CheckReport prop1_check(const LayerEnsemble& layer, int t) {
  const double g = layer_gap(layer, t).gap;
  const double gh = layer_gap(haarized_layer(layer), t).gap;
  const double gl = local_gap(layer, t);
  return CheckReport{make_check("prop1", "gap >= local_gap/2 * gap_haar", g, 0.5 * gl * gh),
                     {{"gap", g}, {"gap_haar", gh}, {"local_gap", gl}},
                     false};
}

CheckReport brickwork_check(const FixedArchitecture& arch, int t) {
  if (arch.layers.size() != 2) throw ArchitectureError("brickwork_check: expected a two-layer block");
  const double g = block_gap(arch, t).gap;
  const double gh = block_gap(haarized(arch), t).gap;
  const double gl = local_gap(arch, t);
  return CheckReport{make_check("brickwork", "gap >= local_gap^2 * gap_haar", g, gl * gl * gh),
                     {{"gap", g}, {"gap_haar", gh}, {"local_gap", gl}},
                     false};
}

CheckReport prop3_check(const FixedArchitecture& arch, int t, int m_max) {
  arch.validate();
  const double g = block_gap(arch, t).gap;
  const double gl = local_gap(arch, t);
  const FValue f = f_values(arch.n_sites, t, arch.local_dim, m_max);
  const bool complete = arch.complete();
  const double lb = complete ? f.f_complete : f.f_incomplete;
  const int l = arch.connection_depth();
  return CheckReport{make_check("prop3", "gap >= local_gap^l * f", g, std::pow(gl, l) * lb),
                     {{"gap", g},
                      {"local_gap", gl},
                      {"connection_depth", l},
                      {"complete", complete ? 1.0 : 0.0},
                      {"f_complete", f.f_complete},
                      {"f_incomplete", f.f_incomplete},
                      {"h", f.h},
                      {"m_computed", f.m_computed}},
                     f.truncated};
}

CheckReport lemma_decomp_check(const FixedArchitecture& arch, int t) {
  arch.validate();
  const double g = block_gap(arch, t).gap;
  double prod = 1.0;
  CheckReport r;
  r.details.emplace_back("gap", g);
  for (std::size_t j = 0; j < arch.layers.size(); ++j) {
    const double a = alpha(arch.layers[j], t);
    prod *= a;
    r.details.emplace_back("alpha_" + std::to_string(j + 1), a);
  }
  const auto gammas = gamma_sequence(arch, t);
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    prod *= gammas[j];
    r.details.emplace_back("gamma_" + std::to_string(j + 2), gammas[j]);
  }
  r.check = make_check("lemma_decomp", "1 - prod(alpha) prod(gamma) >= (1 - gap)^2", 1.0 - prod,
                       (1.0 - g) * (1.0 - g));
  return r;
}

BoundCheck lemma_cs_check(const std::vector<CMatrix>& matrices, const std::vector<double>& probabilities) {
  if (matrices.empty() || matrices.size() != probabilities.size()) {
    throw DimensionError("lemma_cs_check: need one probability per matrix");
  }
  const Index n = matrices.front().rows();
  double total = 0.0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].rows() != n || matrices[i].cols() != n) throw DimensionError("lemma_cs_check: shape mismatch");
    if (probabilities[i] < 0.0) throw EnsembleError("lemma_cs_check: negative probability");
    total += probabilities[i];
  }
  if (std::abs(total - 1.0) > kProbabilityTol) throw EnsembleError("lemma_cs_check: probabilities must sum to 1");
  require_eigen_budget(n, "lemma_cs_check");
  CMatrix second = CMatrix::Zero(n, n);
  CMatrix mean = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    second += probabilities[i] * matrices[i] * matrices[i].adjoint();
    mean += probabilities[i] * matrices[i];
  }
  const double lam = min_eigenvalue_hermitian(second - mean * mean.adjoint());
  return make_check("lemma_cs", "min_eig(E[M M^dag] - E[M] E[M]^dag) >= 0", lam, 0.0, 1e-10);
}

BoundCheck lemma_alg_check(double x, double y, int l, int k) {
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) throw Error("lemma_alg_check: x and y must lie in [0, 1]");
  if (l < 0 || k < 0) throw Error("lemma_alg_check: l and k must be nonnegative");
  const double inner = 1.0 - std::pow(1.0 - x, l) * std::pow(1.0 - y, k);
  const double rhs = 1.0 - std::pow(1.0 - x * x, l) * std::pow(1.0 - y * y, k);
  return make_check("lemma_alg", "(1-(1-x)^l(1-y)^k)^2 >= 1-(1-x^2)^l(1-y^2)^k", inner * inner, rhs);
}

BoundCheck lemma_protocol_check(const Protocol& protocol, int n, int d, int t) {
  if (protocol.locals.size() != protocol.pairs.size()) {
    throw ArchitectureError("lemma_protocol_check: one local ensemble per pair required");
  }
  double g = 1.0;
  for (const auto& l : protocol.locals) g = std::min(g, l.gap(d, t));
  const CMatrix m = dense_moment(protocol, n, d, t, false);
  require_eigen_budget(m.rows(), "lemma_protocol_check");
  const CMatrix mh = dense_moment(protocol, n, d, t, true);
  const double c = (1.0 - g) * (1.0 - g);
  const CMatrix diff = c * CMatrix::Identity(m.rows(), m.cols()) + (1.0 - c) * mh - m * m.adjoint();
  return make_check("lemma_protocol", "min_eig((1-g)^2 I + (1-(1-g)^2) M_H - M M^dag) >= 0",
                    min_eigenvalue_hermitian(diff), 0.0);
}

CheckReport lemma_cluster_check(const LayerEnsemble& layer, const Cluster& mu, int t) {
  const int n = layer.n_sites;
  const int d = layer.local_dim;
  const Cluster nu = layer_cluster(layer);
  const Cluster merged = merge_clusters(nu, mu);
  const double a = alpha(layer, t);
  const double g = gamma(nu, mu, merged, n, d, t);
  const CMatrix m = StructuredOperator(layer_operator(layer, t)).to_dense();
  require_eigen_budget(m.rows(), "lemma_cluster_check");
  const CMatrix pmu = cluster_projector(mu, n, d, t);
  const CMatrix pmerge = cluster_projector(merged, n, d, t);
  const double ag = a * g;
  const CMatrix diff = (1.0 - ag) * CMatrix::Identity(m.rows(), m.cols()) + ag * pmerge - m * pmu * m.adjoint();
  return CheckReport{make_check("lemma_cluster", "min_eig((1-ag) I + ag P_merge - M P_mu M^dag) >= 0",
                                min_eigenvalue_hermitian(diff), 0.0),
                     {{"alpha", a}, {"gamma", g}},
                     false};
}

BoundCheck convolution_power_check(const MomentOperator& m, const HaarProjector& p, double gap, int power) {
  if (power < 0) throw Error("convolution_power_check: power must be >= 0");
  const CMatrix r = residual(m, p);
  CMatrix rl = CMatrix::Identity(r.rows(), r.cols()) - p.matrix();
  for (int i = 0; i < power; ++i) rl = (r * rl).eval();
  // M^L − P = (M − P)^L for L ≥ 1 since MP = PM = P.
  const double norm = dense_norm(rl);
  return make_check("convolution", "exp(-L gap) >= ||M^L - P||", std::exp(-power * gap), norm);
}

int empirical_formation_depth(const MomentOperator& m, const HaarProjector& p, double eps, int max_depth) {
  require_eps(eps, "empirical_formation_depth");
  const double target = eps / std::pow(static_cast<double>(m.q), 2.0 * m.t);
  const CMatrix r = residual(m, p);
  CMatrix rl = r;
  for (int l = 1; l <= max_depth; ++l) {
    if (dense_norm(rl) <= target) return l;
    rl = (r * rl).eval();
  }
  return -1;
}

}  // namespace designgap
