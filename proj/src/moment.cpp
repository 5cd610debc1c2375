#include "designgap/moment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace designgap {

void GateEnsemble::check_shape(const std::vector<GateMember>& members) {
  if (members.empty()) throw EnsembleError("GateEnsemble: no members");
  const Index q = members.front().unitary.rows();
  if (q < 1) throw EnsembleError("GateEnsemble: empty unitary");
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& u = members[i].unitary;
    if (u.rows() != q || u.cols() != q) {
      throw EnsembleError("GateEnsemble: member " + std::to_string(i) + " is " + std::to_string(u.rows()) + "x" +
                          std::to_string(u.cols()) + ", expected " + std::to_string(q) + "x" + std::to_string(q));
    }
    if (!all_finite(u) || !std::isfinite(members[i].probability)) {
      throw EnsembleError("GateEnsemble: member " + std::to_string(i) + " has non-finite entries");
    }
  }
}

GateEnsemble::GateEnsemble(std::vector<GateMember> members) {
  check_shape(members);
  double total = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].probability < 0.0) {
      throw EnsembleError("GateEnsemble: member " + std::to_string(i) + " has negative probability");
    }
    total += members[i].probability;
    const double defect = unitarity_defect(members[i].unitary);
    if (defect > kUnitarityTol) {
      throw EnsembleError("GateEnsemble: member " + std::to_string(i) + " is not unitary (defect " +
                          std::to_string(defect) + ")");
    }
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw EnsembleError("GateEnsemble: probabilities sum to " + std::to_string(total));
  }
  dim_ = members.front().unitary.rows();
  members_ = std::move(members);
}

GateEnsemble GateEnsemble::unchecked(std::vector<GateMember> members) {
  check_shape(members);
  GateEnsemble e;
  e.dim_ = members.front().unitary.rows();
  e.members_ = std::move(members);
  return e;
}

GateEnsemble GateEnsemble::singleton(CMatrix u) { return GateEnsemble({GateMember{1.0, std::move(u)}}); }

GateEnsemble GateEnsemble::uniform(const std::vector<CMatrix>& unitaries) {
  std::vector<GateMember> members;
  for (const auto& u : unitaries) members.push_back({1.0 / static_cast<double>(unitaries.size()), u});
  return GateEnsemble(std::move(members));
}

CMatrix HaarProjector::matrix() const {
  require_within_guardrail(static_cast<std::size_t>(basis_.rows()), "HaarProjector::matrix");
  return basis_ * basis_.adjoint();
}

std::vector<std::vector<int>> permutations(int t) {
  std::vector<int> p(static_cast<std::size_t>(t));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int cycle_count(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

std::vector<int> relative_permutation(const std::vector<int>& sigma, const std::vector<int>& tau) {
  std::vector<int> inv(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) inv[static_cast<std::size_t>(sigma[i])] = static_cast<int>(i);
  std::vector<int> out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = inv[static_cast<std::size_t>(tau[i])];
  return out;
}

CVector permutation_state(Index q, int t, const std::vector<int>& sigma) {
  if (static_cast<int>(sigma.size()) != t) throw DimensionError("permutation_state: permutation length != t");
  const auto half = static_cast<Index>(guarded_pow(static_cast<std::size_t>(q), static_cast<std::size_t>(t)));
  guarded_pow(static_cast<std::size_t>(q), 2 * static_cast<std::size_t>(t));
  CVector v = CVector::Zero(half * half);
  const double amp = std::pow(static_cast<double>(q), -0.5 * t);
  std::vector<Index> digits(static_cast<std::size_t>(t), 0);
  for (Index fwd = 0; fwd < half; ++fwd) {
    Index rem = fwd;
    for (int r = t - 1; r >= 0; --r) {
      digits[static_cast<std::size_t>(r)] = rem % q;
      rem /= q;
    }
    Index conj = 0;
    for (int r = 0; r < t; ++r) conj = conj * q + digits[static_cast<std::size_t>(sigma[static_cast<std::size_t>(r)])];
    v(fwd * half + conj) = amp;
  }
  return v;
}

CMatrix permutation_states(Index q, int t) {
  const auto perms = permutations(t);
  CMatrix s;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    CVector v = permutation_state(q, t, perms[k]);
    if (k == 0) s.resize(v.size(), static_cast<Index>(perms.size()));
    s.col(static_cast<Index>(k)) = v;
  }
  return s;
}

MomentOperator moment_operator(const GateEnsemble& e, int t) {
  if (t < 1) throw DimensionError("moment_operator: t must be >= 1");
  const auto dim = static_cast<Index>(guarded_pow(static_cast<std::size_t>(e.dim()), 2 * static_cast<std::size_t>(t)));
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& member : e.members()) {
    if (member.probability == 0.0) continue;
    m += member.probability * replica_power(member.unitary, t);
  }
  return MomentOperator{e.dim(), t, std::move(m)};
}

HaarProjector haar_projector(Index q, int t) {
  if (q < 1) throw DimensionError("haar_projector: q must be >= 1");
  if (t < 1 || t > 6) throw DimensionError("haar_projector: t must lie in [1, 6]");
  const CMatrix s = permutation_states(q, t);
  Eigen::ColPivHouseholderQR<CMatrix> qr(s);
  qr.setThreshold(kRankTol);
  const Index rank = qr.rank();
  if (rank == 0) throw Error("haar_projector: permutation states have rank 0");
  CMatrix basis = qr.householderQ() * CMatrix::Identity(s.rows(), rank);
  return HaarProjector(q, t, std::move(basis));
}

const HaarProjector& cached_haar_projector(Index q, int t) {
  static std::mutex mu;
  static std::map<std::pair<Index, int>, std::unique_ptr<HaarProjector>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{q, t}];
  if (!slot) slot = std::make_unique<HaarProjector>(haar_projector(q, t));
  return *slot;
}

void require_orthogonal(const LinearMap& residual_map, const CMatrix& basis) {
  const double left = op_norm_dense(residual_map.apply_adjoint(basis));   // ‖V†R‖
  const double right = op_norm_dense(residual_map.apply(basis));          // ‖RV‖
  if (!(left <= kOrthogonalityTol && right <= kOrthogonalityTol)) {
    throw OrthogonalityError("residual is not orthogonal to the invariant subspace (‖PR‖=" + std::to_string(left) +
                                 ", ‖RP‖=" + std::to_string(right) + "); ensemble members are not unitary",
                             left, right);
  }
}

NormResult robust_norm(const LinearMap& a) {
  try {
    return op_norm_detailed(a);
  } catch (const ConvergenceError&) {
    if (static_cast<std::size_t>(a.dim) > kSvdFallbackDim) throw;
    const CMatrix dense = a.apply(CMatrix::Identity(a.dim, a.dim));
    return NormResult{op_norm_dense(dense), 0, true};
  }
}

namespace {

LinearMap residual_map(const LinearMap& m, const CMatrix& basis) {
  return LinearMap{m.dim,
                   [&m, &basis](const CMatrix& x) -> CMatrix {
                     return m.apply(x) - basis * (basis.adjoint() * x);
                   },
                   [&m, &basis](const CMatrix& x) -> CMatrix {
                     return m.apply_adjoint(x) - basis * (basis.adjoint() * x);
                   }};
}

}  // namespace

GapReport spectral_gap(const LinearMap& m, const CMatrix& basis) {
  if (basis.rows() != m.dim) throw DimensionError("spectral_gap: projector and operator dimensions differ");
  const LinearMap r = residual_map(m, basis);
  require_orthogonal(r, basis);
  GapReport report;
  try {
    const NormResult n = op_norm_detailed(r);
    report.residual_norm = n.value;
    report.iterations = n.iterations;
  } catch (const ConvergenceError&) {
    if (static_cast<std::size_t>(m.dim) > kSvdFallbackDim) throw;
    report.residual_norm = op_norm_dense(r.apply(CMatrix::Identity(m.dim, m.dim)));
    report.method = "dense-svd";
  }
  report.gap = 1.0 - report.residual_norm;
  return report;
}

GapReport spectral_gap(const MomentOperator& m, const HaarProjector& p) {
  if (m.q != p.q() || m.t != p.t()) throw DimensionError("spectral_gap: (q, t) of operator and projector differ");
  return spectral_gap(as_linear_map(m.matrix), p.basis());
}

CMatrix residual(const MomentOperator& m, const HaarProjector& p) {
  if (m.q != p.q() || m.t != p.t()) throw DimensionError("residual: (q, t) of operator and projector differ");
  const LinearMap mm = as_linear_map(m.matrix);
  require_orthogonal(residual_map(mm, p.basis()), p.basis());
  return m.matrix - p.matrix();
}

BoundCheck convolution_bound_check(const std::vector<GapReport>& layers, const MomentOperator& composite,
                                   const HaarProjector& p) {
  if (composite.q != p.q() || composite.t != p.t()) {
    throw DimensionError("convolution_bound_check: (q, t) of composite and projector differ");
  }
  double total_gap = 0.0;
  for (const auto& g : layers) total_gap += g.gap;
  const LinearMap mm = as_linear_map(composite.matrix);
  const NormResult n = robust_norm(residual_map(mm, p.basis()));
  return make_check("convolution", "exp(-sum gaps) >= ||M_L - P||", std::exp(-total_gap), n.value);
}

}  // namespace designgap
