#include "designgap/gate_gap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace designgap {

GateEnsemble adjoint_ensemble(const GateEnsemble& e) {
  std::vector<GateMember> out;
  out.reserve(e.size());
  for (const auto& m : e.members()) out.push_back({m.probability, m.unitary.adjoint()});
  return GateEnsemble::unchecked(std::move(out));
}

GateEnsemble convolve(const GateEnsemble& e1, const GateEnsemble& e2) {
  if (e1.dim() != e2.dim()) throw DimensionError("convolve: ensembles act on different dimensions");
  std::vector<GateMember> out;
  out.reserve(e1.size() * e2.size());
  for (const auto& a : e1.members()) {
    for (const auto& b : e2.members()) out.push_back({a.probability * b.probability, a.unitary * b.unitary});
  }
  return GateEnsemble::unchecked(std::move(out));
}

RelationEntry radius_relation_check(const GateEnsemble& e, int t) {
  const Index q = e.dim();
  const double dim = std::pow(static_cast<double>(q), 2.0 * t);
  if (dim > static_cast<double>(kRelationBudget)) {
    throw GuardrailError("radius_relation_check: q^{2t} = " + std::to_string(static_cast<long long>(dim)) +
                         " exceeds the eigensolver budget " + std::to_string(kRelationBudget));
  }
  const HaarProjector& p = cached_haar_projector(q, t);
  const MomentOperator m = moment_operator(e, t);
  const double g = spectral_gap(m, p).gap;

  const MomentOperator mm = moment_operator(convolve(adjoint_ensemble(e), e), t);
  const CMatrix h = residual(mm, p);
  RelationEntry r;
  r.t = t;
  r.gap = g;
  r.hermiticity_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  const CMatrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hs, Eigen::EigenvaluesOnly);
  r.radius = es.eigenvalues().cwiseAbs().maxCoeff();
  r.relation_residual = std::abs(r.radius - (1.0 - g) * (1.0 - g));
  return r;
}

GateSetDiagnostic gap_sweep(const GateEnsemble& e, int t_max) {
  GateSetDiagnostic d;
  d.t_requested = t_max;
  for (int t = 1; t <= t_max; ++t) {
    if (std::pow(static_cast<double>(e.dim()), 2.0 * t) > static_cast<double>(kRelationBudget)) {
      d.truncated = true;
      break;
    }
    const RelationEntry r = radius_relation_check(e, t);
    d.t_values.push_back(t);
    d.gaps.push_back(r.gap);
    d.radii.push_back(r.radius);
    d.relation_residuals.push_back(r.relation_residual);
  }
  return d;
}

double phase_distance(const CMatrix& v, const CMatrix& u) {
  if (v.rows() != u.rows() || v.cols() != u.cols() || v.rows() != v.cols()) {
    throw DimensionError("phase_distance: inputs must be square and of equal size");
  }
  if (unitarity_defect(v) > kUnitarityTol || unitarity_defect(u) > kUnitarityTol) {
    throw EnsembleError("phase_distance: inputs must be unitary");
  }
  // V U† is normal, so ‖V − e^{iφ}U‖ = max_j |e^{iθ_j} − e^{iφ}|.
  Eigen::ComplexEigenSolver<CMatrix> es(v * u.adjoint(), false);
  std::vector<double> phases;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) phases.push_back(std::arg(es.eigenvalues()(i)));
  std::sort(phases.begin(), phases.end());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double largest_gap = two_pi - (phases.back() - phases.front());
  for (std::size_t i = 1; i < phases.size(); ++i) largest_gap = std::max(largest_gap, phases[i] - phases[i - 1]);
  // The eigenphases fill an arc of length 2π − largest_gap; centering φ on it
  // leaves a worst angular distance of half the arc.
  const double arc = std::max(0.0, two_pi - largest_gap);
  return 2.0 * std::sin(arc / 4.0);
}

}  // namespace designgap
