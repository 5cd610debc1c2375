#include "designgap/structured.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace designgap {

namespace {

SiteEmbedding make_embedding(const std::vector<int>& sites, int n_sites, int local_dim, int t) {
  SiteEmbedding emb{n_sites, local_dim, t, sites};
  emb.validate();
  return emb;
}

}  // namespace

LocalFactor LocalFactor::dense(std::vector<int> sites, CMatrix op, int n_sites, int local_dim, int t) {
  const SiteEmbedding emb = make_embedding(sites, n_sites, local_dim, t);
  const auto local = static_cast<Index>(emb.local_op_dim());
  if (op.rows() != local || op.cols() != local) {
    throw DimensionError("LocalFactor: operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                         ", expected " + std::to_string(local));
  }
  LocalFactor f;
  f.offsets_ = slot_offsets(n_sites, local_dim, 2 * t, sites);
  f.sites_ = std::move(sites);
  f.op_ = std::move(op);
  return f;
}

LocalFactor LocalFactor::projector(std::vector<int> sites, CMatrix basis, int n_sites, int local_dim, int t) {
  const SiteEmbedding emb = make_embedding(sites, n_sites, local_dim, t);
  if (basis.rows() != static_cast<Index>(emb.local_op_dim())) {
    throw DimensionError("LocalFactor: projector basis has " + std::to_string(basis.rows()) + " rows, expected " +
                         std::to_string(emb.local_op_dim()));
  }
  LocalFactor f;
  f.offsets_ = slot_offsets(n_sites, local_dim, 2 * t, sites);
  f.sites_ = std::move(sites);
  f.op_ = std::move(basis);
  f.is_projector_ = true;
  return f;
}

CMatrix LocalFactor::local_matrix() const { return is_projector_ ? CMatrix(op_ * op_.adjoint()) : op_; }

void LocalFactor::apply(CMatrix& x, bool adjoint) const {
  if (is_projector_) {
    apply_embedded_with(offsets_, x, [this](const CMatrix& g) -> CMatrix { return op_ * (op_.adjoint() * g); });
  } else if (adjoint) {
    apply_embedded_with(offsets_, x, [this](const CMatrix& g) -> CMatrix { return op_.adjoint() * g; });
  } else {
    apply_embedded_with(offsets_, x, [this](const CMatrix& g) -> CMatrix { return op_ * g; });
  }
}

SumOperator::SumOperator(int n_sites, int local_dim, int t)
    : n_sites_(n_sites),
      local_dim_(local_dim),
      t_(t),
      dim_(static_cast<Index>(SiteEmbedding{n_sites, local_dim, t, {}}.dim())) {}

SumOperator SumOperator::identity(int n_sites, int local_dim, int t) {
  SumOperator s(n_sites, local_dim, t);
  s.add(ProductTerm{1.0, {}});
  return s;
}

void SumOperator::add(ProductTerm term) {
  std::vector<bool> used(static_cast<std::size_t>(n_sites_), false);
  for (const auto& f : term.factors) {
    for (int s : f.sites()) {
      if (s < 0 || s >= n_sites_) throw DimensionError("SumOperator: factor site out of range");
      if (used[static_cast<std::size_t>(s)]) throw DimensionError("SumOperator: factors of a term overlap");
      used[static_cast<std::size_t>(s)] = true;
    }
  }
  terms_.push_back(std::move(term));
}

CMatrix SumOperator::apply(const CMatrix& x, bool adjoint) const {
  if (x.rows() != dim_) throw DimensionError("SumOperator::apply: row count mismatch");
  CMatrix acc = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& term : terms_) {
    if (term.weight == 0.0) continue;
    CMatrix y = x;
    for (const auto& f : term.factors) f.apply(y, adjoint);
    acc += term.weight * y;
  }
  return acc;
}

StructuredOperator::StructuredOperator(const SumOperator& s) : dim_(s.dim()) { add(1.0, {s}); }

void StructuredOperator::add(double weight, std::vector<SumOperator> chain) {
  for (const auto& s : chain) {
    if (s.dim() != dim_) throw DimensionError("StructuredOperator: factor dimension mismatch");
  }
  chains_.push_back(Chain{weight, std::move(chain)});
}

CMatrix StructuredOperator::apply(const CMatrix& x) const {
  if (x.rows() != dim_) throw DimensionError("StructuredOperator::apply: row count mismatch");
  CMatrix acc = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& c : chains_) {
    CMatrix y = x;
    for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) y = it->apply(y, false);
    acc += c.weight * y;
  }
  return acc;
}

CMatrix StructuredOperator::apply_adjoint(const CMatrix& x) const {
  if (x.rows() != dim_) throw DimensionError("StructuredOperator::apply_adjoint: row count mismatch");
  CMatrix acc = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& c : chains_) {
    CMatrix y = x;
    for (const auto& s : c.factors) y = s.apply(y, true);
    acc += c.weight * y;
  }
  return acc;
}

LinearMap StructuredOperator::as_map() const {
  return LinearMap{dim_, [this](const CMatrix& x) { return apply(x); },
                   [this](const CMatrix& x) { return apply_adjoint(x); }};
}

CMatrix StructuredOperator::to_dense() const {
  require_within_guardrail(static_cast<std::size_t>(dim_), "StructuredOperator::to_dense");
  CMatrix out(dim_, dim_);
  const Index chunk = 256;
  for (Index c0 = 0; c0 < dim_; c0 += chunk) {
    const Index w = std::min(chunk, dim_ - c0);
    CMatrix e = CMatrix::Zero(dim_, w);
    for (Index j = 0; j < w; ++j) e(c0 + j, j) = 1.0;
    out.middleCols(c0, w) = apply(e);
  }
  return out;
}

StructuredOperator StructuredOperator::times(const StructuredOperator& other) const {
  if (other.dim_ != dim_) throw DimensionError("StructuredOperator::times: dimension mismatch");
  StructuredOperator out(dim_);
  for (const auto& a : chains_) {
    for (const auto& b : other.chains_) {
      std::vector<SumOperator> f = a.factors;
      f.insert(f.end(), b.factors.begin(), b.factors.end());
      out.chains_.push_back(Chain{a.weight * b.weight, std::move(f)});
    }
  }
  return out;
}

StructuredOperator StructuredOperator::minus(const StructuredOperator& other) const {
  if (other.dim_ != dim_) throw DimensionError("StructuredOperator::minus: dimension mismatch");
  StructuredOperator out = *this;
  for (const auto& b : other.chains_) out.chains_.push_back(Chain{-b.weight, b.factors});
  return out;
}

}  // namespace designgap
