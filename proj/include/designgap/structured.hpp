#pragma once

// Matrix-free operators on the replica space: sums of products of local
// factors, applied to column blocks without forming d^{2tN}-sized matrices.

#include <vector>

#include "designgap/linalg.hpp"

namespace designgap {

/// Operator acting on a subset of sites (identity elsewhere). Either a dense
/// local matrix or the projector basis·basis† for an orthonormal basis.
class LocalFactor {
 public:
  static LocalFactor dense(std::vector<int> sites, CMatrix op, int n_sites, int local_dim, int t);
  static LocalFactor projector(std::vector<int> sites, CMatrix basis, int n_sites, int local_dim, int t);

  const std::vector<int>& sites() const { return sites_; }
  bool is_projector() const { return is_projector_; }
  /// Dense local matrix (forms basis·basis† for projector factors).
  CMatrix local_matrix() const;

  /// x <- F x (or F† x).
  void apply(CMatrix& x, bool adjoint) const;

 private:
  std::vector<int> sites_;
  CMatrix op_;
  bool is_projector_ = false;
  SlotOffsets offsets_;
};

/// weight · (product of factors on disjoint sites).
struct ProductTerm {
  double weight = 1.0;
  std::vector<LocalFactor> factors;
};

/// Σ_k weight_k Π_j factor_kj on an N-site, 2t-replica register.
class SumOperator {
 public:
  SumOperator(int n_sites, int local_dim, int t);
  static SumOperator identity(int n_sites, int local_dim, int t);

  void add(ProductTerm term);

  int n_sites() const { return n_sites_; }
  int local_dim() const { return local_dim_; }
  int t() const { return t_; }
  Index dim() const { return dim_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }

  CMatrix apply(const CMatrix& x, bool adjoint = false) const;

 private:
  int n_sites_;
  int local_dim_;
  int t_;
  Index dim_;
  std::vector<ProductTerm> terms_;
};

/// Σ_k w_k · S_k1 S_k2 … S_kn with each S a SumOperator. Chains multiply
/// left to right, so the last factor acts first.
class StructuredOperator {
 public:
  explicit StructuredOperator(Index dim) : dim_(dim) {}
  StructuredOperator(const SumOperator& s);  // NOLINT(google-explicit-constructor)

  void add(double weight, std::vector<SumOperator> chain);

  Index dim() const { return dim_; }
  CMatrix apply(const CMatrix& x) const;
  CMatrix apply_adjoint(const CMatrix& x) const;
  /// The returned map references *this.
  LinearMap as_map() const;
  /// Dense matrix, built by applying to identity column chunks.
  CMatrix to_dense() const;

  /// this · other as a single chain product (distributes over terms).
  StructuredOperator times(const StructuredOperator& other) const;
  StructuredOperator minus(const StructuredOperator& other) const;

 private:
  struct Chain {
    double weight;
    std::vector<SumOperator> factors;
  };
  Index dim_;
  std::vector<Chain> chains_;
};

}  // namespace designgap
