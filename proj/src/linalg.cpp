#include "designgap/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>

namespace designgap {

namespace {

std::size_t initial_max_dim() {
  if (const char* env = std::getenv("DESIGNGAP_MAX_DIM")) {
    try {
      const auto v = std::stoull(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return kDefaultMaxDim;
}

std::atomic<std::size_t>& max_dim_slot() {
  static std::atomic<std::size_t> slot{initial_max_dim()};
  return slot;
}

// Orthonormal basis of the column span of v (same column count).
CMatrix orthonormalize(const CMatrix& v) {
  Eigen::HouseholderQR<CMatrix> qr(v);
  return qr.householderQ() * CMatrix::Identity(v.rows(), v.cols());
}

}  // namespace

std::size_t dense_max_dim() { return max_dim_slot().load(); }

void set_dense_max_dim(std::size_t value) { max_dim_slot().store(value == 0 ? kDefaultMaxDim : value); }

void require_within_guardrail(std::size_t dim, const char* what) {
  if (dim > dense_max_dim()) {
    throw GuardrailError(std::string(what) + ": dimension " + std::to_string(dim) +
                         " exceeds guardrail max_dim=" + std::to_string(dense_max_dim()));
  }
}

std::size_t guarded_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > dense_max_dim() / base) {
      throw GuardrailError("dimension " + std::to_string(base) + "^" + std::to_string(exp) +
                           " exceeds guardrail max_dim=" + std::to_string(dense_max_dim()));
    }
    r *= base;
  }
  require_within_guardrail(r, "guarded_pow");
  return r;
}

bool all_finite(const CMatrix& a) { return a.allFinite(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  require_within_guardrail(std::max(rows, cols), "kron");
  CMatrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix replica_power(const CMatrix& u, int t) {
  if (t < 1) throw std::invalid_argument("replica_power: t must be >= 1");
  guarded_pow(static_cast<std::size_t>(u.rows()), 2 * static_cast<std::size_t>(t));
  CMatrix out = u;
  for (int i = 1; i < t; ++i) out = kron(out, u);
  const CMatrix uc = u.conjugate();
  for (int i = 0; i < t; ++i) out = kron(out, uc);
  return out;
}

std::size_t SiteEmbedding::dim() const {
  return guarded_pow(static_cast<std::size_t>(local_dim), 2 * static_cast<std::size_t>(t) * n_sites);
}

std::size_t SiteEmbedding::local_op_dim() const {
  return guarded_pow(static_cast<std::size_t>(local_dim),
                     2 * static_cast<std::size_t>(t) * target_sites.size());
}

void SiteEmbedding::validate() const {
  if (n_sites < 1) throw DimensionError("SiteEmbedding: n_sites must be >= 1");
  if (local_dim < 2) throw DimensionError("SiteEmbedding: local_dim must be >= 2");
  if (t < 1) throw DimensionError("SiteEmbedding: t must be >= 1");
  std::set<int> seen;
  for (int s : target_sites) {
    if (s < 0 || s >= n_sites) {
      throw DimensionError("SiteEmbedding: target site " + std::to_string(s) + " out of range");
    }
    if (!seen.insert(s).second) {
      throw DimensionError("SiteEmbedding: duplicate target site " + std::to_string(s));
    }
  }
}

SlotOffsets slot_offsets(int n_sites, int local_dim, int copies, std::span<const int> targets) {
  const int k = static_cast<int>(targets.size());
  std::vector<bool> is_target(static_cast<std::size_t>(n_sites), false);
  for (int s : targets) is_target[static_cast<std::size_t>(s)] = true;

  // Global stride of slot (copy c, site s).
  auto stride = [&](int c, int s) {
    Index v = 1;
    const int exponent = (copies - 1 - c) * n_sites + (n_sites - 1 - s);
    for (int i = 0; i < exponent; ++i) v *= local_dim;
    return v;
  };

  std::vector<Index> target_strides;  // in local-op digit order, most significant first
  for (int c = 0; c < copies; ++c) {
    for (int j = 0; j < k; ++j) target_strides.push_back(stride(c, targets[static_cast<std::size_t>(j)]));
  }
  std::vector<Index> rest_strides;
  for (int c = 0; c < copies; ++c) {
    for (int s = 0; s < n_sites; ++s) {
      if (!is_target[static_cast<std::size_t>(s)]) rest_strides.push_back(stride(c, s));
    }
  }

  auto enumerate = [local_dim](const std::vector<Index>& strides) {
    std::vector<Index> out{0};
    for (Index st : strides) {
      std::vector<Index> next;
      next.reserve(out.size() * static_cast<std::size_t>(local_dim));
      for (Index base : out) {
        for (int digit = 0; digit < local_dim; ++digit) next.push_back(base + digit * st);
      }
      out = std::move(next);
    }
    return out;
  };

  return SlotOffsets{enumerate(target_strides), enumerate(rest_strides)};
}

CMatrix embed_local(const CMatrix& op, const SiteEmbedding& emb) {
  emb.validate();
  const auto dim = static_cast<Index>(emb.dim());
  const auto local = static_cast<Index>(emb.local_op_dim());
  if (op.rows() != local || op.cols() != local) {
    throw DimensionError("embed_local: operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", expected " + std::to_string(local));
  }
  const SlotOffsets off = slot_offsets(emb.n_sites, emb.local_dim, 2 * emb.t, emb.target_sites);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Index r : off.rest) {
    for (Index b = 0; b < local; ++b) {
      for (Index a = 0; a < local; ++a) {
        out(off.target[static_cast<std::size_t>(a)] + r, off.target[static_cast<std::size_t>(b)] + r) = op(a, b);
      }
    }
  }
  return out;
}

void apply_embedded_with(const SlotOffsets& offsets, CMatrix& block,
                         const std::function<CMatrix(const CMatrix&)>& local) {
  const auto k = static_cast<Index>(offsets.target.size());
  const auto nr = static_cast<Index>(offsets.rest.size());
  const Index c = block.cols();
  if (k * nr != block.rows()) throw DimensionError("apply_embedded: offsets do not cover the block rows");
  CMatrix g(k, nr * c);
  for (Index r = 0; r < nr; ++r) {
    const Index base = offsets.rest[static_cast<std::size_t>(r)];
    for (Index j = 0; j < c; ++j) {
      for (Index a = 0; a < k; ++a) g(a, r * c + j) = block(offsets.target[static_cast<std::size_t>(a)] + base, j);
    }
  }
  const CMatrix h = local(g);
  if (h.rows() != k || h.cols() != g.cols()) throw DimensionError("apply_embedded: local action changed the shape");
  for (Index r = 0; r < nr; ++r) {
    const Index base = offsets.rest[static_cast<std::size_t>(r)];
    for (Index j = 0; j < c; ++j) {
      for (Index a = 0; a < k; ++a) block(offsets.target[static_cast<std::size_t>(a)] + base, j) = h(a, r * c + j);
    }
  }
}

void apply_embedded(const CMatrix& op, const SlotOffsets& offsets, CMatrix& block) {
  const auto local = static_cast<Index>(offsets.target.size());
  if (op.rows() != local || op.cols() != local) {
    throw DimensionError("apply_embedded: operator size does not match embedding");
  }
  apply_embedded_with(offsets, block, [&op](const CMatrix& g) -> CMatrix { return op * g; });
}

LinearMap as_linear_map(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("as_linear_map: matrix must be square");
  // Captures by reference; the map must not outlive `a`.
  return LinearMap{a.rows(), [&a](const CMatrix& x) -> CMatrix { return a * x; },
                   [&a](const CMatrix& x) -> CMatrix { return a.adjoint() * x; }};
}

NormResult op_norm_detailed(const LinearMap& a, double tol, int max_iters) {
  const Index n = a.dim;
  if (n == 0) return {0.0, 0, true};
  const Index width = std::min<Index>(n, 4);

  Rng rng(0x243f6a8885a308d3ULL);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix v(n, width);
  for (Index j = 0; j < width; ++j) {
    for (Index i = 0; i < n; ++i) v(i, j) = cplx(nd(rng), nd(rng));
  }
  v = orthonormalize(v);

  // Ritz values at or below this are treated as an exact zero norm (sigma <= 1e-14).
  constexpr double kZeroFloor = 1e-28;
  double prev = -1.0;
  double lam = 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es;
  for (int it = 1; it <= max_iters; ++it) {
    const CMatrix z = a.apply(a.apply_adjoint(v));
    CMatrix h = v.adjoint() * z;
    h = (0.5 * (h + h.adjoint())).eval();
    es.compute(h, Eigen::ComputeEigenvectors);
    lam = std::max(0.0, es.eigenvalues().maxCoeff());
    if (lam <= kZeroFloor) return {std::sqrt(lam), it, true};
    if (prev >= 0.0 && std::abs(lam - prev) <= tol * lam) {
      // Ritz residual of the leading pair; the eigenvalue error is quadratic in it.
      const CVector s = es.eigenvectors().col(es.eigenvectors().cols() - 1);
      const double resid = (z * s - es.eigenvalues().maxCoeff() * (v * s)).norm();
      if (resid <= std::sqrt(tol) * 0.1 * lam) return {std::sqrt(lam), it, true};
    }
    prev = lam;
    v = orthonormalize(z);
  }
  const CVector top = v * es.eigenvectors().col(es.eigenvectors().cols() - 1);
  throw ConvergenceError("op_norm: power iteration did not converge after " + std::to_string(max_iters) +
                             " iterations (last estimate " + std::to_string(std::sqrt(lam)) + ")",
                         std::sqrt(lam), max_iters, top);
}

double op_norm(const LinearMap& a, double tol, int max_iters) { return op_norm_detailed(a, tol, max_iters).value; }

double op_norm(const CMatrix& a, double tol, int max_iters) {
  if (a.rows() != a.cols()) throw DimensionError("op_norm: matrix must be square");
  return op_norm_detailed(as_linear_map(a), tol, max_iters).value;
}

double op_norm_dense(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_radius(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("spectral_radius: matrix must be square");
  if (static_cast<std::size_t>(a.rows()) > kEigenBudget) {
    throw GuardrailError("spectral_radius: dimension " + std::to_string(a.rows()) +
                         " exceeds dense eigensolver budget " + std::to_string(kEigenBudget));
  }
  if (a.rows() == 0) return 0.0;
  const double scale = std::max(1.0, a.norm());
  if ((a - a.adjoint()).norm() <= 1e-12 * scale) {
    const CMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("min_eigenvalue_hermitian: matrix must be square");
  if (static_cast<std::size_t>(a.rows()) > kEigenBudget) {
    throw GuardrailError("min_eigenvalue_hermitian: dimension exceeds dense eigensolver budget");
  }
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CMatrix haar_sample(Index q, Rng& rng) {
  if (q < 1) throw DimensionError("haar_sample: q must be >= 1");
  std::normal_distribution<double> nd(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix z(q, q);
  for (Index j = 0; j < q; ++j) {
    for (Index i = 0; i < q; ++i) z(i, j) = cplx(nd(rng) * s, nd(rng) * s);
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix u = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Index j = 0; j < q; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    u.col(j) *= (mag > 0.0 ? d / mag : cplx(1.0));
  }
  return u;
}

CMatrix haar_sample(Index q, std::uint64_t seed) {
  Rng rng(seed);
  return haar_sample(q, rng);
}

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  if (static_cast<std::size_t>(u.rows()) <= kSvdFallbackDim) return op_norm_dense(d);
  return op_norm(d);
}

}  // namespace designgap
