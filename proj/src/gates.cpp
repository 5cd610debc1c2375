#include "designgap/gates.hpp"

#include <cmath>
#include <numbers>

namespace designgap::gates {

namespace {

CMatrix from_rows(Index n, std::initializer_list<cplx> entries) {
  CMatrix m(n, n);
  auto it = entries.begin();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = *it++;
  }
  return m;
}

}  // namespace

CMatrix I(Index q) { return CMatrix::Identity(q, q); }

CMatrix X() { return from_rows(2, {0, 1, 1, 0}); }

CMatrix Y() { return from_rows(2, {0, cplx(0, -1), cplx(0, 1), 0}); }

CMatrix Z() { return from_rows(2, {1, 0, 0, -1}); }

CMatrix H() {
  const double s = 1.0 / std::numbers::sqrt2;
  return from_rows(2, {s, s, s, -s});
}

CMatrix S() { return from_rows(2, {1, 0, 0, cplx(0, 1)}); }

CMatrix T() { return phase(std::numbers::pi / 4.0); }

CMatrix phase(double theta) { return from_rows(2, {1, 0, 0, std::polar(1.0, theta)}); }

CMatrix CNOT() { return from_rows(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}); }

CMatrix CZ() { return from_rows(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1}); }

CMatrix SWAP() { return from_rows(4, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1}); }

std::optional<CMatrix> by_name(const std::string& name) {
  if (name == "H") return H();
  if (name == "T") return T();
  if (name == "S") return S();
  if (name == "X") return X();
  if (name == "Y") return Y();
  if (name == "Z") return Z();
  if (name == "I") return I();
  if (name == "CNOT") return CNOT();
  if (name == "CZ") return CZ();
  if (name == "SWAP") return SWAP();
  return std::nullopt;
}

}  // namespace designgap::gates
