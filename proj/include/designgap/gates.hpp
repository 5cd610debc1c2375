#pragma once

#include <optional>
#include <string>

#include "designgap/linalg.hpp"

namespace designgap::gates {

CMatrix I(Index q = 2);
CMatrix X();
CMatrix Y();
CMatrix Z();
CMatrix H();
CMatrix S();
CMatrix T();
/// diag(1, e^{iθ}).
CMatrix phase(double theta);
/// Control on the first qubit (most significant index bit).
CMatrix CNOT();
CMatrix CZ();
CMatrix SWAP();

/// Looks up H, T, S, X, Y, Z, I, CNOT, CZ, SWAP.
std::optional<CMatrix> by_name(const std::string& name);

}  // namespace designgap::gates
