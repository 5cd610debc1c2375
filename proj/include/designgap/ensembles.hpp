#pragma once

// Named and seeded gate ensembles used by the tests, the acceptance suite
// and the CLI.

#include <cstdint>

#include "designgap/moment.hpp"

namespace designgap::ensembles {

/// {(1/2, T), (1/2, H)}.
GateEnsemble th();
/// {(1/3, T), (1/3, H), (1/3, I)}.
GateEnsemble thi();
/// Two-qubit local built from T, H with identity augmentation:
/// uniform over {I, CNOT·(H⊗T), CNOT·(T⊗H)}.
GateEnsemble thi_two_qubit();
/// `members` Haar unitaries of dimension q with random probabilities, all
/// drawn from streams derived from `seed`.
GateEnsemble random(Index q, int members, std::uint64_t seed);

}  // namespace designgap::ensembles
