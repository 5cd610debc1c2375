#include "designgap/ensembles.hpp"

#include <random>

#include "designgap/gates.hpp"

namespace designgap::ensembles {

GateEnsemble th() { return GateEnsemble::uniform({gates::T(), gates::H()}); }

GateEnsemble thi() { return GateEnsemble::uniform({gates::T(), gates::H(), gates::I()}); }

GateEnsemble thi_two_qubit() {
  const CMatrix cx = gates::CNOT();
  return GateEnsemble::uniform(
      {gates::I(4), cx * kron(gates::H(), gates::T()), cx * kron(gates::T(), gates::H())});
}

GateEnsemble random(Index q, int members, std::uint64_t seed) {
  if (members < 1) throw EnsembleError("random ensemble: members must be >= 1");
  Rng weights(derive_seed(seed, 0));
  std::uniform_real_distribution<double> ud(0.1, 1.0);
  std::vector<GateMember> m;
  double total = 0.0;
  for (int i = 0; i < members; ++i) {
    m.push_back({ud(weights), haar_sample(q, derive_seed(seed, static_cast<std::uint64_t>(i) + 1))});
    total += m.back().probability;
  }
  for (auto& x : m) x.probability /= total;
  // Renormalise the last weight so the sum is 1 to rounding.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) head += m[i].probability;
  m.back().probability = 1.0 - head;
  return GateEnsemble(std::move(m));
}

}  // namespace designgap::ensembles
