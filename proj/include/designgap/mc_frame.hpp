#pragma once

// Circuit sampling and Monte Carlo frame-potential estimates.

#include <cstdint>
#include <optional>
#include <vector>

#include "designgap/architectures.hpp"

namespace designgap {

/// Layers applied cyclically: a single-layer family repeats its one layer, a
/// fixed architecture cycles through its layers.
struct CircuitFamily {
  int n_sites = 0;
  int local_dim = 2;
  std::vector<LayerEnsemble> cycle;

  static CircuitFamily repeated(const LayerEnsemble& layer);
  static CircuitFamily cyclic(const FixedArchitecture& arch);
  void validate() const;
};

/// Largest d^N simulated as a dense unitary.
inline constexpr std::size_t kUnitaryBudget = 4096;

/// One N-qudit unitary of `depth` layers; layer i is the (i mod cycle)-th.
CMatrix sample_circuit(const CircuitFamily& family, int depth, std::uint64_t seed);
CMatrix sample_circuit(const CircuitFamily& family, int depth, Rng& rng);

struct FrameEstimate {
  int t = 0;
  int samples = 0;
  double mean = 0.0;
  /// Sample standard deviation / √samples.
  double std_error = 0.0;
  std::optional<double> exact_reference;
};

/// tr(M†M) for the depth-L moment operator, or nullopt beyond the guardrail.
std::optional<double> exact_frame_potential(const CircuitFamily& family, int depth, int t);

/// Mean of |tr(U†V)|^{2t} over independent pairs; pair i draws U and V from
/// seeds derived from (seed, 2i) and (seed, 2i + 1).
FrameEstimate frame_potential(const CircuitFamily& family, int depth, int t, int n_samples, std::uint64_t seed);
/// Same for Haar-random q×q unitaries; the reference is rank P^{(t)}.
FrameEstimate haar_frame_potential(Index q, int t, int n_samples, std::uint64_t seed);

}  // namespace designgap
