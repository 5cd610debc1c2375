#pragma once

// Run configuration: a JSON document describing the architecture, gate sets,
// orders, seeds and budgets of one CLI run.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "designgap/architectures.hpp"

namespace designgap {

/// Malformed or inconsistent configuration; the message names the line or
/// field at fault.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A gate given either as an expression or as a literal matrix.
struct GateSpec {
  std::string expr;
  std::optional<CMatrix> matrix;
};

struct GateSetSpec {
  std::vector<GateSpec> gates;
  std::vector<double> probabilities;  // empty → uniform
  bool validate_members = true;
  /// Dimension of a stand-alone gate set (locals use d²).
  Index dim = 2;
};

struct LocalsSpec {
  enum class Kind { haar, gates, random };
  Kind kind = Kind::haar;
  GateSetSpec gate_set;
  int random_members = 3;
};

struct ArchitectureSpec {
  std::string family = "local1d";
  int n_sites = 3;
  int local_dim = 2;
  std::vector<Pair> edges;                     // graph
  std::vector<std::vector<Pair>> layers;       // fixed
  int xi = 1;                                  // patchwork
  int repetitions = 1;                         // patchwork
  std::shared_ptr<ArchitectureSpec> patch;     // patchwork template (fixed or brickwork)
  LocalsSpec locals;
};

struct SweepSpec {
  std::string parameter = "t";  // "t" (gate set) or "n" (architecture)
  std::vector<int> values;
};

struct FrameSpec {
  int depth = 1;
  int samples = 10000;
};

struct RunConfig {
  ArchitectureSpec arch;
  std::optional<GateSetSpec> gate_set;
  std::vector<int> t_values{1};
  double eps = 0.01;
  std::vector<std::uint64_t> seeds{0};
  std::size_t max_dim = kDefaultMaxDim;
  int m_max = 0;
  double c0 = 1.0;
  int max_depth = 100000;
  std::vector<int> convolution_powers{1, 2, 5, 10, 20};
  std::vector<std::string> checks;
  SweepSpec sweep;
  FrameSpec frame;
};

/// Parses a configuration document; `source` names it in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Gate expression: products (`*`) of named gates (H, T, S, X, Y, Z, I,
/// CNOT, CZ, SWAP), `phase(θ)`, `id(q)`, `haar(seed)` / `haar(seed, q)`,
/// `kron(a, b, ...)` and parentheses. `dim` is the expected dimension, used
/// by a bare `haar(seed)`.
CMatrix parse_gate(const std::string& expr, Index dim);

/// Builds the ensemble; literal matrices are used as given.
GateEnsemble build_gate_set(const GateSetSpec& spec, Index dim);

/// Local ensembles for the architecture; random locals draw a fresh ensemble
/// per pair and protocol from `seed`.
LocalsProvider build_locals(const LocalsSpec& spec, int d, std::uint64_t seed);

struct BuiltArchitecture {
  std::string family;
  int n_sites = 0;
  int local_dim = 2;
  std::optional<LayerEnsemble> layer;        // single-layer families
  std::optional<FixedArchitecture> fixed;    // brickwork, fixed, patchwork template
  int xi = 0;
  int repetitions = 0;
  bool is_patchwork() const { return family == "patchwork"; }
};

BuiltArchitecture build_architecture(const ArchitectureSpec& spec, std::uint64_t seed);

}  // namespace designgap
