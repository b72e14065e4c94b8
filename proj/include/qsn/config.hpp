#pragma once

#include "qsn/pauli.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsn {

struct InteractionConfig {
  std::string pauli;
  double gamma = 0.0;
  friend bool operator==(const InteractionConfig&, const InteractionConfig&) = default;
};

struct TrotterConfig {
  std::vector<int> steps;  // "L" or "L_grid"
  std::optional<std::uint64_t> seed;
  int trials = 50;
  friend bool operator==(const TrotterConfig&, const TrotterConfig&) = default;
};

struct EstimationConfig {
  long nu = 0;
  int repetitions = 1;
  friend bool operator==(const EstimationConfig&, const EstimationConfig&) = default;
};

struct BosonicConfig {
  int m = 0;
  int photons = 0;  // "P"
  friend bool operator==(const BosonicConfig&, const BosonicConfig&) = default;
};

struct OutputConfig {
  std::string dir = ".";
  std::string format;  // empty: per-command default
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

// Either the qubit section (n, generators) or the bosonic section is set.
struct ExperimentConfig {
  int n = 0;
  std::vector<std::string> generators;
  std::vector<double> alpha;
  double t = 1.0;
  std::optional<std::vector<double>> theta;
  std::vector<InteractionConfig> interactions;
  std::optional<TrotterConfig> trotter;
  std::optional<EstimationConfig> estimation;
  std::optional<BosonicConfig> bosonic;
  OutputConfig output;
  int dense_limit = kDefaultDenseLimit;

  bool is_bosonic() const { return bosonic.has_value(); }
  std::optional<std::uint64_t> seed() const {
    return trotter ? trotter->seed : std::nullopt;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws InvalidInput with a message naming the offending field.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Parsed generator set of a qubit config.
GeneratorSet config_generators(const ExperimentConfig& cfg);

// sum_j theta_j g_j plus the listed interactions. Single-qubit Z pieces
// land in the field vector, other diagonal generators become Z-string
// interaction terms.
InteractingHamiltonian config_hamiltonian(const ExperimentConfig& cfg);

}  // namespace qsn
