#pragma once

#include "qsn/dynamics.hpp"
#include "qsn/pauli.hpp"
#include "qsn/protocol.hpp"
#include "qsn/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qsn {

enum class Mode { ideal, reshaped };

std::string to_string(Mode m);

// Probabilities of the +1 and -1 outcomes, P(+-1) = (1 +- <O>)/2. Population
// outside the final branch pair contributes equally to both outcomes.
struct OutcomeProbabilities {
  double plus = 0.5;
  double minus = 0.5;

  static OutcomeProbabilities from_phase(double phi);
  static OutcomeProbabilities from_state(const StateVector& psi,
                                         const MeasurementObservable& obs);
};

struct ShotCounts {
  long plus = 0;
  long minus = 0;

  double mean() const {
    return static_cast<double>(plus - minus) / static_cast<double>(plus + minus);
  }
};

// One uniform draw per shot from `stream`, so runs sharing a stream are
// coupled shot by shot.
ShotCounts sample_shots(const OutcomeProbabilities& p, long shots, const CounterRng& stream);

// q = (||a||_1 / 2t) asin(mean) with the mean clamped to +-(1 - 1e-12).
// Throws SignalOutOfRange when the clamp engages.
double invert_readout(double sample_mean, double l1, double t);

struct EstimationRun {
  Protocol protocol;
  // Ideal mode evolves under the diagonal part (an interacting H0 is
  // projected first); reshaped mode needs the interacting H0.
  std::variant<DiagonalHamiltonian, InteractingHamiltonian> hamiltonian;
  double q_true = 0.0;
  long shots = 1;
  int repetitions = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::ideal;
  int steps = 0;  // reshaped mode only
  double margin = 0.2;
  int dense_limit = kDefaultDenseLimit;
};

struct EstimationResult {
  double q_true = 0.0;
  double q_est = 0.0;  // mean over repetitions
  double se = 0.0;     // standard error of q_est
  double variance = 0.0;
  double mse = 0.0;
  double crb = 0.0;    // ||a||_1^2 / (4 nu t^2)
  double ratio = 0.0;  // mse / crb
  long shots = 0;
  int repetitions = 0;
  std::vector<double> samples;
};

EstimationResult estimate(const EstimationRun& run);

struct MseRow {
  int steps = 0;
  EstimationResult result;
  double excess = 0.0;  // mse(L) - mse(ideal), same shot stream
};

struct MseTable {
  EstimationResult ideal;
  std::vector<MseRow> rows;
  double lambda = 0.0;
  double excess_slope = 0.0;            // over rows with positive excess
  std::optional<int> first_subleading;  // smallest L with excess < 0.2 * ideal mse
  double fitted_c = 0.0;                // C' in n ||a||_0 lambda^2 t^2 / L
};

MseTable mse_vs_L(const Protocol& proto, const InteractingHamiltonian& h0, double q_true,
                  const std::vector<int>& steps_grid, long shots, int repetitions,
                  std::uint64_t seed, int dense_limit = kDefaultDenseLimit);

struct BaselineReport {
  double var_local = 0.0;
  double var_entangled = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  bool q1_ok = false;  // q1 >= n^2
  bool q2_ok = false;  // q2 >= 1
};

BaselineReport baselines(std::span<const double> alpha, int n, double t, long shots,
                         double l1);

struct Baseline2Result {
  double predicted = 0.0;                  // ||alpha||_2^2 / (4 nu t^2)
  Eigen::MatrixXd fisher;                  // per-shot QFI matrix at theta
  double fisher_variance = 0.0;            // alpha^T F^-1 alpha / nu
  std::optional<double> empirical_variance;  // unset when nu * P(1) < 100
  double q_true = 0.0;
  double p_one = 0.0;
};

// Product-state protocol: |+>^n under sum theta_i Z_i for time t, then the
// projective measurement onto |phi> = (1/||alpha||) sum alpha_i Z_i |+>^n.
// The estimate is (||alpha|| / t) asin(sqrt(fraction of 1 outcomes)) with
// the sign of q assumed known.
Baseline2Result verify_baseline2(std::span<const double> alpha, std::span<const double> theta,
                                 double t, long shots, int repetitions, std::uint64_t seed,
                                 int dense_limit = kDefaultDenseLimit);

// Quantum Fisher information of the product-state protocol, by central
// differences of the statevector.
Eigen::MatrixXd product_state_fisher(std::span<const double> theta, double t,
                                     int dense_limit = kDefaultDenseLimit);

}  // namespace qsn
