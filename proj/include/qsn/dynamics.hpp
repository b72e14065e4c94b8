#pragma once

#include "qsn/pauli.hpp"
#include "qsn/protocol.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace qsn {

using StateVector = Eigen::VectorXcd;

// exp(-i H dt) for Hermitian H through one eigendecomposition.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const Eigen::MatrixXcd& h);

  Eigen::MatrixXcd unitary(double dt) const;
  void apply(StateVector& psi, double dt) const;

  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  double spectral_norm() const;

 private:
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

// Two-branch phase tracker. Each branch accumulates -E(label) dt.
struct BranchState {
  BasisLabel plus_label = 0;
  BasisLabel minus_label = 0;
  double plus_phase = 0.0;
  double minus_phase = 0.0;

  double relative_phase() const { return minus_phase - plus_phase; }
  // (e^{i plus}|x> + e^{i minus}|y>)/sqrt(2)
  StateVector to_state(int n, int dense_limit = kDefaultDenseLimit) const;
};

BranchState run_branch(const Protocol& proto, const DiagonalHamiltonian& h);

// (|x+(1)> + |x-(1)>)/sqrt(2)
StateVector initial_state(const Protocol& proto, int dense_limit = kDefaultDenseLimit);

// Applies the controlled-flip gate list as a permutation of amplitudes.
void apply_switch(StateVector& psi, const SwitchDecomposition& sw);
// Applies every branch update in the event, plus before minus, given the
// current branch labels (which are advanced).
void apply_event(StateVector& psi, const SwitchEvent& ev, BasisLabel& plus_label,
                 BasisLabel& minus_label, int n);

StateVector run_dense(const Protocol& proto, const InteractingHamiltonian& h,
                      int dense_limit = kDefaultDenseLimit);
StateVector run_dense(const Protocol& proto, const DiagonalHamiltonian& h,
                      int dense_limit = kDefaultDenseLimit);

// s exp(-i H0 dt) s
Eigen::MatrixXcd trotter_step_unitary(const InteractingHamiltonian& h0, double dt,
                                      const ZString& s,
                                      int dense_limit = kDefaultDenseLimit);
// Same conjugation applied to a precomputed step unitary.
Eigen::MatrixXcd conjugate_by(const Eigen::MatrixXcd& u, const ZString& s);

// The s_k sequence: s_k = mask drawn from (seed, k), uniform over all 2^n.
ZString sample_stabilizer(int n, std::uint64_t seed, std::uint64_t step);
std::vector<ZString> sample_trajectory(int n, int steps, std::uint64_t seed);

struct TrotterRun {
  InteractingHamiltonian h0;
  double t = 0.0;
  int steps = 0;
  std::uint64_t seed = 0;
  std::vector<ZString> sampled;
};

TrotterRun make_trotter_run(const InteractingHamiltonian& h0, double t, int steps,
                            std::uint64_t seed);
// V_L ... V_1 with V_k = s_k exp(-i H0 t/L) s_k.
Eigen::MatrixXcd trajectory_unitary(const TrotterRun& run,
                                    int dense_limit = kDefaultDenseLimit);

struct ReshapedRun {
  StateVector state;
  std::vector<double> snapped_times;  // per event, multiples of t/L
  double max_time_shift = 0.0;
};

// Protocol with each effective-evolution segment replaced by randomized
// stabilizer-conjugated steps of H0. Event times are snapped to the step grid.
ReshapedRun run_reshaped(const Protocol& proto, const InteractingHamiltonian& h0, int steps,
                         std::uint64_t seed, int dense_limit = kDefaultDenseLimit);

inline constexpr int kExpectedMapLimit = 6;

// (1/2^n) sum_s s exp(-i H0 dt) s
Eigen::MatrixXcd expected_step_map(const InteractingHamiltonian& h0, double dt);

struct ReshapeBenchRow {
  int steps = 0;
  double bias_norm = 0.0;
  double bias_bound = 0.0;  // 2 lambda^2 t^2 / L
  std::vector<double> samples;
  double mean = 0.0;
  double variance = 0.0;
};

struct ReshapeBenchResult {
  int n = 0;
  double lambda = 0.0;           // exact spectral norm of H0
  double lambda_triangle = 0.0;  // sum of |coefficients|
  double t = 0.0;
  std::vector<ReshapeBenchRow> rows;
  double mean_slope = 0.0;  // d log E[X] / d log L
  double var_slope = 0.0;   // d log Var[X] / d log L
};

ReshapeBenchResult bench_reshaping(const InteractingHamiltonian& h0, double t,
                                   const std::vector<int>& steps_grid, int trials,
                                   std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qsn
