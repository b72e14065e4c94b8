#pragma once

#include "qsn/pauli.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace qsn {

inline constexpr std::size_t kDefaultColumnLimit = std::size_t{1} << 14;

// min ||a||_1  s.t.  h a = alpha,  sum_x a_x = 0.
//
// h holds one row per generator and one column per basis label; the
// zero-sum (all-ones) constraint is implicit.
struct L1Problem {
  Eigen::MatrixXd h;
  std::vector<BasisLabel> columns;
  Eigen::VectorXd alpha;
  double t = 1.0;

  static L1Problem from_generators(const GeneratorSet& gens, std::span<const double> alpha,
                                   double t, std::span<const BasisLabel> columns = {});

  Eigen::Index num_generators() const { return h.rows(); }
  Eigen::Index num_columns() const { return h.cols(); }
  bool trivial() const { return alpha.size() == 0 || alpha.isZero(0.0); }
};

// Multipliers of the standard-form LP. y(0) belongs to the ones row and
// y(1..m) to the generators; feasibility means |y0 + sum_j y_j h_jx| <= 1 on
// every column.
//
// The LP value alpha.y equals ||a||_1 at optimum. Rescaling to
// beta = y(1..m) / ||a||_1 gives a direction with alpha.beta = 1 whose
// generator beta.g has eigenvalue spread (seminorm) 2 / ||a||_1: this is the
// optimum of the single-parameter seminorm program, i.e. the 2/||a||_1 dual
// value.
struct DualCertificate {
  Eigen::VectorXd y;
  double objective = 0.0;
  Eigen::VectorXd beta;
  double seminorm = 0.0;

  // max over columns of |y0 + h^T y_h| - 1; <= 0 when feasible.
  double max_violation(const Eigen::MatrixXd& h) const;
};

struct SparseEntry {
  BasisLabel x = 0;
  double v = 0.0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

struct L1Solution {
  std::vector<SparseEntry> a;  // sorted by label, zeros pruned
  double l1 = 0.0;
  int l0 = 0;
  double t = 1.0;
  double bound = 0.0;  // l1^2 / (4 t^2)
  DualCertificate dual;

  double value_at(BasisLabel x) const;
  // Residuals against the problem constraints.
  double constraint_residual(const L1Problem& prob) const;
  double zero_sum_residual() const;
};

struct SolverOptions {
  std::size_t max_columns = kDefaultColumnLimit;
  double feasibility_tol = 1e-9;
  double prune_tol = 1e-12;
};

// Vertex optimum via two-phase primal simplex (Bland's rule) on the
// split-variable standard form. Throws Infeasible, RankDeficient,
// SizeExceeded.
L1Solution solve_l1(const L1Problem& prob, const SolverOptions& opts = {});

// ||alpha||_inf^2 / (4 t^2), valid for independent generators with all
// columns available.
double closed_form_independent(std::span<const double> alpha, double t = 1.0);

struct BosonicProblem {
  int m = 1;
  int photons = 1;
  std::vector<double> alpha;
  double t = 1.0;
};

// Number-operator eigenvalues over all photon tuples p with sum(p) <= P,
// columns in lexicographic order.
struct BosonicMatrix {
  Eigen::MatrixXd h;
  std::vector<std::vector<int>> tuples;
};

BosonicMatrix bosonic_matrix(int m, int photons,
                             std::size_t max_columns = kDefaultColumnLimit);
L1Problem bosonic_l1_problem(const BosonicProblem& prob,
                             std::size_t max_columns = kDefaultColumnLimit);

// max(||alpha||_{1,+}^2, ||alpha||_{1,-}^2) / (P^2 t^2)
double closed_form_bosonic(std::span<const double> alpha, int photons, double t = 1.0);

}  // namespace qsn
