#include "qsn/l1_solver.hpp"

#include "qsn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsn {

L1Problem L1Problem::from_generators(const GeneratorSet& gens, std::span<const double> alpha,
                                     double t, std::span<const BasisLabel> columns) {
  if (alpha.size() != gens.size()) {
    throw InvalidInput(fmt::format("alpha has {} entries for {} generators", alpha.size(),
                                   gens.size()));
  }
  if (!(t > 0.0)) throw InvalidInput("evolution time must be positive");
  if (columns.empty() && gens.n() > 30) {
    throw SizeExceeded("too many qubits to enumerate every column");
  }
  auto em = build_eigenvalue_matrix(gens, false, columns);
  L1Problem p;
  p.h = std::move(em.values);
  p.columns = std::move(em.columns);
  p.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  p.t = t;
  return p;
}

double DualCertificate::max_violation(const Eigen::MatrixXd& h) const {
  if (y.size() == 0) return -1.0;
  const Eigen::VectorXd vals =
      (h.transpose() * y.tail(y.size() - 1)).array() + y(0);
  return vals.cwiseAbs().maxCoeff() - 1.0;
}

double L1Solution::value_at(BasisLabel x) const {
  auto it = std::lower_bound(a.begin(), a.end(), x,
                             [](const SparseEntry& e, BasisLabel v) { return e.x < v; });
  return (it != a.end() && it->x == x) ? it->v : 0.0;
}

double L1Solution::constraint_residual(const L1Problem& prob) const {
  Eigen::VectorXd r = -prob.alpha;
  for (const auto& e : a) {
    auto it = std::find(prob.columns.begin(), prob.columns.end(), e.x);
    if (it == prob.columns.end()) return std::numeric_limits<double>::infinity();
    r += e.v * prob.h.col(it - prob.columns.begin());
  }
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

double L1Solution::zero_sum_residual() const {
  double s = 0.0;
  for (const auto& e : a) s += e.v;
  return std::abs(s);
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-11;

// Dense tableau: rows [0, r) are constraints, row r holds reduced costs.
// The last column is the right-hand side (the cost row stores -objective).
struct Tableau {
  RowMatrix T;
  std::vector<Eigen::Index> basis;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(basis.size()); }
  Eigen::Index rhs() const { return T.cols() - 1; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    const double piv = T(row, col);
    T.row(row) /= piv;
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // Bland's rule: lowest-index improving column enters; among minimum-ratio
  // rows the one with the lowest basic index leaves.
  void optimize(Eigen::Index allowed_cols) {
    const Eigen::Index r = rows();
    const std::size_t cap = 50 * static_cast<std::size_t>(r + allowed_cols) + 1000;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (T(r, j) < -kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < r; ++i) {
        const double p = T(i, enter);
        if (p <= kPivotEps) continue;
        const double ratio = T(i, rhs()) / p;
        if (leave < 0) {
          best = ratio;
          leave = i;
          continue;
        }
        const double slack = 1e-12 * (1.0 + std::abs(best));
        if (ratio < best - slack) {
          best = ratio;
          leave = i;
        } else if (std::abs(ratio - best) <= slack &&
                   basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) throw Error("simplex: unbounded direction in a bounded program");
      pivot(leave, enter);
    }
    throw Error("simplex: iteration limit reached");
  }
};

void check_rank(const Eigen::MatrixXd& constraint) {
  const double work = static_cast<double>(constraint.rows()) *
                      static_cast<double>(constraint.rows()) *
                      static_cast<double>(constraint.cols());
  if (constraint.rows() > constraint.cols()) {
    throw RankDeficient(fmt::format("{} constraints but only {} columns",
                                    constraint.rows(), constraint.cols()));
  }
  if (work > 4e8) return;  // phase one still catches redundant rows
  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraint);
  lu.setThreshold(1e-10);
  if (lu.rank() < constraint.rows()) {
    throw RankDeficient(fmt::format("constraint rows have rank {} < {}", lu.rank(),
                                    constraint.rows()));
  }
}

}  // namespace

L1Solution solve_l1(const L1Problem& prob, const SolverOptions& opts) {
  const Eigen::Index m = prob.h.rows();
  const Eigen::Index N = prob.h.cols();
  if (prob.alpha.size() != m) {
    throw InvalidInput(fmt::format("alpha has {} entries for {} rows", prob.alpha.size(), m));
  }
  if (static_cast<std::size_t>(N) != prob.columns.size()) {
    throw InvalidInput("column labels do not match matrix width");
  }
  if (static_cast<std::size_t>(N) > opts.max_columns) {
    throw SizeExceeded(fmt::format("{} columns exceeds the explicit limit of {}", N,
                                   opts.max_columns));
  }
  if (!(prob.t > 0.0)) throw InvalidInput("evolution time must be positive");

  L1Solution sol;
  sol.t = prob.t;
  if (prob.trivial()) {
    sol.dual.y = Eigen::VectorXd::Zero(m + 1);
    sol.dual.beta = Eigen::VectorXd::Zero(m);
    return sol;
  }

  const Eigen::Index r = m + 1;
  Eigen::MatrixXd constraint(r, N);
  constraint.row(0).setOnes();
  constraint.bottomRows(m) = prob.h;
  check_rank(constraint);

  Eigen::VectorXd b(r);
  b(0) = 0.0;
  b.tail(m) = prob.alpha;

  // Variables: a+ (N), a- (N), artificials (r).
  const Eigen::Index nsplit = 2 * N;
  Tableau tab;
  tab.T = RowMatrix::Zero(r + 1, nsplit + r + 1);
  tab.basis.resize(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.T.row(i).segment(0, N) = sign * constraint.row(i);
    tab.T.row(i).segment(N, N) = -sign * constraint.row(i);
    tab.T(i, nsplit + i) = 1.0;
    tab.T(i, tab.rhs()) = sign * b(i);
    tab.basis[static_cast<std::size_t>(i)] = nsplit + i;
  }
  // Phase one: minimize the sum of artificials.
  for (Eigen::Index i = 0; i < r; ++i) {
    tab.T.row(r).segment(0, nsplit) -= tab.T.row(i).segment(0, nsplit);
    tab.T(r, tab.rhs()) -= tab.T(i, tab.rhs());
  }
  tab.optimize(nsplit + r);

  const double scale = std::max(1.0, prob.alpha.cwiseAbs().maxCoeff());
  if (-tab.T(r, tab.rhs()) > opts.feasibility_tol * scale) {
    throw Infeasible("alpha is not in the row space of the eigenvalue matrix");
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < nsplit) continue;
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < nsplit; ++j) {
      if (std::abs(tab.T(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col < 0) throw RankDeficient("redundant constraint row detected in phase one");
    tab.pivot(i, col);
  }

  // Phase two: unit cost on every split variable.
  tab.T.row(r).setZero();
  tab.T.row(r).segment(0, nsplit).setOnes();
  for (Eigen::Index i = 0; i < r; ++i) tab.T.row(r) -= tab.T.row(i);
  tab.optimize(nsplit);

  // Re-solve on the final basis against the original data for accuracy.
  Eigen::MatrixXd B(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Eigen::Index j = tab.basis[static_cast<std::size_t>(i)];
    B.col(i) = j < N ? constraint.col(j) : Eigen::VectorXd(-constraint.col(j - N));
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  const Eigen::VectorXd xb = lu.solve(b);
  const Eigen::VectorXd y = lu.transpose().solve(Eigen::VectorXd::Ones(r));

  std::vector<SparseEntry> entries;
  for (Eigen::Index i = 0; i < r; ++i) {
    const Eigen::Index j = tab.basis[static_cast<std::size_t>(i)];
    const Eigen::Index col = j < N ? j : j - N;
    const double v = j < N ? xb(i) : -xb(i);
    if (std::abs(v) < opts.prune_tol) continue;
    entries.push_back({prob.columns[static_cast<std::size_t>(col)], v});
  }
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.x < b.x; });

  sol.a = std::move(entries);
  for (const auto& e : sol.a) sol.l1 += std::abs(e.v);
  sol.l0 = static_cast<int>(sol.a.size());
  sol.bound = sol.l1 * sol.l1 / (4.0 * prob.t * prob.t);

  sol.dual.y = y;
  sol.dual.objective = prob.alpha.dot(y.tail(m));
  sol.dual.beta = y.tail(m) / sol.l1;
  const Eigen::VectorXd spectrum = prob.h.transpose() * sol.dual.beta;
  sol.dual.seminorm = spectrum.maxCoeff() - spectrum.minCoeff();
  return sol;
}

double closed_form_independent(std::span<const double> alpha, double t) {
  double inf = 0.0;
  for (double v : alpha) inf = std::max(inf, std::abs(v));
  return inf * inf / (4.0 * t * t);
}

BosonicMatrix bosonic_matrix(int m, int photons, std::size_t max_columns) {
  if (m < 1) throw InvalidInput("bosonic mode count must be at least 1");
  if (photons < 1) throw InvalidInput("photon number must be at least 1");
  // C(P+m, m), guarding against overflow.
  double count = 1.0;
  for (int k = 1; k <= m; ++k) count = count * (photons + k) / k;
  if (count > static_cast<double>(max_columns)) {
    throw SizeExceeded(fmt::format("C({}+{}, {}) = {} columns exceeds the limit of {}",
                                   photons, m, m, count, max_columns));
  }
  BosonicMatrix out;
  std::vector<int> p(static_cast<std::size_t>(m), 0);
  // Lexicographic enumeration of tuples with sum <= P.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == m) {
      out.tuples.push_back(p);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      p[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
    p[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0, photons);
  out.h.resize(m, static_cast<Eigen::Index>(out.tuples.size()));
  for (std::size_t c = 0; c < out.tuples.size(); ++c) {
    for (int j = 0; j < m; ++j) {
      out.h(j, static_cast<Eigen::Index>(c)) = out.tuples[c][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

L1Problem bosonic_l1_problem(const BosonicProblem& prob, std::size_t max_columns) {
  if (prob.alpha.size() != static_cast<std::size_t>(prob.m)) {
    throw InvalidInput(fmt::format("alpha has {} entries for {} modes", prob.alpha.size(),
                                   prob.m));
  }
  auto bm = bosonic_matrix(prob.m, prob.photons, max_columns);
  L1Problem p;
  p.h = std::move(bm.h);
  p.columns.resize(static_cast<std::size_t>(p.h.cols()));
  for (std::size_t c = 0; c < p.columns.size(); ++c) p.columns[c] = c;
  p.alpha = Eigen::Map<const Eigen::VectorXd>(prob.alpha.data(), prob.m);
  p.t = prob.t;
  return p;
}

double closed_form_bosonic(std::span<const double> alpha, int photons, double t) {
  if (photons < 1) throw InvalidInput("photon number must be at least 1");
  double pos = 0.0, neg = 0.0;
  for (double v : alpha) (v > 0 ? pos : neg) += std::abs(v);
  const double top = std::max(pos, neg);
  return top * top / (static_cast<double>(photons) * photons * t * t);
}

}  // namespace qsn
