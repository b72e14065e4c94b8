#include "l1_oracle.hpp"

#include <stdexcept>
#include <vector>

namespace oracle {

std::optional<L1Vertex> oracle_l1(const Eigen::MatrixXd& h, const Eigen::VectorXd& alpha) {
  const Eigen::Index m = h.rows();
  const Eigen::Index n = h.cols();
  const Eigen::Index r = m + 1;
  if (n > 64 || m > 7) throw std::invalid_argument("oracle_l1: instance too large");
  double combos = 1.0;
  for (Eigen::Index k = 0; k < r; ++k) combos = combos * static_cast<double>(n - k) / (k + 1);
  if (combos > 5e6) throw std::invalid_argument("oracle_l1: too many bases");

  if (r > n) return std::nullopt;

  Eigen::MatrixXd a(r, n);
  a.row(0).setOnes();
  a.bottomRows(m) = h;
  Eigen::VectorXd b(r);
  b(0) = 0.0;
  b.tail(m) = alpha;

  std::optional<L1Vertex> best;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(r));
  for (Eigen::Index k = 0; k < r; ++k) idx[static_cast<std::size_t>(k)] = k;
  Eigen::MatrixXd sub(r, r);
  while (true) {
    for (Eigen::Index k = 0; k < r; ++k) sub.col(k) = a.col(idx[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      const Eigen::VectorXd x = lu.solve(b);
      if ((sub * x - b).cwiseAbs().maxCoeff() < 1e-10) {
        const double l1 = x.cwiseAbs().sum();
        if (!best || l1 < best->l1) {
          L1Vertex v;
          v.a = Eigen::VectorXd::Zero(n);
          for (Eigen::Index k = 0; k < r; ++k) v.a(idx[static_cast<std::size_t>(k)]) = x(k);
          v.l1 = l1;
          best = v;
        }
      }
    }
    // next combination
    Eigen::Index k = r - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - r + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (Eigen::Index j = k + 1; j < r; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

}  // namespace oracle
