#pragma once

#include <Eigen/Dense>

#include <optional>

namespace oracle {

struct L1Vertex {
  Eigen::VectorXd a;  // dense over the columns of h
  double l1 = 0.0;
};

// Enumerates every (m+1)-column basis of [1; h], solves it exactly and keeps
// the feasible one of least l1 norm. Small instances only.
std::optional<L1Vertex> oracle_l1(const Eigen::MatrixXd& h, const Eigen::VectorXd& alpha);

}  // namespace oracle
