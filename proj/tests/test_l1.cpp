#include "oracles/l1_oracle.hpp"
#include "support.hpp"

#include "qsn/error.hpp"
#include "qsn/l1_solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace qsn;

namespace {

void check_invariants(const L1Problem& prob, const L1Solution& sol) {
  CHECK(sol.constraint_residual(prob) < 1e-9);
  CHECK(sol.zero_sum_residual() < 1e-9);
  CHECK(sol.l0 <= prob.num_generators() + 1);
  CHECK(sol.dual.max_violation(prob.h) < 1e-9);
  CHECK(sol.dual.objective == doctest::Approx(sol.l1).epsilon(1e-9));
  CHECK(sol.dual.seminorm == doctest::Approx(2.0 / sol.l1).epsilon(1e-9));
  CHECK(prob.alpha.dot(sol.dual.beta) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.bound == doctest::Approx(sol.l1 * sol.l1 / (4.0 * prob.t * prob.t)));
  for (const auto& e : sol.a) CHECK(std::abs(e.v) >= 1e-12);
}

}  // namespace

TEST_CASE("independent generators reproduce the infinity norm") {
  const auto gens = GeneratorSet::local(2);
  const std::vector<double> alpha{1.0, 0.3};
  const auto prob = L1Problem::from_generators(gens, alpha, 1.0);
  const auto sol = solve_l1(prob);
  CHECK(sol.l1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.bound == doctest::Approx(0.25));
  CHECK(closed_form_independent(alpha) == doctest::Approx(0.25));
  check_invariants(prob, sol);
}

TEST_CASE("zero alpha is trivial") {
  const auto gens = GeneratorSet::local(3);
  const std::vector<double> alpha{0.0, 0.0, 0.0};
  const auto sol = solve_l1(L1Problem::from_generators(gens, alpha, 2.0));
  CHECK(sol.a.empty());
  CHECK(sol.l1 == 0.0);
  CHECK(sol.bound == 0.0);
}

TEST_CASE("all generators on two qubits give the unique solution") {
  const auto gens = GeneratorSet::all(2);
  const std::vector<double> alpha{1.0, 1.0, 1.0};
  const auto prob = L1Problem::from_generators(gens, alpha, 1.0);
  const auto sol = solve_l1(prob);
  CHECK(sol.l1 == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sol.bound == doctest::Approx(0.5625));
  CHECK(sol.value_at(0) == doctest::Approx(0.75));
  for (BasisLabel x = 1; x < 4; ++x) CHECK(sol.value_at(x) == doctest::Approx(-0.25));
  // a = h' alpha' / N with the Hadamard-like matrix h'
  const auto full = build_eigenvalue_matrix(gens, true);
  Eigen::VectorXd ap(4);
  ap << 0.0, 1.0, 1.0, 1.0;
  const Eigen::VectorXd direct = full.values.transpose() * ap / 4.0;
  for (BasisLabel x = 0; x < 4; ++x) CHECK(sol.value_at(x) == doctest::Approx(direct(x)));
  const auto ref = oracle::oracle_l1(prob.h, prob.alpha);
  REQUIRE(ref);
  CHECK(ref->l1 == doctest::Approx(sol.l1).epsilon(1e-12));
  check_invariants(prob, sol);
}

TEST_CASE("single generator") {
  const auto gens = GeneratorSet::parse({"Z"});
  for (double c : {0.7, -2.5}) {
    const std::vector<double> alpha{c};
    const auto prob = L1Problem::from_generators(gens, alpha, 1.0);
    const auto sol = solve_l1(prob);
    CHECK(sol.l1 == doctest::Approx(std::abs(c)));
    CHECK(sol.value_at(0) == doctest::Approx(c / 2));
    CHECK(sol.value_at(1) == doctest::Approx(-c / 2));
    const auto ref = oracle::oracle_l1(prob.h, prob.alpha);
    REQUIRE(ref);
    CHECK(ref->l1 == doctest::Approx(std::abs(c)));
  }
}

TEST_CASE("random instances agree with the vertex oracle") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3;
    const int m = 1 + trial % 7;
    const auto gens = testing_support::random_generators(gen, n, m);
    const auto alpha = testing_support::uniform_vector(gen, static_cast<std::size_t>(m));
    const auto prob = L1Problem::from_generators(gens, alpha, 1.0);
    const auto sol = solve_l1(prob);
    const auto ref = oracle::oracle_l1(prob.h, prob.alpha);
    REQUIRE(ref);
    CHECK(sol.l1 == doctest::Approx(ref->l1).epsilon(1e-9));
    check_invariants(prob, sol);
  }
}

TEST_CASE("stabilizer generators never beat the two-norm") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    const int max_m = (1 << n) - 1;
    const int m = 1 + static_cast<int>(gen() % static_cast<unsigned>(max_m));
    const auto gens = testing_support::random_generators(gen, n, m);
    const auto alpha = testing_support::uniform_vector(gen, static_cast<std::size_t>(m));
    const auto sol = solve_l1(L1Problem::from_generators(gens, alpha, 1.0));
    double two = 0.0;
    for (double a : alpha) two += a * a;
    CHECK(sol.l1 <= std::sqrt(two) + 1e-9);
  }
}

TEST_CASE("scaling covariance") {
  std::mt19937_64 gen(3);
  const auto gens = testing_support::random_generators(gen, 3, 4);
  const auto alpha = testing_support::uniform_vector(gen, 4);
  const auto base = solve_l1(L1Problem::from_generators(gens, alpha, 1.0));
  for (double c : {2.0, -0.5, 10.0}) {
    std::vector<double> scaled = alpha;
    for (auto& v : scaled) v *= c;
    const auto sol = solve_l1(L1Problem::from_generators(gens, scaled, 1.0));
    CHECK(sol.l1 == doctest::Approx(std::abs(c) * base.l1).epsilon(1e-9));
    CHECK(sol.bound == doctest::Approx(c * c * base.bound).epsilon(1e-9));
  }
}

TEST_CASE("all generators on three qubits: no optimization freedom") {
  std::mt19937_64 gen(8);
  const auto gens = GeneratorSet::all(3);
  const auto full = build_eigenvalue_matrix(gens, true);
  for (int trial = 0; trial < 10; ++trial) {
    const auto alpha = testing_support::uniform_vector(gen, 7);
    const auto sol = solve_l1(L1Problem::from_generators(gens, alpha, 1.0));
    Eigen::VectorXd ap(8);
    ap(0) = 0.0;
    for (int j = 0; j < 7; ++j) ap(j + 1) = alpha[static_cast<std::size_t>(j)];
    const Eigen::VectorXd direct = full.values.transpose() * ap / 8.0;
    for (BasisLabel x = 0; x < 8; ++x) {
      CHECK(sol.value_at(x) == doctest::Approx(direct(static_cast<Eigen::Index>(x))).epsilon(1e-9));
    }
  }
}

TEST_CASE("closed forms") {
  const std::vector<double> a{1.0, 0.5};
  CHECK(closed_form_independent(a) == doctest::Approx(0.25));
  const std::vector<double> ones(5, 1.0);
  CHECK(closed_form_independent(ones, 2.0) == doctest::Approx(0.0625));
  const std::vector<double> mzi{1.0, -1.0};
  CHECK(closed_form_bosonic(mzi, 2) == doctest::Approx(0.25));
  const std::vector<double> same{1.0, 1.0};
  CHECK(closed_form_bosonic(same, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(closed_form_bosonic(same, 0), InvalidInput);
}

TEST_CASE("bosonic enumeration") {
  const auto one = bosonic_matrix(1, 2);
  CHECK(one.h.cols() == 3);
  CHECK(one.h(0, 2) == 2.0);
  const auto two = bosonic_matrix(2, 1);
  REQUIRE(two.tuples.size() == 3);
  CHECK(two.tuples[0] == std::vector<int>{0, 0});
  CHECK(two.tuples[1] == std::vector<int>{0, 1});
  CHECK(two.tuples[2] == std::vector<int>{1, 0});
  CHECK(bosonic_matrix(2, 2).h.cols() == 6);
  CHECK(bosonic_matrix(3, 4).h.cols() == 35);
  CHECK_THROWS_AS(bosonic_matrix(4, 4, 10), SizeExceeded);
}

TEST_CASE("bosonic LP matches the closed form") {
  const BosonicProblem mzi{2, 2, {1.0, -1.0}, 1.0};
  const auto sol = solve_l1(bosonic_l1_problem(mzi));
  CHECK(sol.bound == doctest::Approx(0.25).epsilon(1e-9));
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + trial % 3;
    const int p = 1 + (trial / 3) % 4;
    const BosonicProblem bp{m, p, testing_support::uniform_vector(gen, static_cast<std::size_t>(m)),
                            1.0};
    const auto prob = bosonic_l1_problem(bp);
    const auto s = solve_l1(prob);
    CHECK(s.bound == doctest::Approx(closed_form_bosonic(bp.alpha, p)).epsilon(1e-9));
    CHECK(s.l0 <= m + 1);
    CHECK(s.dual.max_violation(prob.h) < 1e-9);
  }
}

TEST_CASE("error paths") {
  const auto gens = GeneratorSet::local(2);
  const std::vector<double> alpha{1.0, 1.0};
  const std::vector<BasisLabel> two_cols{0, 3};
  // Two columns cannot carry three independent constraints.
  CHECK_THROWS_AS(solve_l1(L1Problem::from_generators(gens, alpha, 1.0, two_cols)),
                  RankDeficient);
  SolverOptions small;
  small.max_columns = 2;
  CHECK_THROWS_AS(solve_l1(L1Problem::from_generators(gens, alpha, 1.0), small), SizeExceeded);
  const std::vector<double> short_alpha{1.0};
  CHECK_THROWS_AS(L1Problem::from_generators(gens, short_alpha, 1.0), InvalidInput);
}

TEST_CASE("restricted columns whose row space misses alpha") {
  // Columns 0 and 3 share every eigenvalue of Z1Z2, so alpha = (1) on that
  // generator cannot combine with the zero-sum row.
  const auto gens = GeneratorSet::parse({"ZZ"});
  const std::vector<double> alpha{1.0};
  const std::vector<BasisLabel> cols{0, 3};
  CHECK_THROWS_AS(solve_l1(L1Problem::from_generators(gens, alpha, 1.0, cols)), MathError);
}
