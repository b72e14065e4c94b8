#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsn {

// Computational basis label. Qubit i (1-based) is bit i-1, so qubit 1 is
// the least significant bit.
using BasisLabel = std::uint64_t;

inline constexpr int kMaxQubits = 62;
inline constexpr int kDefaultDenseLimit = 10;

inline int bit_parity(std::uint64_t v) { return std::popcount(v) & 1; }

// An element of the Z stabilizer group {I, Z}^n stored as a bit mask.
class ZString {
 public:
  ZString() = default;
  ZString(int n, std::uint64_t mask);

  // Parses text such as "ZIZ" (leftmost character is qubit 1). Only 'I' and
  // 'Z' are accepted.
  static ZString parse(std::string_view text);
  static ZString single(int n, int qubit);  // Z on 0-based qubit

  int n() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  bool is_identity() const { return mask_ == 0; }

  // <x|s|x> = (-1)^popcount(mask & x)
  int eigenvalue(BasisLabel x) const { return bit_parity(mask_ & x) ? -1 : 1; }

  std::string to_string() const;

  friend bool operator==(const ZString&, const ZString&) = default;

 private:
  int n_ = 0;
  std::uint64_t mask_ = 0;
};

// General Pauli string i^{popcount(x&z)} X^x Z^z, which is Hermitian with
// Y = iXZ on sites where both masks are set.
class PauliString {
 public:
  PauliString() = default;
  PauliString(int n, std::uint64_t x_mask, std::uint64_t z_mask);
  explicit PauliString(const ZString& z) : PauliString(z.n(), 0, z.mask()) {}

  static PauliString parse(std::string_view text);

  int n() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  bool is_diagonal() const { return x_ == 0; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  std::optional<ZString> as_zstring() const;

  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

// Ordered list of distinct, non-identity Z-strings on n qubits.
class GeneratorSet {
 public:
  GeneratorSet(int n, std::vector<ZString> generators);

  static GeneratorSet parse(const std::vector<std::string>& texts);
  // {Z_1, ..., Z_n}
  static GeneratorSet local(int n);
  // Every non-identity Z-string, ordered by mask.
  static GeneratorSet all(int n);

  int n() const { return n_; }
  std::size_t size() const { return gens_.size(); }
  const ZString& operator[](std::size_t j) const { return gens_[j]; }
  const std::vector<ZString>& generators() const { return gens_; }
  auto begin() const { return gens_.begin(); }
  auto end() const { return gens_.end(); }

  // True when no nontrivial product of generators is the identity
  // (the masks are linearly independent over GF(2)).
  bool is_independent() const;

 private:
  int n_;
  std::vector<ZString> gens_;
};

// Matrix of generator eigenvalues h_{j,x} = <x|s_j|x> over a set of
// columns. Row 0 is the all-ones row when has_ones_row is set.
struct EigenvalueMatrix {
  Eigen::MatrixXd values;
  std::vector<BasisLabel> columns;
  bool has_ones_row = false;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

int eigenvalue(const ZString& z, BasisLabel x);

// Rows are [ones?] followed by generator order. When `columns` is empty all
// 2^n labels are used in increasing order.
EigenvalueMatrix build_eigenvalue_matrix(const GeneratorSet& gens,
                                         bool prepend_ones,
                                         std::span<const BasisLabel> columns = {});

struct PauliTerm {
  PauliString op;
  double coeff = 0.0;
};

struct ZTerm {
  ZString op;
  double coeff = 0.0;
};

// H0 = sum_i theta_i Z_i + sum_j gamma_j P_j. Single-qubit Z terms belong in
// theta and are rejected as interactions.
class InteractingHamiltonian {
 public:
  InteractingHamiltonian(int n, std::vector<double> theta,
                         std::vector<PauliTerm> interactions = {});

  int n() const { return n_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<PauliTerm>& interactions() const { return interactions_; }

  // Sum of |coefficients|, an upper bound on the spectral norm.
  double coefficient_norm() const;

 private:
  int n_;
  std::vector<double> theta_;
  std::vector<PauliTerm> interactions_;
};

class DiagonalHamiltonian {
 public:
  DiagonalHamiltonian(int n, std::vector<ZTerm> terms = {});

  // theta_j attached to generator j.
  static DiagonalHamiltonian from_generators(const GeneratorSet& gens,
                                             std::span<const double> theta);

  int n() const { return n_; }
  const std::vector<ZTerm>& terms() const { return terms_; }

  // Eigenvalue E(x) = sum_k c_k <x|s_k|x>.
  double energy(BasisLabel x) const;
  // All 2^n energies (dense limit applies).
  Eigen::VectorXd energies(int dense_limit = kDefaultDenseLimit) const;

 private:
  int n_;
  std::vector<ZTerm> terms_;
};

// Stabilizer-group average (1/N) sum_s s H0 s: keeps theta terms and the
// interaction terms with no X component.
DiagonalHamiltonian project_effective(const InteractingHamiltonian& h);

Eigen::MatrixXcd dense_matrix(const PauliString& p, int dense_limit = kDefaultDenseLimit);
Eigen::MatrixXcd dense_matrix(const InteractingHamiltonian& h,
                              int dense_limit = kDefaultDenseLimit);
Eigen::MatrixXcd dense_matrix(const DiagonalHamiltonian& h,
                              int dense_limit = kDefaultDenseLimit);

// Throws SizeExceeded when n exceeds the dense limit.
void check_dense(int n, int dense_limit);

}  // namespace qsn
