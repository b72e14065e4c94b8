#include "qsn/pauli.hpp"

#include "qsn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <unordered_set>

namespace qsn {

namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw InvalidInput(fmt::format("qubit count {} outside [1, {}]", n, kMaxQubits));
  }
}

std::uint64_t full_mask(int n) { return (std::uint64_t{1} << n) - 1; }

}  // namespace

void check_dense(int n, int dense_limit) {
  if (n > dense_limit) {
    throw SizeExceeded(
        fmt::format("{} qubits exceeds the dense-matrix limit of {}", n, dense_limit));
  }
}

ZString::ZString(int n, std::uint64_t mask) : n_(n), mask_(mask) {
  check_qubits(n);
  if ((mask & ~full_mask(n)) != 0) {
    throw InvalidInput(fmt::format("Z mask {:#x} has bits beyond {} qubits", mask, n));
  }
}

ZString ZString::parse(std::string_view text) {
  auto p = PauliString::parse(text);
  if (!p.is_diagonal()) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != 'I' && text[i] != 'Z') {
        throw InvalidInput(fmt::format(
            "'{}': position {} has '{}', expected I or Z", text, i + 1, text[i]));
      }
    }
  }
  return ZString(p.n(), p.z_mask());
}

ZString ZString::single(int n, int qubit) {
  if (qubit < 0 || qubit >= n) {
    throw InvalidInput(fmt::format("qubit {} outside 0..{}", qubit, n - 1));
  }
  return ZString(n, std::uint64_t{1} << qubit);
}

std::string ZString::to_string() const {
  std::string s(static_cast<std::size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) {
    if ((mask_ >> i) & 1u) s[static_cast<std::size_t>(i)] = 'Z';
  }
  return s;
}

PauliString::PauliString(int n, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_(n), x_(x_mask), z_(z_mask) {
  check_qubits(n);
  if (((x_mask | z_mask) & ~full_mask(n)) != 0) {
    throw InvalidInput(fmt::format("Pauli masks have bits beyond {} qubits", n));
  }
}

PauliString PauliString::parse(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty Pauli string");
  const int n = static_cast<int>(text.size());
  check_qubits(n);
  std::uint64_t x = 0, z = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    switch (text[static_cast<std::size_t>(i)]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Z': z |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      default:
        throw InvalidInput(fmt::format("'{}': position {} has invalid character '{}'",
                                       text, i + 1, text[static_cast<std::size_t>(i)]));
    }
  }
  return PauliString(n, x, z);
}

std::optional<ZString> PauliString::as_zstring() const {
  if (!is_diagonal()) return std::nullopt;
  return ZString(n_, z_);
}

std::string PauliString::to_string() const {
  std::string s(static_cast<std::size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) {
    const bool xb = (x_ >> i) & 1u;
    const bool zb = (z_ >> i) & 1u;
    s[static_cast<std::size_t>(i)] = xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  return s;
}

GeneratorSet::GeneratorSet(int n, std::vector<ZString> generators)
    : n_(n), gens_(std::move(generators)) {
  check_qubits(n);
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t j = 0; j < gens_.size(); ++j) {
    const auto& g = gens_[j];
    if (g.n() != n) {
      throw InvalidInput(fmt::format("generator {} has {} qubits, expected {}", j + 1,
                                     g.n(), n));
    }
    if (g.is_identity()) {
      throw InvalidInput(fmt::format("generator {} is the identity", j + 1));
    }
    if (!seen.insert(g.mask()).second) {
      throw InvalidInput(fmt::format("generator {} ({}) is a duplicate", j + 1,
                                     g.to_string()));
    }
  }
}

GeneratorSet GeneratorSet::parse(const std::vector<std::string>& texts) {
  if (texts.empty()) throw InvalidInput("no generators given");
  std::vector<ZString> gens;
  gens.reserve(texts.size());
  for (std::size_t j = 0; j < texts.size(); ++j) {
    try {
      gens.push_back(ZString::parse(texts[j]));
    } catch (const InvalidInput& e) {
      throw InvalidInput(fmt::format("generator {}: {}", j + 1, e.what()));
    }
  }
  const int n = gens.front().n();
  return GeneratorSet(n, std::move(gens));
}

GeneratorSet GeneratorSet::local(int n) {
  std::vector<ZString> gens;
  for (int i = 0; i < n; ++i) gens.push_back(ZString::single(n, i));
  return GeneratorSet(n, std::move(gens));
}

GeneratorSet GeneratorSet::all(int n) {
  std::vector<ZString> gens;
  for (std::uint64_t m = 1; m <= full_mask(n); ++m) gens.emplace_back(n, m);
  return GeneratorSet(n, std::move(gens));
}

bool GeneratorSet::is_independent() const {
  // Gaussian elimination over GF(2).
  std::vector<std::uint64_t> basis;
  for (const auto& g : gens_) {
    std::uint64_t v = g.mask();
    for (auto b : basis) v = std::min(v, v ^ b);
    if (v == 0) return false;
    basis.push_back(v);
    std::sort(basis.rbegin(), basis.rend());
  }
  return true;
}

int eigenvalue(const ZString& z, BasisLabel x) { return z.eigenvalue(x); }

EigenvalueMatrix build_eigenvalue_matrix(const GeneratorSet& gens, bool prepend_ones,
                                         std::span<const BasisLabel> columns) {
  EigenvalueMatrix out;
  out.has_ones_row = prepend_ones;
  const int n = gens.n();
  if (columns.empty()) {
    if (n > 30) throw SizeExceeded("cannot enumerate all columns beyond 30 qubits");
    const BasisLabel count = BasisLabel{1} << n;
    out.columns.resize(count);
    for (BasisLabel x = 0; x < count; ++x) out.columns[x] = x;
  } else {
    std::unordered_set<BasisLabel> seen;
    for (auto x : columns) {
      if ((x & ~full_mask(n)) != 0) {
        throw InvalidInput(fmt::format("column label {} out of range for {} qubits", x, n));
      }
      if (!seen.insert(x).second) {
        throw InvalidInput(fmt::format("duplicate column label {}", x));
      }
    }
    out.columns.assign(columns.begin(), columns.end());
  }
  const Eigen::Index offset = prepend_ones ? 1 : 0;
  out.values.resize(static_cast<Eigen::Index>(gens.size()) + offset,
                    static_cast<Eigen::Index>(out.columns.size()));
  for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
    const BasisLabel x = out.columns[static_cast<std::size_t>(c)];
    if (prepend_ones) out.values(0, c) = 1.0;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      out.values(static_cast<Eigen::Index>(j) + offset, c) = gens[j].eigenvalue(x);
    }
  }
  return out;
}

InteractingHamiltonian::InteractingHamiltonian(int n, std::vector<double> theta,
                                               std::vector<PauliTerm> interactions)
    : n_(n), theta_(std::move(theta)), interactions_(std::move(interactions)) {
  check_qubits(n);
  if (theta_.size() != static_cast<std::size_t>(n)) {
    throw InvalidInput(
        fmt::format("theta has {} entries, expected {}", theta_.size(), n));
  }
  for (std::size_t j = 0; j < interactions_.size(); ++j) {
    const auto& p = interactions_[j].op;
    if (p.n() != n) {
      throw InvalidInput(fmt::format("interaction {} acts on {} qubits, expected {}",
                                     j + 1, p.n(), n));
    }
    if (p.is_diagonal() && std::popcount(p.z_mask()) == 1) {
      throw InvalidInput(fmt::format(
          "interaction {} ({}) is a single-qubit Z; put it in theta", j + 1,
          p.to_string()));
    }
  }
}

double InteractingHamiltonian::coefficient_norm() const {
  double s = 0.0;
  for (double v : theta_) s += std::abs(v);
  for (const auto& t : interactions_) {
    if (!t.op.is_identity()) s += std::abs(t.coeff);
  }
  return s;
}

DiagonalHamiltonian::DiagonalHamiltonian(int n, std::vector<ZTerm> terms)
    : n_(n), terms_(std::move(terms)) {
  check_qubits(n);
  for (const auto& t : terms_) {
    if (t.op.n() != n) throw InvalidInput("diagonal term qubit count mismatch");
  }
}

DiagonalHamiltonian DiagonalHamiltonian::from_generators(const GeneratorSet& gens,
                                                         std::span<const double> theta) {
  if (theta.size() != gens.size()) {
    throw InvalidInput(fmt::format("theta has {} entries for {} generators",
                                   theta.size(), gens.size()));
  }
  std::vector<ZTerm> terms;
  for (std::size_t j = 0; j < gens.size(); ++j) terms.push_back({gens[j], theta[j]});
  return DiagonalHamiltonian(gens.n(), std::move(terms));
}

double DiagonalHamiltonian::energy(BasisLabel x) const {
  double e = 0.0;
  for (const auto& t : terms_) e += t.coeff * t.op.eigenvalue(x);
  return e;
}

Eigen::VectorXd DiagonalHamiltonian::energies(int dense_limit) const {
  check_dense(n_, dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Eigen::VectorXd e(dim);
  for (Eigen::Index x = 0; x < dim; ++x) e(x) = energy(static_cast<BasisLabel>(x));
  return e;
}

DiagonalHamiltonian project_effective(const InteractingHamiltonian& h) {
  std::vector<ZTerm> terms;
  for (int i = 0; i < h.n(); ++i) terms.push_back({ZString::single(h.n(), i), h.theta()[static_cast<std::size_t>(i)]});
  for (const auto& t : h.interactions()) {
    if (auto z = t.op.as_zstring()) terms.push_back({*z, t.coeff});
  }
  return DiagonalHamiltonian(h.n(), std::move(terms));
}

namespace {

void add_pauli(Eigen::MatrixXcd& m, const PauliString& p, double coeff) {
  using cd = std::complex<double>;
  static const cd kPhases[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  const cd phase = kPhases[std::popcount(p.x_mask() & p.z_mask()) & 3];
  const Eigen::Index dim = m.rows();
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto col = static_cast<std::uint64_t>(b);
    const double sign = bit_parity(p.z_mask() & col) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(col ^ p.x_mask()), b) += coeff * sign * phase;
  }
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const PauliString& p, int dense_limit) {
  check_dense(p.n(), dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << p.n();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  add_pauli(m, p, 1.0);
  return m;
}

Eigen::MatrixXcd dense_matrix(const InteractingHamiltonian& h, int dense_limit) {
  check_dense(h.n(), dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << h.n();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < h.n(); ++i) {
    add_pauli(m, PauliString(ZString::single(h.n(), i)), h.theta()[static_cast<std::size_t>(i)]);
  }
  for (const auto& t : h.interactions()) add_pauli(m, t.op, t.coeff);
  return m;
}

Eigen::MatrixXcd dense_matrix(const DiagonalHamiltonian& h, int dense_limit) {
  const Eigen::VectorXd e = h.energies(dense_limit);
  return e.cast<std::complex<double>>().asDiagonal();
}

}  // namespace qsn
