#pragma once

#include "qsn/pauli.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline std::vector<double> uniform_vector(std::mt19937_64& gen, std::size_t k, double lo = -1.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(k);
  for (auto& x : v) x = d(gen);
  return v;
}

// Distinct non-identity Z-strings, m of them, drawn without replacement.
inline qsn::GeneratorSet random_generators(std::mt19937_64& gen, int n, int m) {
  std::vector<std::uint64_t> masks;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) masks.push_back(s);
  std::shuffle(masks.begin(), masks.end(), gen);
  std::vector<qsn::ZString> out;
  for (int j = 0; j < m; ++j) out.emplace_back(n, masks[static_cast<std::size_t>(j)]);
  return qsn::GeneratorSet(n, std::move(out));
}

inline std::string random_pauli(std::mt19937_64& gen, int n) {
  static const char kChars[] = "IXYZ";
  std::uniform_int_distribution<int> d(0, 3);
  std::string s;
  do {
    s.clear();
    for (int i = 0; i < n; ++i) s += kChars[d(gen)];
  } while (s.find_first_not_of('I') == std::string::npos);
  return s;
}

}  // namespace testing_support
