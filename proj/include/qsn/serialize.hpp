#pragma once

#include "qsn/l1_solver.hpp"
#include "qsn/protocol.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace qsn {

// "0110": character i is qubit i+1 (same order as Pauli text).
std::string basis_text(BasisLabel x, int n);
BasisLabel parse_basis(std::string_view text, int n);

nlohmann::json solution_json(const L1Solution& sol, int n);
// Bosonic variant: labels are indices into the tuple list.
nlohmann::json solution_json(const L1Solution& sol,
                             const std::vector<std::vector<int>>& tuples);

// {t, n, l1, init, events: [{time, branch, from, to}], final}. A merged
// event becomes two entries with the same time, plus first.
nlohmann::json protocol_json(const Protocol& proto);
Protocol protocol_from_json(const nlohmann::json& j);

// Rows of scalar cells written as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<nlohmann::json>> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace qsn
