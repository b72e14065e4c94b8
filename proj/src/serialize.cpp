#include "qsn/serialize.hpp"

#include "qsn/error.hpp"

#include <fmt/format.h>

namespace qsn {

using nlohmann::json;

std::string basis_text(BasisLabel x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) {
    if ((x >> q) & 1u) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

BasisLabel parse_basis(std::string_view text, int n) {
  if (static_cast<int>(text.size()) != n) {
    throw InvalidInput(fmt::format("basis label '{}' should have {} characters", text, n));
  }
  BasisLabel x = 0;
  for (int q = 0; q < n; ++q) {
    const char c = text[static_cast<std::size_t>(q)];
    if (c == '1') x |= BasisLabel{1} << q;
    else if (c != '0') {
      throw InvalidInput(fmt::format("basis label '{}': bad character at position {}", text, q + 1));
    }
  }
  return x;
}

namespace {

json dual_json(const DualCertificate& d) {
  return {{"y", std::vector<double>(d.y.data(), d.y.data() + d.y.size())},
          {"objective", d.objective},
          {"beta", std::vector<double>(d.beta.data(), d.beta.data() + d.beta.size())},
          {"seminorm", d.seminorm}};
}

template <typename Label>
json solution_with(const L1Solution& sol, Label&& label) {
  json a = json::array();
  for (const auto& e : sol.a) a.push_back({{"x", label(e.x)}, {"a", e.v}});
  return {{"l1", sol.l1}, {"l0", sol.l0}, {"t", sol.t}, {"bound", sol.bound},
          {"a", a},       {"dual", dual_json(sol.dual)}};
}

}  // namespace

json solution_json(const L1Solution& sol, int n) {
  return solution_with(sol, [n](BasisLabel x) { return basis_text(x, n); });
}

json solution_json(const L1Solution& sol, const std::vector<std::vector<int>>& tuples) {
  return solution_with(sol, [&](BasisLabel x) { return json(tuples.at(x)); });
}

json protocol_json(const Protocol& p) {
  json events = json::array();
  for (const auto& ev : p.events) {
    if (ev.plus) {
      events.push_back({{"time", ev.time},
                        {"branch", "plus"},
                        {"from", basis_text(ev.plus->from, p.n)},
                        {"to", basis_text(ev.plus->to, p.n)}});
    }
    if (ev.minus) {
      events.push_back({{"time", ev.time},
                        {"branch", "minus"},
                        {"from", basis_text(ev.minus->from, p.n)},
                        {"to", basis_text(ev.minus->to, p.n)}});
    }
  }
  const auto [ip, im] = p.init();
  const auto [fp, fm] = p.final_pair();
  return {{"t", p.t},
          {"n", p.n},
          {"l1", p.l1},
          {"init", {{"plus", basis_text(ip, p.n)}, {"minus", basis_text(im, p.n)}}},
          {"events", events},
          {"final", {{"plus", basis_text(fp, p.n)}, {"minus", basis_text(fm, p.n)}}}};
}

Protocol protocol_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const double t = j.at("t").get<double>();
    const double l1 = j.at("l1").get<double>();
    const auto& init = j.at("init");
    const std::pair<BasisLabel, BasisLabel> start{
        parse_basis(init.at("plus").get<std::string>(), n),
        parse_basis(init.at("minus").get<std::string>(), n)};
    std::vector<SwitchEvent> events;
    for (const auto& e : j.at("events")) {
      const double time = e.at("time").get<double>();
      const std::string branch = e.at("branch").get<std::string>();
      const BranchUpdate up{parse_basis(e.at("from").get<std::string>(), n),
                            parse_basis(e.at("to").get<std::string>(), n)};
      if (branch == "plus") {
        events.push_back({time, up, std::nullopt});
      } else if (branch == "minus") {
        if (!events.empty() && events.back().time == time && events.back().plus &&
            !events.back().minus) {
          events.back().minus = up;
        } else {
          events.push_back({time, std::nullopt, up});
        }
      } else {
        throw InvalidInput(fmt::format("protocol: unknown branch '{}'", branch));
      }
    }
    Protocol p = Protocol::from_schedule(n, t, l1, start, std::move(events));
    const auto& fin = j.at("final");
    if (p.final_pair() != std::pair{parse_basis(fin.at("plus").get<std::string>(), n),
                                    parse_basis(fin.at("minus").get<std::string>(), n)}) {
      throw InvalidInput("protocol: final pair does not match the event list");
    }
    return p;
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("protocol JSON: {}", e.what()));
  }
}

namespace {

std::string cell_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size() && i < header.size(); ++i) obj[header[i]] = row[i];
    arr.push_back(obj);
  }
  return arr.dump(2) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace qsn
