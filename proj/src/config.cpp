#include "qsn/config.hpp"

#include "qsn/error.hpp"

#include <json.hpp>
#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

namespace qsn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view field, std::string_view what) {
  throw InvalidInput(fmt::format("config field '{}': {}", field, what));
}

void check_keys(const json& obj, std::string_view where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where, fmt::format("unknown key '{}'", key));
  }
}

double get_real(const json& v, std::string_view field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long long get_int(const json& v, std::string_view field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long long>();
}

std::vector<double> get_reals(const json& v, std::string_view field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_real(v[i], fmt::format("{}[{}]", field, i)));
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  if (!(c.t > 0)) fail("t", "must be positive");
  if (c.dense_limit < 1 || c.dense_limit > kMaxQubits) fail("dense_limit", "out of range");
  if (c.is_bosonic()) {
    if (!c.generators.empty() || c.n != 0) {
      fail("bosonic", "qubit section (n, generators) must be absent with a bosonic section");
    }
    if (c.bosonic->m < 1) fail("bosonic.m", "must be at least 1");
    if (c.bosonic->photons < 1) fail("bosonic.P", "must be at least 1");
    if (c.alpha.size() != static_cast<std::size_t>(c.bosonic->m)) {
      fail("alpha", fmt::format("length {} differs from mode count {}", c.alpha.size(),
                                c.bosonic->m));
    }
    if (!c.interactions.empty()) fail("interactions", "not supported for bosonic configs");
    return;
  }
  if (c.n < 1 || c.n > kMaxQubits) fail("n", "must be in [1, 62]");
  if (c.generators.empty()) fail("generators", "missing (or give a bosonic section)");
  for (std::size_t j = 0; j < c.generators.size(); ++j) {
    try {
      const ZString z = ZString::parse(c.generators[j]);
      if (z.n() != c.n) {
        fail(fmt::format("generators[{}]", j),
             fmt::format("has {} qubits, expected {}", z.n(), c.n));
      }
    } catch (const InvalidInput& e) {
      const std::string msg = e.what();
      if (msg.rfind("config field", 0) == 0) throw;
      fail(fmt::format("generators[{}]", j), msg);
    }
  }
  if (c.alpha.size() != c.generators.size()) {
    fail("alpha", fmt::format("length {} differs from generator count {}", c.alpha.size(),
                              c.generators.size()));
  }
  if (c.theta && c.theta->size() != c.generators.size()) {
    fail("theta", fmt::format("length {} differs from generator count {}", c.theta->size(),
                              c.generators.size()));
  }
  for (std::size_t j = 0; j < c.interactions.size(); ++j) {
    const auto field = fmt::format("interactions[{}].pauli", j);
    PauliString p;
    try {
      p = PauliString::parse(c.interactions[j].pauli);
    } catch (const InvalidInput& e) {
      fail(field, e.what());
    }
    if (p.n() != c.n) fail(field, fmt::format("has {} qubits, expected {}", p.n(), c.n));
    if (p.is_identity()) fail(field, "identity term");
  }
  if (c.trotter) {
    for (int l : c.trotter->steps) {
      if (l < 1) fail("trotter.L_grid", "step counts must be positive");
    }
    if (c.trotter->trials < 1) fail("trotter.trials", "must be positive");
  }
  if (c.estimation) {
    if (c.estimation->nu < 1) fail("estimation.nu", "must be positive");
    if (c.estimation->repetitions < 1) fail("estimation.repetitions", "must be positive");
  }
  if (!c.output.format.empty() && c.output.format != "json" && c.output.format != "csv") {
    fail("output.format", "must be 'json' or 'csv'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("config is not valid JSON: {}", e.what()));
  }
  check_keys(j, "<root>",
             {"n", "generators", "alpha", "t", "theta", "interactions", "trotter", "estimation",
              "bosonic", "output", "dense_limit"});

  ExperimentConfig c;
  if (j.contains("n")) c.n = static_cast<int>(get_int(j["n"], "n"));
  if (j.contains("generators")) {
    const auto& g = j["generators"];
    if (!g.is_array()) fail("generators", "expected an array of strings");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_string()) fail(fmt::format("generators[{}]", i), "expected a string");
      c.generators.push_back(g[i].get<std::string>());
    }
  }
  if (!j.contains("alpha")) fail("alpha", "missing");
  c.alpha = get_reals(j["alpha"], "alpha");
  if (j.contains("t")) c.t = get_real(j["t"], "t");
  if (j.contains("theta")) c.theta = get_reals(j["theta"], "theta");
  if (j.contains("interactions")) {
    const auto& arr = j["interactions"];
    if (!arr.is_array()) fail("interactions", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto where = fmt::format("interactions[{}]", i);
      check_keys(arr[i], where, {"pauli", "gamma"});
      if (!arr[i].contains("pauli") || !arr[i]["pauli"].is_string()) {
        fail(where + ".pauli", "expected a string");
      }
      if (!arr[i].contains("gamma")) fail(where + ".gamma", "missing");
      c.interactions.push_back(
          {arr[i]["pauli"].get<std::string>(), get_real(arr[i]["gamma"], where + ".gamma")});
    }
  }
  if (j.contains("trotter")) {
    const auto& tr = j["trotter"];
    check_keys(tr, "trotter", {"L", "L_grid", "seed", "trials"});
    TrotterConfig t;
    if (tr.contains("L") && tr.contains("L_grid")) fail("trotter", "give either L or L_grid");
    if (tr.contains("L")) t.steps.push_back(static_cast<int>(get_int(tr["L"], "trotter.L")));
    if (tr.contains("L_grid")) {
      const auto& g = tr["L_grid"];
      if (!g.is_array()) fail("trotter.L_grid", "expected an array of integers");
      for (std::size_t i = 0; i < g.size(); ++i) {
        t.steps.push_back(
            static_cast<int>(get_int(g[i], fmt::format("trotter.L_grid[{}]", i))));
      }
    }
    if (tr.contains("seed")) {
      if (!tr["seed"].is_number_unsigned()) fail("trotter.seed", "expected a u64");
      t.seed = tr["seed"].get<std::uint64_t>();
    }
    if (tr.contains("trials")) t.trials = static_cast<int>(get_int(tr["trials"], "trotter.trials"));
    c.trotter = t;
  }
  if (j.contains("estimation")) {
    const auto& es = j["estimation"];
    check_keys(es, "estimation", {"nu", "repetitions"});
    EstimationConfig e;
    if (!es.contains("nu")) fail("estimation.nu", "missing");
    e.nu = static_cast<long>(get_int(es["nu"], "estimation.nu"));
    if (es.contains("repetitions")) {
      e.repetitions = static_cast<int>(get_int(es["repetitions"], "estimation.repetitions"));
    }
    c.estimation = e;
  }
  if (j.contains("bosonic")) {
    const auto& b = j["bosonic"];
    check_keys(b, "bosonic", {"m", "P"});
    if (!b.contains("m") || !b.contains("P")) fail("bosonic", "needs m and P");
    c.bosonic = BosonicConfig{static_cast<int>(get_int(b["m"], "bosonic.m")),
                              static_cast<int>(get_int(b["P"], "bosonic.P"))};
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"dir", "format"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) fail("output.dir", "expected a string");
      c.output.dir = o["dir"].get<std::string>();
    }
    if (o.contains("format")) {
      if (!o["format"].is_string()) fail("output.format", "expected a string");
      c.output.format = o["format"].get<std::string>();
    }
  }
  if (j.contains("dense_limit")) {
    c.dense_limit = static_cast<int>(get_int(j["dense_limit"], "dense_limit"));
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open config '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j = json::object();
  if (!c.is_bosonic()) {
    j["n"] = c.n;
    j["generators"] = c.generators;
  }
  j["alpha"] = c.alpha;
  j["t"] = c.t;
  if (c.theta) j["theta"] = *c.theta;
  if (!c.interactions.empty()) {
    json arr = json::array();
    for (const auto& it : c.interactions) arr.push_back({{"pauli", it.pauli}, {"gamma", it.gamma}});
    j["interactions"] = arr;
  }
  if (c.trotter) {
    json tr = {{"L_grid", c.trotter->steps}, {"trials", c.trotter->trials}};
    if (c.trotter->seed) tr["seed"] = *c.trotter->seed;
    j["trotter"] = tr;
  }
  if (c.estimation) {
    j["estimation"] = {{"nu", c.estimation->nu}, {"repetitions", c.estimation->repetitions}};
  }
  if (c.bosonic) j["bosonic"] = {{"m", c.bosonic->m}, {"P", c.bosonic->photons}};
  j["output"] = {{"dir", c.output.dir}};
  if (!c.output.format.empty()) j["output"]["format"] = c.output.format;
  j["dense_limit"] = c.dense_limit;
  return j.dump(2) + "\n";
}

GeneratorSet config_generators(const ExperimentConfig& cfg) {
  if (cfg.is_bosonic()) throw InvalidInput("config has no qubit generators");
  return GeneratorSet::parse(cfg.generators);
}

InteractingHamiltonian config_hamiltonian(const ExperimentConfig& cfg) {
  const GeneratorSet gens = config_generators(cfg);
  if (!cfg.theta) fail("theta", "required for simulation");
  std::vector<double> field(static_cast<std::size_t>(cfg.n), 0.0);
  std::vector<PauliTerm> terms;
  const auto add = [&](const PauliString& p, double c) {
    if (p.is_diagonal() && std::popcount(p.z_mask()) == 1) {
      field[static_cast<std::size_t>(std::countr_zero(p.z_mask()))] += c;
    } else {
      terms.push_back({p, c});
    }
  };
  for (std::size_t j = 0; j < gens.size(); ++j) add(PauliString(gens[j]), (*cfg.theta)[j]);
  for (const auto& it : cfg.interactions) add(PauliString::parse(it.pauli), it.gamma);
  return InteractingHamiltonian(cfg.n, std::move(field), std::move(terms));
}

}  // namespace qsn
