#include "qsn/config.hpp"
#include "qsn/error.hpp"
#include "qsn/serialize.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace qsn;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QSN_TEST_DATA;
const fs::path kCli = QSN_CLI;
const fs::path kWork = QSN_WORK;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path dir = kWork / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round trip") {
  for (const char* name : {"interacting.json", "all_generators.json", "bosonic.json"}) {
    const auto cfg = load_config((kData / name).string());
    const auto text = serialize_config(cfg);
    const auto again = parse_config(text);
    CHECK(again == cfg);
    CHECK(serialize_config(again) == text);
  }
}

TEST_CASE("config fields") {
  const auto cfg = load_config((kData / "interacting.json").string());
  CHECK(cfg.n == 3);
  CHECK(cfg.trotter->steps == std::vector<int>{8, 64});
  CHECK(cfg.seed() == std::optional<std::uint64_t>{11});
  CHECK(cfg.estimation->nu == 10000);
  const auto single = load_config((kData / "all_generators.json").string());
  CHECK(single.trotter->steps == std::vector<int>{30});
  CHECK_FALSE(single.seed());
  const auto h = config_hamiltonian(cfg);
  CHECK(h.theta() == std::vector<double>{0.02, -0.01, 0.015});
  CHECK(h.interactions().size() == 2);
  const auto h2 = config_hamiltonian(single);
  CHECK(h2.theta() == std::vector<double>{0.1, 0.2});
  REQUIRE(h2.interactions().size() == 1);
  CHECK(h2.interactions()[0].op.to_string() == "ZZ");
}

TEST_CASE("config validation") {
  try {
    (void)load_config((kData / "bad_generator.json").string());
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    CHECK(msg.find("generators[1]") != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("{"), InvalidInput);
  CHECK_THROWS_AS(parse_config(R"({"n":2,"generators":["ZI"],"alpha":[1,2]})"), InvalidInput);
  CHECK_THROWS_AS(parse_config(R"({"n":2,"generators":["ZI"],"alpha":[1],"extra":1})"),
                  InvalidInput);
  CHECK_THROWS_AS(
      parse_config(R"({"n":1,"generators":["Z"],"alpha":[1],"bosonic":{"m":1,"P":1}})"),
      InvalidInput);
  CHECK_THROWS_AS(parse_config(R"({"alpha":[1]})"), InvalidInput);
  CHECK_THROWS_AS(parse_config(R"({"n":2,"generators":["ZI"],"alpha":[1],"interactions":[{"pauli":"XXX","gamma":1}]})"),
                  InvalidInput);
  CHECK_THROWS_AS(parse_config(R"({"n":2,"generators":["ZI"],"alpha":[1],"output":{"format":"xml"}})"),
                  InvalidInput);
}

TEST_CASE("table and label helpers") {
  CHECK(basis_text(0b011, 3) == "110");
  CHECK(parse_basis("110", 3) == 0b011);
  CHECK_THROWS_AS(parse_basis("12", 2), InvalidInput);
  CHECK_THROWS_AS(parse_basis("1", 2), InvalidInput);
  Table t{{"a", "b"}, {{1, "x"}, {0.5, "y"}}};
  CHECK(t.to_csv() == "a,b\n1,x\n0.5,y\n");
  CHECK(nlohmann::json::parse(t.to_json())[1]["a"] == 0.5);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("bound command reports the closed-form match") {
  const auto dir = fresh("bound");
  REQUIRE(run_cli("--config " + (kData / "interacting.json").string() + " --out " + dir.string() +
                  " bound") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "bound.json"));
  CHECK(j["solution"]["bound"].get<double>() == doctest::Approx(0.25));
  CHECK(j["closed_form"]["status"] == "matched");

  const auto bdir = fresh("bound_bosonic");
  REQUIRE(run_cli("--config " + (kData / "bosonic.json").string() + " --out " + bdir.string() +
                  " bound") == 0);
  const auto b = nlohmann::json::parse(slurp(bdir / "bound.json"));
  CHECK(b["solution"]["bound"].get<double>() == doctest::Approx(0.25));
  CHECK(b["closed_form"]["status"] == "matched");
}

TEST_CASE("compile command output loads back") {
  const auto dir = fresh("compile");
  REQUIRE(run_cli("--config " + (kData / "all_generators.json").string() + " --out " +
                  dir.string() + " compile") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "protocol.json"));
  const auto proto = protocol_from_json(j);
  CHECK(proto.l1 == doctest::Approx(1.5));
  CHECK(proto.minus.size() == 3);
  CHECK(protocol_json(proto) == j);
}

TEST_CASE("exit codes") {
  const auto dir = fresh("exit");
  const std::string out = " --out " + dir.string();
  CHECK(run_cli("--config " + (kData / "bad_generator.json").string() + out + " bound") == 2);
  CHECK(run_cli("--config " + (kData / "missing.json").string() + out + " bound") == 2);
  CHECK(run_cli("--config " + (kData / "all_generators.json").string() + out + " simulate") == 2);
  CHECK(run_cli("--config " + (kData / "empty_grid.json").string() + out + " reshape-bench") == 2);
  CHECK(run_cli("--config " + (kData / "too_large.json").string() + out + " simulate") == 4);
  CHECK(run_cli("--config " + (kData / "bosonic.json").string() + out + " compile") == 2);
  CHECK(run_cli(out + " bound") == 2);
  CHECK(run_cli("--config " + (kData / "all_generators.json").string() + out + " --seed 3 simulate") == 0);
}

TEST_CASE("seed flag overrides the config seed") {
  const auto a = fresh("seed_a"), b = fresh("seed_b"), c = fresh("seed_c");
  const std::string cfg = "--config " + (kData / "interacting.json").string();
  REQUIRE(run_cli(cfg + " --out " + a.string() + " simulate") == 0);
  REQUIRE(run_cli(cfg + " --out " + b.string() + " --seed 11 simulate") == 0);
  REQUIRE(run_cli(cfg + " --out " + c.string() + " --seed 12 simulate") == 0);
  CHECK(slurp(a / "estimation.csv") == slurp(b / "estimation.csv"));
  CHECK(slurp(a / "estimation.csv") != slurp(c / "estimation.csv"));
}

TEST_CASE("format flag") {
  const auto dir = fresh("format");
  REQUIRE(run_cli("--config " + (kData / "interacting.json").string() + " --out " + dir.string() +
                  " --format json compare") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "baselines.json"));
  CHECK(j[0]["Q1"].get<double>() == doctest::Approx(27.0));
  CHECK(j[0]["Q2"].get<double>() == doctest::Approx(3.0));
  REQUIRE(run_cli("--config " + (kData / "interacting.json").string() + " --out " + dir.string() +
                  " --format csv compile") == 0);
  CHECK(fs::exists(dir / "protocol.csv"));
}

TEST_CASE("bench summary respects the bias bound") {
  const auto dir = fresh("bench");
  REQUIRE(run_cli("--config " + (kData / "interacting.json").string() + " --out " + dir.string() +
                  " reshape-bench") == 0);
  std::istringstream in(slurp(dir / "bench_summary.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "L,bias_norm,mean_X,var_X,bound_2l2t2_over_L");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string l, bias, mean, var, bound;
    std::getline(cells, l, ',');
    std::getline(cells, bias, ',');
    std::getline(cells, mean, ',');
    std::getline(cells, var, ',');
    std::getline(cells, bound, ',');
    CHECK(std::stod(bias) <= std::stod(bound));
    ++rows;
  }
  CHECK(rows == 2);
  std::istringstream trials(slurp(dir / "bench_trials.csv"));
  std::getline(trials, line);
  CHECK(line == "n,lambda,t,L,trial,X");
}
