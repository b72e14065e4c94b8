#include "qsn/config.hpp"
#include "qsn/dynamics.hpp"
#include "qsn/error.hpp"
#include "qsn/estimation.hpp"
#include "qsn/l1_solver.hpp"
#include "qsn/protocol.hpp"
#include "qsn/serialize.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kMath = 3, kResource = 4 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

struct Context {
  qsn::ExperimentConfig cfg;
  fs::path dir;
  std::string format;  // empty: command default
  std::optional<std::uint64_t> seed;

  std::uint64_t require_seed() const {
    if (!seed) throw qsn::InvalidInput("no seed: pass --seed or set trotter.seed in the config");
    return *seed;
  }
  bool csv(bool default_csv) const { return format.empty() ? default_csv : format == "csv"; }
};

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << bytes;
  fmt::print("wrote {}\n", path.string());
}

void write_table(const Context& ctx, const std::string& stem, const qsn::Table& table) {
  if (ctx.csv(true)) write_file(ctx.dir / (stem + ".csv"), table.to_csv());
  else write_file(ctx.dir / (stem + ".json"), table.to_json());
}

struct Solved {
  qsn::L1Solution sol;
  json report;
};

Solved solve_config(const qsn::ExperimentConfig& cfg) {
  Solved s;
  if (cfg.is_bosonic()) {
    const qsn::BosonicProblem bp{cfg.bosonic->m, cfg.bosonic->photons, cfg.alpha, cfg.t};
    const auto bm = qsn::bosonic_matrix(bp.m, bp.photons);
    s.sol = qsn::solve_l1(qsn::bosonic_l1_problem(bp));
    const double closed = qsn::closed_form_bosonic(cfg.alpha, bp.photons, cfg.t);
    s.report = {{"kind", "bosonic"},
                {"m", bp.m},
                {"P", bp.photons},
                {"solution", qsn::solution_json(s.sol, bm.tuples)}};
    s.report["closed_form"] = {
        {"kind", "bosonic"},
        {"bound", closed},
        {"status", std::abs(closed - s.sol.bound) <= 1e-9 * std::max(1.0, closed) ? "matched"
                                                                                  : "mismatch"}};
    return s;
  }
  const auto gens = qsn::config_generators(cfg);
  s.sol = qsn::solve_l1(qsn::L1Problem::from_generators(gens, cfg.alpha, cfg.t));
  s.report = {{"kind", "qubit"},
              {"n", cfg.n},
              {"generators", cfg.generators},
              {"solution", qsn::solution_json(s.sol, cfg.n)}};
  if (gens.is_independent()) {
    const double closed = qsn::closed_form_independent(cfg.alpha, cfg.t);
    s.report["closed_form"] = {
        {"kind", "independent"},
        {"bound", closed},
        {"status", std::abs(closed - s.sol.bound) <= 1e-9 * std::max(1.0, closed) ? "matched"
                                                                                  : "mismatch"}};
  } else {
    s.report["closed_form"] = {{"kind", "none"}, {"status", "not_applicable"}};
  }
  return s;
}

qsn::Protocol compile_config(const qsn::ExperimentConfig& cfg, const qsn::L1Solution& sol) {
  if (cfg.is_bosonic()) throw qsn::InvalidInput("protocols are compiled for qubit configs only");
  return qsn::compile(sol, cfg.t, cfg.n);
}

void cmd_bound(const Context& ctx) {
  const auto s = solve_config(ctx.cfg);
  if (ctx.csv(false)) {
    qsn::Table t{{"x", "a"}, {}};
    for (const auto& e : s.report["solution"]["a"]) t.rows.push_back({e["x"], e["a"]});
    write_file(ctx.dir / "bound.csv", t.to_csv());
  } else {
    write_file(ctx.dir / "bound.json", s.report.dump(2) + "\n");
  }
}

void cmd_compile(const Context& ctx) {
  const auto s = solve_config(ctx.cfg);
  const auto proto = compile_config(ctx.cfg, s.sol);
  const json j = qsn::protocol_json(proto);
  if (ctx.csv(false)) {
    qsn::Table t{{"time", "branch", "from", "to"}, {}};
    for (const auto& e : j["events"]) t.rows.push_back({e["time"], e["branch"], e["from"], e["to"]});
    write_file(ctx.dir / "protocol.csv", t.to_csv());
  } else {
    write_file(ctx.dir / "protocol.json", j.dump(2) + "\n");
  }
}

void cmd_simulate(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.estimation) throw qsn::InvalidInput("config field 'estimation': required for simulate");
  const std::uint64_t seed = ctx.require_seed();
  const auto s = solve_config(cfg);
  const auto proto = compile_config(cfg, s.sol);
  const auto h0 = qsn::config_hamiltonian(cfg);
  double q_true = 0.0;
  for (std::size_t j = 0; j < cfg.alpha.size(); ++j) q_true += cfg.alpha[j] * (*cfg.theta)[j];
  const std::string id = qsn::fnv1a_hex(qsn::protocol_json(proto).dump());

  qsn::EstimationRun run{proto,           h0,   q_true,           cfg.estimation->nu,
                         cfg.estimation->repetitions, seed, qsn::Mode::ideal, 0, 0.2,
                         cfg.dense_limit};
  qsn::Table t{{"protocol_id", "mode", "L", "nu", "q_true", "q_est_mean", "q_est_var", "crb",
                "ratio"},
               {}};
  auto add = [&](const qsn::EstimationResult& r, int steps) {
    t.rows.push_back({id, qsn::to_string(run.mode), steps, r.shots, r.q_true, r.q_est,
                      r.variance, r.crb, r.ratio});
  };
  add(qsn::estimate(run), 0);
  if (cfg.trotter) {
    qsn::check_dense(cfg.n, cfg.dense_limit);
    run.mode = qsn::Mode::reshaped;
    for (int steps : cfg.trotter->steps) {
      run.steps = steps;
      add(qsn::estimate(run), steps);
    }
  }
  write_table(ctx, "estimation", t);
}

void cmd_reshape_bench(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.trotter || cfg.trotter->steps.empty()) {
    throw qsn::InvalidInput("config field 'trotter.L_grid': empty step grid");
  }
  const std::uint64_t seed = ctx.require_seed();
  qsn::check_dense(cfg.n, std::min(cfg.dense_limit, qsn::kExpectedMapLimit));
  const auto h0 = qsn::config_hamiltonian(cfg);
  const auto res = qsn::bench_reshaping(h0, cfg.t, cfg.trotter->steps, cfg.trotter->trials, seed);

  qsn::Table trials{{"n", "lambda", "t", "L", "trial", "X"}, {}};
  qsn::Table summary{{"L", "bias_norm", "mean_X", "var_X", "bound_2l2t2_over_L"}, {}};
  for (const auto& row : res.rows) {
    for (std::size_t k = 0; k < row.samples.size(); ++k) {
      trials.rows.push_back({res.n, res.lambda, res.t, row.steps, k, row.samples[k]});
    }
    summary.rows.push_back({row.steps, row.bias_norm, row.mean, row.variance, row.bias_bound});
  }
  write_table(ctx, "bench_trials", trials);
  write_table(ctx, "bench_summary", summary);
}

void cmd_compare(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.is_bosonic()) throw qsn::InvalidInput("compare needs a qubit config");
  if (!cfg.estimation) throw qsn::InvalidInput("config field 'estimation': required for compare");
  const auto s = solve_config(cfg);
  const auto r = qsn::baselines(cfg.alpha, cfg.n, cfg.t, cfg.estimation->nu, s.sol.l1);
  std::string alpha_text;
  for (double a : cfg.alpha) alpha_text += fmt::format("{},", a);
  qsn::Table t{{"n", "alpha_hash", "Q1", "Q2", "var_local", "var_entangled"}, {}};
  t.rows.push_back({cfg.n, qsn::fnv1a_hex(alpha_text), r.q1, r.q2, r.var_local, r.var_entangled});
  write_table(ctx, "baselines", t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal linear-function sensing with stabilizer-reshaped dynamics"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed_value = 0;
  app.add_option("--config", opt.config, "Experiment config (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed (overrides trotter.seed)");
  app.add_option("--out", opt.out, "Output directory (overrides output.dir)");
  app.add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  using Command = void (*)(const Context&);
  std::vector<std::pair<CLI::App*, Command>> commands{
      {app.add_subcommand("bound", "Solve the l1 program and report the bound"), cmd_bound},
      {app.add_subcommand("compile", "Compile the optimal protocol schedule"), cmd_compile},
      {app.add_subcommand("simulate", "Monte Carlo estimation (ideal and reshaped)"),
       cmd_simulate},
      {app.add_subcommand("reshape-bench", "Reshaping bias and concentration benchmark"),
       cmd_reshape_bench},
      {app.add_subcommand("compare", "Baseline protocol comparison"), cmd_compare},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (seed_opt->count() > 0) opt.seed = seed_value;

  try {
    Context ctx;
    ctx.cfg = qsn::load_config(opt.config);
    ctx.dir = opt.out.empty() ? fs::path(ctx.cfg.output.dir) : fs::path(opt.out);
    ctx.format = opt.format.empty() ? ctx.cfg.output.format : opt.format;
    ctx.seed = opt.seed ? opt.seed : ctx.cfg.seed();
    fs::create_directories(ctx.dir);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) run(ctx);
    }
    return kOk;
  } catch (const qsn::SizeExceeded& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kResource;
  } catch (const qsn::MathError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kMath;
  } catch (const qsn::InvalidInput& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
