#include "qsn/estimation.hpp"

#include "qsn/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

namespace qsn {

namespace {

using cd = std::complex<double>;

constexpr double kClamp = 1.0 - 1e-12;

InteractingHamiltonian to_interacting(const DiagonalHamiltonian& h) {
  std::vector<double> theta(static_cast<std::size_t>(h.n()), 0.0);
  std::vector<PauliTerm> rest;
  for (const auto& t : h.terms()) {
    if (std::popcount(t.op.mask()) == 1) {
      theta[static_cast<std::size_t>(std::countr_zero(t.op.mask()))] += t.coeff;
    } else {
      rest.push_back({PauliString(t.op), t.coeff});
    }
  }
  return InteractingHamiltonian(h.n(), std::move(theta), std::move(rest));
}

std::uint64_t trajectory_seed(std::uint64_t seed, int rep) {
  return CounterRng(seed).substream(0x7472616aULL).at(static_cast<std::uint64_t>(rep));
}

void summarize(EstimationResult& r) {
  const double k = static_cast<double>(r.samples.size());
  r.repetitions = static_cast<int>(r.samples.size());
  r.q_est = std::accumulate(r.samples.begin(), r.samples.end(), 0.0) / k;
  double ss = 0.0, sq = 0.0;
  for (double v : r.samples) {
    ss += (v - r.q_est) * (v - r.q_est);
    sq += (v - r.q_true) * (v - r.q_true);
  }
  r.variance = k > 1 ? ss / (k - 1.0) : 0.0;
  r.se = std::sqrt(r.variance / k);
  r.mse = sq / k;
  r.ratio = r.mse / r.crb;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::ideal ? "ideal" : "reshaped"; }

OutcomeProbabilities OutcomeProbabilities::from_phase(double phi) {
  const double s = std::sin(phi);
  return {0.5 * (1.0 + s), 0.5 * (1.0 - s)};
}

OutcomeProbabilities OutcomeProbabilities::from_state(const StateVector& psi,
                                                      const MeasurementObservable& obs) {
  // Eigenvectors of O: (|x> +- i|y>)/sqrt(2) with eigenvalues +-1.
  const cd px = psi(static_cast<Eigen::Index>(obs.x));
  const cd py = psi(static_cast<Eigen::Index>(obs.y));
  const cd i(0.0, 1.0);
  const double plus = 0.5 * std::norm(px - i * py);
  const double minus = 0.5 * std::norm(px + i * py);
  const double leak = std::max(0.0, psi.squaredNorm() - plus - minus);
  return {plus + 0.5 * leak, minus + 0.5 * leak};
}

ShotCounts sample_shots(const OutcomeProbabilities& p, long shots, const CounterRng& stream) {
  ShotCounts c;
  const double cut = p.plus / (p.plus + p.minus);
  for (long s = 0; s < shots; ++s) {
    if (stream.uniform(static_cast<std::uint64_t>(s)) < cut) ++c.plus;
    else ++c.minus;
  }
  return c;
}

double invert_readout(double sample_mean, double l1, double t) {
  if (std::abs(sample_mean) >= kClamp) {
    throw SignalOutOfRange(fmt::format(
        "sample mean {} saturates the readout; the phase is ambiguous", sample_mean));
  }
  return l1 / (2.0 * t) * std::asin(sample_mean);
}

EstimationResult estimate(const EstimationRun& run) {
  const Protocol& proto = run.protocol;
  if (run.shots < 1 || run.repetitions < 1) {
    throw InvalidInput("shots and repetitions must be positive");
  }
  const double phi_true = 2.0 * proto.t * run.q_true / proto.l1;
  if (std::abs(phi_true) >= std::numbers::pi / 2 - run.margin) {
    throw SignalOutOfRange(fmt::format(
        "predicted phase {} is outside the small-signal window (margin {})", phi_true,
        run.margin));
  }

  EstimationResult res;
  res.q_true = run.q_true;
  res.shots = run.shots;
  res.crb = proto.l1 * proto.l1 / (4.0 * static_cast<double>(run.shots) * proto.t * proto.t);

  const CounterRng root(run.seed);
  if (run.mode == Mode::ideal) {
    const DiagonalHamiltonian hd =
        std::holds_alternative<DiagonalHamiltonian>(run.hamiltonian)
            ? std::get<DiagonalHamiltonian>(run.hamiltonian)
            : project_effective(std::get<InteractingHamiltonian>(run.hamiltonian));
    const auto probs = OutcomeProbabilities::from_phase(run_branch(proto, hd).relative_phase());
    for (int r = 0; r < run.repetitions; ++r) {
      const auto counts =
          sample_shots(probs, run.shots, root.substream(static_cast<std::uint64_t>(r)));
      res.samples.push_back(invert_readout(counts.mean(), proto.l1, proto.t));
    }
  } else {
    const InteractingHamiltonian h0 =
        std::holds_alternative<InteractingHamiltonian>(run.hamiltonian)
            ? std::get<InteractingHamiltonian>(run.hamiltonian)
            : to_interacting(std::get<DiagonalHamiltonian>(run.hamiltonian));
    const auto obs = measurement_observable(proto);
    for (int r = 0; r < run.repetitions; ++r) {
      const auto traj = run_reshaped(proto, h0, run.steps, trajectory_seed(run.seed, r),
                                     run.dense_limit);
      const auto probs = OutcomeProbabilities::from_state(traj.state, obs);
      const auto counts =
          sample_shots(probs, run.shots, root.substream(static_cast<std::uint64_t>(r)));
      res.samples.push_back(invert_readout(counts.mean(), proto.l1, proto.t));
    }
  }
  summarize(res);
  return res;
}

MseTable mse_vs_L(const Protocol& proto, const InteractingHamiltonian& h0, double q_true,
                  const std::vector<int>& steps_grid, long shots, int repetitions,
                  std::uint64_t seed, int dense_limit) {
  if (steps_grid.empty()) throw InvalidInput("empty step grid");
  check_dense(h0.n(), dense_limit);
  MseTable table;
  EstimationRun run{proto, h0, q_true, shots, repetitions, seed, Mode::ideal, 0, 0.2,
                    dense_limit};
  table.ideal = estimate(run);
  table.lambda = HermitianPropagator(dense_matrix(h0, dense_limit)).spectral_norm();

  run.mode = Mode::reshaped;
  for (int steps : steps_grid) {
    run.steps = steps;
    MseRow row;
    row.steps = steps;
    row.result = estimate(run);
    row.excess = row.result.mse - table.ideal.mse;
    table.rows.push_back(std::move(row));
  }

  std::vector<double> xs, ys;
  double num = 0.0, den = 0.0;
  const double shape = static_cast<double>(proto.n) * proto.rounds() * table.lambda *
                       table.lambda * proto.t * proto.t;
  for (const auto& row : table.rows) {
    if (row.excess > 0) {
      xs.push_back(row.steps);
      ys.push_back(row.excess);
    }
    if (!table.first_subleading && row.excess < 0.2 * table.ideal.mse) {
      table.first_subleading = row.steps;
    }
    const double g = table.ideal.mse * shape / row.steps;
    num += row.excess * g;
    den += g * g;
  }
  if (xs.size() >= 2) table.excess_slope = loglog_slope(xs, ys);
  table.fitted_c = den > 0 ? num / den : 0.0;
  return table;
}

BaselineReport baselines(std::span<const double> alpha, int n, double t, long shots,
                         double l1) {
  if (!(l1 > 0.0)) throw InvalidInput("l1 norm must be positive");
  double a2 = 0.0;
  for (double v : alpha) a2 += v * v;
  const double denom = 4.0 * static_cast<double>(shots) * t * t;
  BaselineReport r;
  const double nn = static_cast<double>(n) * n;
  r.var_local = nn * a2 / denom;
  r.var_entangled = a2 / denom;
  r.q2 = a2 / (l1 * l1);
  r.q1 = nn * r.q2;
  const double tol = 1e-9;
  r.q1_ok = r.q1 >= nn * (1.0 - tol);
  r.q2_ok = r.q2 >= 1.0 - tol;
  return r;
}

namespace {

StateVector product_state(std::span<const double> theta, double t) {
  const int n = static_cast<int>(theta.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  StateVector psi(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index x = 0; x < dim; ++x) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      e += theta[static_cast<std::size_t>(i)] * (((x >> i) & 1) ? -1.0 : 1.0);
    }
    psi(x) = amp * std::polar(1.0, -e * t);
  }
  return psi;
}

}  // namespace

Eigen::MatrixXd product_state_fisher(std::span<const double> theta, double t,
                                     int dense_limit) {
  const int n = static_cast<int>(theta.size());
  check_dense(n, dense_limit);
  const double h = 1e-5;
  const StateVector psi = product_state(theta, t);
  std::vector<StateVector> d;
  std::vector<double> th(theta.begin(), theta.end());
  for (int i = 0; i < n; ++i) {
    auto& v = th[static_cast<std::size_t>(i)];
    const double keep = v;
    v = keep + h;
    const StateVector up = product_state(th, t);
    v = keep - h;
    const StateVector down = product_state(th, t);
    v = keep;
    d.push_back((up - down) / (2.0 * h));
  }
  Eigen::MatrixXd f(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cd term = d[static_cast<std::size_t>(i)].dot(d[static_cast<std::size_t>(j)]) -
                      d[static_cast<std::size_t>(i)].dot(psi) * psi.dot(d[static_cast<std::size_t>(j)]);
      f(i, j) = 4.0 * term.real();
    }
  }
  return f;
}

Baseline2Result verify_baseline2(std::span<const double> alpha, std::span<const double> theta,
                                 double t, long shots, int repetitions, std::uint64_t seed,
                                 int dense_limit) {
  const int n = static_cast<int>(alpha.size());
  if (theta.size() != alpha.size()) throw InvalidInput("alpha and theta lengths differ");
  check_dense(n, dense_limit);
  double a2 = 0.0, q = 0.0;
  for (int i = 0; i < n; ++i) {
    a2 += alpha[static_cast<std::size_t>(i)] * alpha[static_cast<std::size_t>(i)];
    q += alpha[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];
  }
  if (!(a2 > 0)) throw InvalidInput("alpha must be nonzero");
  const double anorm = std::sqrt(a2);

  Baseline2Result r;
  r.q_true = q;
  r.predicted = a2 / (4.0 * static_cast<double>(shots) * t * t);
  r.fisher = product_state_fisher(theta, t, dense_limit);
  const Eigen::Map<const Eigen::VectorXd> av(alpha.data(), n);
  r.fisher_variance = av.dot(r.fisher.ldlt().solve(av)) / static_cast<double>(shots);

  const Eigen::Index dim = Eigen::Index{1} << n;
  StateVector target(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += alpha[static_cast<std::size_t>(i)] * (((x >> i) & 1) ? -1.0 : 1.0);
    target(x) = s / (anorm * std::sqrt(static_cast<double>(dim)));
  }
  r.p_one = std::norm(target.dot(product_state(theta, t)));
  if (static_cast<double>(shots) * r.p_one < 100.0 || repetitions < 2) return r;

  const double sign = q >= 0 ? 1.0 : -1.0;
  std::vector<double> est;
  for (int rep = 0; rep < repetitions; ++rep) {
    std::mt19937_64 gen(CounterRng(seed).at(static_cast<std::uint64_t>(rep)));
    std::binomial_distribution<long> draw(shots, r.p_one);
    const double frac = static_cast<double>(draw(gen)) / static_cast<double>(shots);
    est.push_back(sign * anorm / t * std::asin(std::sqrt(frac)));
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
  double ss = 0.0;
  for (double v : est) ss += (v - mean) * (v - mean);
  r.empirical_variance = ss / (static_cast<double>(est.size()) - 1.0);
  return r;
}

}  // namespace qsn
