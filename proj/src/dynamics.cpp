#include "qsn/dynamics.hpp"

#include "qsn/error.hpp"
#include "qsn/rng.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numeric>

namespace qsn {

namespace {

using cd = std::complex<double>;

Eigen::VectorXd sign_vector(int n, std::uint64_t mask) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXd s(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    s(x) = bit_parity(mask & static_cast<std::uint64_t>(x)) ? -1.0 : 1.0;
  }
  return s;
}

Eigen::MatrixXcd average_conjugations(const Eigen::MatrixXcd& u, int n) {
  const std::uint64_t count = std::uint64_t{1} << n;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
  for (std::uint64_t m = 0; m < count; ++m) {
    const Eigen::VectorXd s = sign_vector(n, m);
    acc += s.asDiagonal() * u * s.asDiagonal();
  }
  return acc / static_cast<double>(count);
}

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, int e) {
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

std::uint64_t trial_seed(std::uint64_t seed, int steps, int trial) {
  return CounterRng(seed)
      .substream(static_cast<std::uint64_t>(steps))
      .at(static_cast<std::uint64_t>(trial));
}

template <class Evolve>
StateVector run_schedule(const Protocol& proto, int dense_limit, Evolve&& evolve) {
  StateVector psi = initial_state(proto, dense_limit);
  auto [plus_label, minus_label] = proto.init();
  double now = 0.0;
  for (const auto& ev : proto.events) {
    evolve(psi, ev.time - now);
    now = ev.time;
    apply_event(psi, ev, plus_label, minus_label, proto.n);
  }
  evolve(psi, proto.t - now);
  return psi;
}

}  // namespace

HermitianPropagator::HermitianPropagator(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

Eigen::MatrixXcd HermitianPropagator::unitary(double dt) const {
  const Eigen::VectorXcd phases =
      (evals_.cast<cd>() * cd(0.0, -dt)).array().exp().matrix();
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

void HermitianPropagator::apply(StateVector& psi, double dt) const {
  const Eigen::VectorXcd phases =
      (evals_.cast<cd>() * cd(0.0, -dt)).array().exp().matrix();
  StateVector coeffs = evecs_.adjoint() * psi;
  coeffs = coeffs.cwiseProduct(phases);
  psi = evecs_ * coeffs;
}

double HermitianPropagator::spectral_norm() const {
  return evals_.size() ? evals_.cwiseAbs().maxCoeff() : 0.0;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

StateVector BranchState::to_state(int n, int dense_limit) const {
  check_dense(n, dense_limit);
  StateVector psi = StateVector::Zero(Eigen::Index{1} << n);
  const double r = 1.0 / std::sqrt(2.0);
  psi(static_cast<Eigen::Index>(plus_label)) = r * std::polar(1.0, plus_phase);
  psi(static_cast<Eigen::Index>(minus_label)) = r * std::polar(1.0, minus_phase);
  return psi;
}

BranchState run_branch(const Protocol& proto, const DiagonalHamiltonian& h) {
  BranchState s;
  std::tie(s.plus_label, s.minus_label) = proto.init();
  double now = 0.0;
  auto advance = [&](double dt) {
    s.plus_phase -= h.energy(s.plus_label) * dt;
    s.minus_phase -= h.energy(s.minus_label) * dt;
  };
  for (const auto& ev : proto.events) {
    advance(ev.time - now);
    now = ev.time;
    if (ev.plus) {
      if (ev.plus->from != s.plus_label) throw Error("run_branch: plus label mismatch");
      s.plus_label = ev.plus->to;
    }
    if (ev.minus) {
      if (ev.minus->from != s.minus_label) throw Error("run_branch: minus label mismatch");
      s.minus_label = ev.minus->to;
    }
    if (s.plus_label == s.minus_label) {
      throw Error(fmt::format("run_branch: branch labels collided at t={}", ev.time));
    }
  }
  advance(proto.t - now);
  return s;
}

StateVector initial_state(const Protocol& proto, int dense_limit) {
  check_dense(proto.n, dense_limit);
  StateVector psi = StateVector::Zero(Eigen::Index{1} << proto.n);
  const auto [x, y] = proto.init();
  psi(static_cast<Eigen::Index>(x)) = 1.0 / std::sqrt(2.0);
  psi(static_cast<Eigen::Index>(y)) = 1.0 / std::sqrt(2.0);
  return psi;
}

void apply_switch(StateVector& psi, const SwitchDecomposition& sw) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  for (const auto& g : sw.gates) {
    const std::uint64_t cbit = std::uint64_t{1} << g.control;
    const std::uint64_t tbit = std::uint64_t{1} << g.target;
    const std::uint64_t want = g.control_value ? cbit : 0;
    for (std::uint64_t x = 0; x < dim; ++x) {
      if ((x & tbit) || (x & cbit) != want) continue;
      std::swap(psi(static_cast<Eigen::Index>(x)), psi(static_cast<Eigen::Index>(x | tbit)));
    }
  }
}

void apply_event(StateVector& psi, const SwitchEvent& ev, BasisLabel& plus_label,
                 BasisLabel& minus_label, int n) {
  if (ev.plus) {
    apply_switch(psi, decompose_switch(ev.plus->from, ev.plus->to, minus_label, n));
    plus_label = ev.plus->to;
  }
  if (ev.minus) {
    apply_switch(psi, decompose_switch(ev.minus->from, ev.minus->to, plus_label, n));
    minus_label = ev.minus->to;
  }
}

StateVector run_dense(const Protocol& proto, const InteractingHamiltonian& h,
                      int dense_limit) {
  if (h.n() != proto.n) throw InvalidInput("Hamiltonian and protocol qubit counts differ");
  const HermitianPropagator prop(dense_matrix(h, dense_limit));
  return run_schedule(proto, dense_limit,
                      [&](StateVector& psi, double dt) { prop.apply(psi, dt); });
}

StateVector run_dense(const Protocol& proto, const DiagonalHamiltonian& h, int dense_limit) {
  if (h.n() != proto.n) throw InvalidInput("Hamiltonian and protocol qubit counts differ");
  const Eigen::VectorXd e = h.energies(dense_limit);
  return run_schedule(proto, dense_limit, [&](StateVector& psi, double dt) {
    for (Eigen::Index x = 0; x < psi.size(); ++x) psi(x) *= std::polar(1.0, -e(x) * dt);
  });
}

Eigen::MatrixXcd conjugate_by(const Eigen::MatrixXcd& u, const ZString& s) {
  const Eigen::VectorXd signs = sign_vector(s.n(), s.mask());
  return signs.asDiagonal() * u * signs.asDiagonal();
}

Eigen::MatrixXcd trotter_step_unitary(const InteractingHamiltonian& h0, double dt,
                                      const ZString& s, int dense_limit) {
  const HermitianPropagator prop(dense_matrix(h0, dense_limit));
  return conjugate_by(prop.unitary(dt), s);
}

ZString sample_stabilizer(int n, std::uint64_t seed, std::uint64_t step) {
  const std::uint64_t mask = CounterRng(seed).at(step) & ((std::uint64_t{1} << n) - 1);
  return ZString(n, mask);
}

std::vector<ZString> sample_trajectory(int n, int steps, std::uint64_t seed) {
  std::vector<ZString> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) out.push_back(sample_stabilizer(n, seed, static_cast<std::uint64_t>(k)));
  return out;
}

TrotterRun make_trotter_run(const InteractingHamiltonian& h0, double t, int steps,
                            std::uint64_t seed) {
  if (steps < 1) throw InvalidInput("step count must be positive");
  return TrotterRun{h0, t, steps, seed, sample_trajectory(h0.n(), steps, seed)};
}

Eigen::MatrixXcd trajectory_unitary(const TrotterRun& run, int dense_limit) {
  const HermitianPropagator prop(dense_matrix(run.h0, dense_limit));
  const Eigen::MatrixXcd u = prop.unitary(run.t / run.steps);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  for (const auto& s : run.sampled) {
    const Eigen::VectorXd signs = sign_vector(s.n(), s.mask());
    p = signs.asDiagonal() * (u * (signs.asDiagonal() * p));
  }
  return p;
}

ReshapedRun run_reshaped(const Protocol& proto, const InteractingHamiltonian& h0, int steps,
                         std::uint64_t seed, int dense_limit) {
  if (h0.n() != proto.n) throw InvalidInput("Hamiltonian and protocol qubit counts differ");
  if (steps < 1) throw InvalidInput("step count must be positive");
  check_dense(proto.n, dense_limit);
  const double dt = proto.t / steps;

  double prev = 0.0;
  for (const auto& ev : proto.events) {
    if (ev.time - prev < dt * (1.0 - 1e-9)) {
      throw StepTooCoarse(fmt::format(
          "segment of length {} is shorter than the step t/L = {}", ev.time - prev, dt));
    }
    prev = ev.time;
  }
  if (proto.t - prev < dt * (1.0 - 1e-9)) {
    throw StepTooCoarse(fmt::format(
        "final segment of length {} is shorter than the step t/L = {}", proto.t - prev, dt));
  }

  ReshapedRun out;
  std::vector<long> event_step;
  for (const auto& ev : proto.events) {
    const long k = std::lround(ev.time / dt);
    event_step.push_back(k);
    out.snapped_times.push_back(static_cast<double>(k) * dt);
    out.max_time_shift = std::max(out.max_time_shift, std::abs(out.snapped_times.back() - ev.time));
  }

  const HermitianPropagator prop(dense_matrix(h0, dense_limit));
  const Eigen::MatrixXcd u = prop.unitary(dt);
  StateVector psi = initial_state(proto, dense_limit);
  auto [plus_label, minus_label] = proto.init();
  std::size_t next = 0;
  const std::uint64_t full = (std::uint64_t{1} << proto.n) - 1;
  const CounterRng rng(seed);
  for (long k = 0; k < steps; ++k) {
    while (next < proto.events.size() && event_step[next] == k) {
      apply_event(psi, proto.events[next], plus_label, minus_label, proto.n);
      ++next;
    }
    const Eigen::VectorXd signs = sign_vector(proto.n, rng.at(static_cast<std::uint64_t>(k)) & full);
    psi = signs.asDiagonal() * (u * (signs.asDiagonal() * psi));
  }
  while (next < proto.events.size()) {
    apply_event(psi, proto.events[next], plus_label, minus_label, proto.n);
    ++next;
  }
  out.state = std::move(psi);
  return out;
}

Eigen::MatrixXcd expected_step_map(const InteractingHamiltonian& h0, double dt) {
  check_dense(h0.n(), kExpectedMapLimit);
  const HermitianPropagator prop(dense_matrix(h0));
  return average_conjugations(prop.unitary(dt), h0.n());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs two points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ReshapeBenchResult bench_reshaping(const InteractingHamiltonian& h0, double t,
                                   const std::vector<int>& steps_grid, int trials,
                                   std::uint64_t seed) {
  check_dense(h0.n(), kExpectedMapLimit);
  if (steps_grid.empty()) throw InvalidInput("empty step grid");
  if (trials < 2) throw InvalidInput("at least two trials are needed per grid point");

  ReshapeBenchResult res;
  res.n = h0.n();
  res.t = t;
  const HermitianPropagator prop(dense_matrix(h0));
  res.lambda = prop.spectral_norm();
  res.lambda_triangle = h0.coefficient_norm();

  const Eigen::VectorXd heff = project_effective(h0).energies();
  const Eigen::VectorXcd ideal_diag =
      (heff.cast<cd>() * cd(0.0, -t)).array().exp().matrix();
  const Eigen::MatrixXcd ideal = ideal_diag.asDiagonal();

  std::vector<double> xs, means, vars;
  for (int steps : steps_grid) {
    if (steps < 1) throw InvalidInput("step counts must be positive");
    ReshapeBenchRow row;
    row.steps = steps;
    const Eigen::MatrixXcd u = prop.unitary(t / steps);
    const Eigen::MatrixXcd ev_l = matrix_power(average_conjugations(u, h0.n()), steps);
    row.bias_norm = spectral_norm(ideal - ev_l);
    row.bias_bound = 2.0 * res.lambda * res.lambda * t * t / steps;

    for (int trial = 0; trial < trials; ++trial) {
      const CounterRng rng(trial_seed(seed, steps, trial));
      const std::uint64_t full = (std::uint64_t{1} << h0.n()) - 1;
      Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
      for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd signs =
            sign_vector(h0.n(), rng.at(static_cast<std::uint64_t>(k)) & full);
        p = signs.asDiagonal() * (u * (signs.asDiagonal() * p));
      }
      row.samples.push_back(spectral_norm(p - ev_l));
    }
    const double k = static_cast<double>(row.samples.size());
    row.mean = std::accumulate(row.samples.begin(), row.samples.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : row.samples) ss += (v - row.mean) * (v - row.mean);
    row.variance = ss / (k - 1.0);
    xs.push_back(steps);
    means.push_back(row.mean);
    vars.push_back(row.variance);
    res.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) {
    res.mean_slope = loglog_slope(xs, means);
    res.var_slope = loglog_slope(xs, vars);
  }
  return res;
}

}  // namespace qsn
