#include "qsn/protocol.hpp"

#include "qsn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>

namespace qsn {

namespace {

// Descending |a_x|, then ascending label.
void order_support(std::vector<SparseEntry>& v) {
  std::sort(v.begin(), v.end(), [](const SparseEntry& a, const SparseEntry& b) {
    const double ma = std::abs(a.v), mb = std::abs(b.v);
    if (ma != mb) return ma > mb;
    return a.x < b.x;
  });
}

std::vector<double> switch_times(const std::vector<Segment>& segs) {
  std::vector<double> times;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    acc += segs[i].duration;
    times.push_back(acc);
  }
  return times;
}

}  // namespace

std::vector<SparseEntry> Protocol::weights() const {
  std::vector<SparseEntry> w;
  for (const auto& s : plus) w.push_back({s.label, l1 * s.duration / (2.0 * t)});
  for (const auto& s : minus) w.push_back({s.label, -l1 * s.duration / (2.0 * t)});
  std::sort(w.begin(), w.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.x < b.x; });
  return w;
}

Protocol compile(const L1Solution& sol, double t, int n) {
  if (!(t > 0.0)) throw InvalidInput("evolution time must be positive");
  if (sol.a.empty() || !(sol.l1 > 0.0)) {
    throw DegenerateSolution("solution vector is zero; nothing to compile");
  }
  std::vector<SparseEntry> pos, neg;
  for (const auto& e : sol.a) {
    if (e.v > 0) pos.push_back(e);
    else if (e.v < 0) neg.push_back(e);
  }
  if (pos.empty() || neg.empty()) {
    throw DegenerateSolution("solution lacks a positive or a negative support");
  }
  order_support(pos);
  order_support(neg);

  Protocol p;
  p.n = n;
  p.t = t;
  p.l1 = sol.l1;
  for (const auto& e : pos) p.plus.push_back({e.x, 2.0 * t * e.v / sol.l1});
  for (const auto& e : neg) p.minus.push_back({e.x, 2.0 * t * -e.v / sol.l1});

  // Merge the two switch sequences; coincident times share one event.
  const auto tp = switch_times(p.plus);
  const auto tm = switch_times(p.minus);
  const double tie = 1e-12 * t;
  std::size_t i = 0, j = 0;
  while (i < tp.size() || j < tm.size()) {
    SwitchEvent ev;
    const bool take_plus = j == tm.size() || (i < tp.size() && tp[i] <= tm[j] + tie);
    const bool take_minus = i == tp.size() || (j < tm.size() && tm[j] <= tp[i] + tie);
    if (take_plus) {
      ev.time = tp[i];
      ev.plus = BranchUpdate{p.plus[i].label, p.plus[i + 1].label};
      ++i;
    }
    if (take_minus) {
      if (!take_plus) ev.time = tm[j];
      ev.minus = BranchUpdate{p.minus[j].label, p.minus[j + 1].label};
      ++j;
    }
    p.events.push_back(ev);
  }
  return p;
}

Protocol Protocol::from_schedule(int n, double t, double l1,
                                 std::pair<BasisLabel, BasisLabel> init,
                                 std::vector<SwitchEvent> events) {
  Protocol p;
  p.n = n;
  p.t = t;
  p.l1 = l1;
  double last_plus = 0.0, last_minus = 0.0;
  BasisLabel cur_plus = init.first, cur_minus = init.second;
  for (const auto& ev : events) {
    if (ev.plus) {
      if (ev.plus->from != cur_plus) throw InvalidInput("schedule: plus branch label mismatch");
      p.plus.push_back({cur_plus, ev.time - last_plus});
      last_plus = ev.time;
      cur_plus = ev.plus->to;
    }
    if (ev.minus) {
      if (ev.minus->from != cur_minus) throw InvalidInput("schedule: minus branch label mismatch");
      p.minus.push_back({cur_minus, ev.time - last_minus});
      last_minus = ev.time;
      cur_minus = ev.minus->to;
    }
  }
  p.plus.push_back({cur_plus, t - last_plus});
  p.minus.push_back({cur_minus, t - last_minus});
  p.events = std::move(events);
  return p;
}

double predict_phase(const Protocol& proto, const DiagonalHamiltonian& h) {
  double acc = 0.0;
  for (const auto& w : proto.weights()) acc += w.v * h.energy(w.x);
  return 2.0 * proto.t / proto.l1 * acc;
}

SwitchDecomposition decompose_switch(BasisLabel from, BasisLabel to, BasisLabel other,
                                     int n) {
  if (from == other || to == other) {
    throw InvalidInput("switch endpoints must differ from the other branch label");
  }
  SwitchDecomposition out;
  const BasisLabel flips = from ^ to;
  if (flips == 0) return out;
  const BasisLabel distinguish = from ^ other;

  auto bits = [n](BasisLabel v) {
    std::vector<int> r;
    for (int q = 0; q < n; ++q) {
      if ((v >> q) & 1u) r.push_back(q);
    }
    return r;
  };
  auto flip_all = [&](int control, BasisLabel current, BasisLabel targets) {
    for (int q : bits(targets)) {
      out.gates.push_back({control, static_cast<bool>((current >> control) & 1u), q});
    }
  };

  // A distinguishing qubit that stays put can control every flip.
  const BasisLabel steady = distinguish & ~flips;
  if (steady != 0) {
    flip_all(std::countr_zero(steady), from, flips);
    return out;
  }
  // Every distinguishing qubit flips (to agrees with other there), so some
  // flipped qubit outside them must exist. Flip those first, then use one
  // of them as the control for the rest.
  const BasisLabel outside = flips & ~distinguish;
  if (distinguish == 0 || outside == 0) {
    throw Error("decompose_switch: no distinguishing qubit");
  }
  const int first_control = std::countr_zero(distinguish);
  flip_all(first_control, from, outside);
  const BasisLabel mid = from ^ outside;
  flip_all(std::countr_zero(outside), mid, flips & distinguish);
  return out;
}

double MeasurementObservable::expectation(double phi) { return std::sin(phi); }
double MeasurementObservable::variance(double phi) {
  const double c = std::cos(phi);
  return c * c;
}
double MeasurementObservable::prob_plus(double phi) { return 0.5 * (1.0 + std::sin(phi)); }

Eigen::MatrixXcd MeasurementObservable::dense(int n, int dense_limit) const {
  check_dense(n, dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(dim, dim);
  const std::complex<double> i(0.0, 1.0);
  o(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = -i;
  o(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = i;
  return o;
}

MeasurementObservable measurement_observable(const Protocol& proto) {
  const auto [x, y] = proto.final_pair();
  return {x, y};
}

}  // namespace qsn
