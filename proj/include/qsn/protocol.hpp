#pragma once

#include "qsn/l1_solver.hpp"
#include "qsn/pauli.hpp"

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace qsn {

enum class Branch { plus, minus };

// One dwell period of a branch on a basis label.
struct Segment {
  BasisLabel label = 0;
  double duration = 0.0;
};

struct BranchUpdate {
  BasisLabel from = 0;
  BasisLabel to = 0;
  friend bool operator==(const BranchUpdate&, const BranchUpdate&) = default;
};

// Switches happening at one instant. When both branches switch together the
// plus update is applied first.
struct SwitchEvent {
  double time = 0.0;
  std::optional<BranchUpdate> plus;
  std::optional<BranchUpdate> minus;
};

// Compiled two-branch schedule. The plus branch walks the positive support
// of a, the minus branch the negative support; each dwells 2t|a_x|/||a||_1 on
// label x so both branches evolve for exactly t.
struct Protocol {
  int n = 0;
  double t = 0.0;
  double l1 = 0.0;
  std::vector<Segment> plus;
  std::vector<Segment> minus;
  std::vector<SwitchEvent> events;

  std::pair<BasisLabel, BasisLabel> init() const {
    return {plus.front().label, minus.front().label};
  }
  std::pair<BasisLabel, BasisLabel> final_pair() const {
    return {plus.back().label, minus.back().label};
  }
  int rounds() const { return static_cast<int>(plus.size() + minus.size()); }

  // Signed weights a_x implied by the dwell times.
  std::vector<SparseEntry> weights() const;

  // Rebuilds segments from the initial pair and the event list (used when
  // loading a serialized schedule).
  static Protocol from_schedule(int n, double t, double l1,
                                std::pair<BasisLabel, BasisLabel> init,
                                std::vector<SwitchEvent> events);
};

Protocol compile(const L1Solution& sol, double t, int n);

// phi = (2t/||a||_1) sum_x a_x E(x) for the energies of h.
double predict_phase(const Protocol& proto, const DiagonalHamiltonian& h);

// Controlled bit flip: flip `target` when qubit `control` equals
// `control_value` (CNOT for 1, CNOT0 for 0).
struct ControlledFlip {
  int control = 0;
  bool control_value = true;
  int target = 0;

  BasisLabel apply(BasisLabel x) const {
    return (((x >> control) & 1u) == static_cast<BasisLabel>(control_value))
               ? x ^ (BasisLabel{1} << target)
               : x;
  }
};

struct SwitchDecomposition {
  std::vector<ControlledFlip> gates;

  BasisLabel apply(BasisLabel x) const {
    for (const auto& g : gates) x = g.apply(x);
    return x;
  }
};

// Gates mapping |from> to |to> while fixing |other>. Requires
// from != other and to != other.
SwitchDecomposition decompose_switch(BasisLabel from, BasisLabel to, BasisLabel other,
                                     int n);

// O = -i(|x><y| - |y><x|) on the final pair (x plus, y minus).
struct MeasurementObservable {
  BasisLabel x = 0;
  BasisLabel y = 0;

  static double expectation(double phi);
  static double variance(double phi);
  static double prob_plus(double phi);
  Eigen::MatrixXcd dense(int n, int dense_limit = kDefaultDenseLimit) const;
};

MeasurementObservable measurement_observable(const Protocol& proto);

}  // namespace qsn
