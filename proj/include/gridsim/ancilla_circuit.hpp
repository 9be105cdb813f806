// Copyright 2026 The gridsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gridsim/grid_code.hpp"
#include "gridsim/oscillator.hpp"

namespace gridsim {

// Ancilla bookkeeping, fixed once for the whole library:
//   - qubit levels |0> (bright on fluorescence) and |1> (dark),
//   - hybrid amplitudes stored qubit-major: index q * N + n,
//   - the state-dependent force sdf(alpha) applies exp[(alpha/2 a^dag -
//     conj(alpha)/2 a) (x) X] so ancilla X eigenstates |+/-> receive
//     D(+/- alpha/2),
//   - the canonical modular circuit (prepare |1>, sdf(alpha), measure) then
//     implements E_+ = (D(alpha/2) + D(-alpha/2))/2 on the dark branch and
//     E_- on the bright branch.

/// Joint ancilla-qubit (x) oscillator pure state.
struct HybridState {
  Vec amplitudes;  // length 2N, qubit-major
  double probability_weight = 1.0;

  HybridState() = default;
  explicit HybridState(Vec a, double w = 1.0) : amplitudes(std::move(a)), probability_weight(w) {}

  int fock_dim() const { return static_cast<int>(amplitudes.size()) / 2; }
  double norm() const { return amplitudes.norm(); }

  static HybridState product(const Eigen::Vector2cd& qubit, const FockVector& osc,
                             double weight = 1.0) {
    const int n = osc.dim();
    Vec a(2 * n);
    a.head(n) = qubit[0] * osc.amplitudes;
    a.tail(n) = qubit[1] * osc.amplitudes;
    return HybridState(std::move(a), weight);
  }

  /// Oscillator amplitudes conditioned on qubit level 0 or 1 (unnormalized).
  Vec qubit_block(int level) const {
    return level == 0 ? amplitudes.head(fock_dim()) : amplitudes.tail(fock_dim());
  }
};

/// Ancilla prepared in the dark level |1>, oscillator in psi.
inline HybridState with_fresh_ancilla(const FockVector& osc, double weight = 1.0) {
  return HybridState::product(Eigen::Vector2cd(0, 1), osc, weight);
}

/// State-dependent force D(alpha/2 \hat{X}): transform the ancilla to the X
/// basis, displace each branch by +/- alpha/2, transform back. Exact because
/// both branch displacements come from the same axis eigendecomposition.
inline HybridState sdf(const HybridState& state, Complex alpha, const Conventions& c) {
  if (state.fock_dim() != c.fock_dim) throw std::invalid_argument("hybrid dimension mismatch");
  if (alpha == Complex(0, 0)) return state;
  c.check_displacement(0.5 * alpha);
  const int n = c.fock_dim;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  Vec plus = inv_sqrt2 * (state.amplitudes.head(n) + state.amplitudes.tail(n));
  Vec minus = inv_sqrt2 * (state.amplitudes.head(n) - state.amplitudes.tail(n));

  AxisDisplacer disp(alpha, c);
  const double t = 0.5 * std::abs(alpha);
  plus = disp.apply(FockVector(plus), t).amplitudes;
  minus = disp.apply(FockVector(minus), -t).amplitudes;

  Vec out(2 * n);
  out.head(n) = inv_sqrt2 * (plus + minus);
  out.tail(n) = inv_sqrt2 * (plus - minus);
  return HybridState(std::move(out), state.probability_weight);
}

/// Carrier rotation R(theta, phi) = cos(theta/2) 1 +
/// i sin(theta/2) (sin(phi) X + cos(phi) Y), acting on the ancilla only.
inline Eigen::Matrix2cd carrier_matrix(double theta, double phi) {
  const double ct = std::cos(0.5 * theta), st = std::sin(0.5 * theta);
  Eigen::Matrix2cd r;
  r << ct, st * std::exp(Complex(0, phi)), -st * std::exp(Complex(0, -phi)), ct;
  return r;
}

inline HybridState carrier_rotation(const HybridState& state, double theta, double phi) {
  const int n = state.fock_dim();
  Eigen::Matrix2cd r = carrier_matrix(theta, phi);
  Vec out(2 * n);
  out.head(n) = r(0, 0) * state.amplitudes.head(n) + r(0, 1) * state.amplitudes.tail(n);
  out.tail(n) = r(1, 0) * state.amplitudes.head(n) + r(1, 1) * state.amplitudes.tail(n);
  return HybridState(std::move(out), state.probability_weight);
}

/// Unconditional oscillator displacement on both qubit branches.
inline HybridState hybrid_displacement(const HybridState& state, Complex alpha,
                                       const Conventions& c) {
  if (alpha == Complex(0, 0)) return state;
  c.check_displacement(alpha);
  const int n = c.fock_dim;
  AxisDisplacer disp(alpha, c);
  const double t = std::abs(alpha);
  Vec out(2 * n);
  out.head(n) = disp.apply(FockVector(Vec(state.amplitudes.head(n))), t).amplitudes;
  out.tail(n) = disp.apply(FockVector(Vec(state.amplitudes.tail(n))), t).amplitudes;
  return HybridState(std::move(out), state.probability_weight);
}

/// One branch of a projective fluorescence readout of the ancilla.
struct MeasurementBranch {
  enum class Outcome { dark, bright };
  Outcome outcome;
  double probability = 0.0;  // branch probability, the two branches sum to 1
  FockVector post_state;     // normalized oscillator state; empty if probability = 0
  bool empty() const { return post_state.dim() == 0; }
};

/// Projects the ancilla onto its fluorescence basis and discards it.
/// Dark = |1> (no scattered photons). Never divides by zero: a
/// zero-probability branch carries an empty post state.
inline std::pair<MeasurementBranch, MeasurementBranch> fluorescence_measure(
    const HybridState& state) {
  const int n = state.fock_dim();
  Vec bright_amp = state.qubit_block(0);
  Vec dark_amp = state.qubit_block(1);
  const double total = state.amplitudes.squaredNorm();
  if (total <= 0.0) throw std::invalid_argument("cannot measure a zero state");

  auto make = [&](MeasurementBranch::Outcome o, Vec amp) {
    MeasurementBranch b;
    b.outcome = o;
    b.probability = amp.squaredNorm() / total;
    if (b.probability > 1e-300) {
      b.post_state = FockVector(amp / amp.norm());
    }
    return b;
  };
  return {make(MeasurementBranch::Outcome::dark, std::move(dark_amp)),
          make(MeasurementBranch::Outcome::bright, std::move(bright_amp))};
}

enum class ReadoutPart { real, imaginary };

/// Modular-variable readout by the explicit hybrid circuit: prepare |1>,
/// optionally rotate the carrier by R(pi/2, -pi/2) for the imaginary part,
/// apply the state-dependent force, measure. Returns P(dark) - P(bright).
inline double modular_expectation_circuit(const FockVector& osc, Complex alpha, ReadoutPart part,
                                          const Conventions& c) {
  HybridState h = with_fresh_ancilla(osc.normalized());
  if (part == ReadoutPart::imaginary) h = carrier_rotation(h, 0.5 * kPi, -0.5 * kPi);
  h = sdf(h, alpha, c);
  auto [dark, bright] = fluorescence_measure(h);
  return dark.probability - bright.probability;
}

/// Same readout evaluated directly as Re/Im Tr(rho D(alpha)); the circuit
/// above is the cross-checking implementation.
inline double modular_expectation(const FockVector& osc, Complex alpha, ReadoutPart part,
                                  const Conventions& c) {
  c.check_displacement(alpha);
  Complex chi;
  if (alpha == Complex(0, 0)) {
    chi = Complex(1, 0);
  } else {
    AxisDisplacer disp(alpha, c);
    chi = disp.chi(disp.scan_weights(osc.normalized()), std::abs(alpha));
  }
  return part == ReadoutPart::real ? chi.real() : chi.imag();
}

inline double modular_expectation(const DensityMatrix& rho, Complex alpha, ReadoutPart part,
                                  const Conventions& c) {
  c.check_displacement(alpha);
  DensityMatrix r = rho.normalized();
  Complex chi;
  if (alpha == Complex(0, 0)) {
    chi = Complex(1, 0);
  } else {
    AxisDisplacer disp(alpha, c);
    chi = disp.chi(disp.scan_weights(r), std::abs(alpha));
  }
  return part == ReadoutPart::real ? chi.real() : chi.imag();
}

/// Logical Pauli gate: the displacement D(l_j/2).
inline FockVector pauli_gate(const FockVector& osc, const LogicalFrame& frame, Axis axis,
                             const Conventions& c) {
  const Complex half = 0.5 * frame.amplitude(axis);
  c.check_displacement(half);
  return AxisDisplacer(half, c).apply(osc, std::abs(half));
}

/// Gate teleportation: ancilla in |1>, carrier R(theta, phi + pi), controlled
/// displacement D(l_j/4 X) (sdf with alpha = l_j/2), unconditional corrective
/// displacement D(l_j/4), post-selected dark readout. On the code space the
/// dark branch implements
///   U_L^j(theta, phi) = sqrt(2) (cos(theta/2) |+_j><+_j| +
///                                sin(theta/2) e^{i phi} |-_j><-_j|),
/// the phase-pi carrier offset being the bookkeeping that makes the
/// implemented operator match this form with a + sign on the second term.
struct TeleportedGateResult {
  FockVector dark_state;
  double success_probability = 0.0;
  bool empty() const { return dark_state.dim() == 0; }
};

inline TeleportedGateResult teleported_gate(const FockVector& osc, const LogicalFrame& frame,
                                            Axis axis, double theta, double phi,
                                            const Conventions& c) {
  frame.validate();
  const Complex lj = frame.amplitude(axis);
  HybridState h = with_fresh_ancilla(osc.normalized());
  h = carrier_rotation(h, theta, phi + kPi);
  h = sdf(h, 0.5 * lj, c);
  h = hybrid_displacement(h, 0.25 * lj, c);
  auto [dark, bright] = fluorescence_measure(h);
  (void)bright;
  TeleportedGateResult res;
  res.success_probability = dark.probability;
  if (!dark.empty()) res.dark_state = dark.post_state;
  return res;
}

/// The ideal logical-qubit action of the teleported gate, for fidelity
/// targets: cos(theta/2)|+><+| + sin(theta/2) e^{i phi} |-><-| in the
/// computational basis.
inline Eigen::Matrix2cd ideal_teleported_gate(double theta, double phi) {
  Eigen::Matrix2cd plus, minus;
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  return std::cos(0.5 * theta) * plus +
         std::sin(0.5 * theta) * std::exp(Complex(0, phi)) * minus;
}

// ---------------------------------------------------------------------------
// State-creation sequences.

struct StepSqueezePrep {};
struct StepModular {
  Complex alpha;
};
struct StepPauli {
  Axis axis;
};
struct StepTeleport {
  Axis axis;
  double theta;
  double phi;
};
using SequenceStep = std::variant<StepSqueezePrep, StepModular, StepPauli, StepTeleport>;

/// Ordered pulse recipe for one logical state. Every sequence starts from
/// squeezed-vacuum pumping.
struct SequenceRecipe {
  std::string name;
  std::vector<SequenceStep> steps;

  void validate() const {
    if (steps.empty() || !std::holds_alternative<StepSqueezePrep>(steps.front())) {
      throw std::invalid_argument("recipe '" + name + "' must start with squeeze_prep");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (std::holds_alternative<StepSqueezePrep>(steps[i])) {
        throw std::invalid_argument("recipe '" + name + "' has squeeze_prep after step 0");
      }
    }
  }
};

struct PreparedState {
  FockVector state;
  double success_probability = 1.0;  // product of dark-branch probabilities
};

/// Executes a recipe, post-selecting the dark outcome at every fluorescence
/// measurement. States stay normalized; the weight is carried explicitly.
inline PreparedState prepare_state(const SequenceRecipe& recipe, const GridParams& params,
                                   const LogicalFrame& frame, const Conventions& c) {
  recipe.validate();
  params.validate();
  PreparedState out;
  out.state = squeezed_vacuum(params.r, c);

  for (std::size_t i = 1; i < recipe.steps.size(); ++i) {
    const SequenceStep& step = recipe.steps[i];
    if (std::holds_alternative<StepModular>(step)) {
      const Complex alpha = std::get<StepModular>(step).alpha;
      HybridState h = with_fresh_ancilla(out.state);
      h = sdf(h, alpha, c);
      auto [dark, bright] = fluorescence_measure(h);
      (void)bright;
      if (dark.empty()) {
        throw std::runtime_error("recipe '" + recipe.name + "': dark branch has zero probability");
      }
      out.state = dark.post_state;
      out.success_probability *= dark.probability;
    } else if (std::holds_alternative<StepPauli>(step)) {
      out.state = pauli_gate(out.state, frame, std::get<StepPauli>(step).axis, c);
    } else if (std::holds_alternative<StepTeleport>(step)) {
      const auto& t = std::get<StepTeleport>(step);
      TeleportedGateResult res = teleported_gate(out.state, frame, t.axis, t.theta, t.phi, c);
      if (res.empty()) {
        throw std::runtime_error("recipe '" + recipe.name + "': teleported gate dark branch empty");
      }
      out.state = res.dark_state;
      out.success_probability *= res.success_probability;
    } else {
      throw std::invalid_argument("squeeze_prep only allowed as the first step");
    }
  }
  return out;
}

/// The six standard code states: |0>, |1> = X|0>, and the four produced from
/// |0> by teleported gates along x. The two modular measurements use
/// alpha_1 = alpha_2 = l, giving the {1, 2, 1} coefficient comb.
inline std::vector<SequenceRecipe> six_state_recipes(const GridParams& params) {
  const Complex l(params.l, 0);
  std::vector<SequenceStep> seq0 = {StepSqueezePrep{}, StepModular{l}, StepModular{l}};
  auto with = [&](const char* name, std::vector<SequenceStep> extra) {
    SequenceRecipe r;
    r.name = name;
    r.steps = seq0;
    for (auto& s : extra) r.steps.push_back(s);
    return r;
  };
  return {
      with("0_L", {}),
      with("1_L", {StepPauli{Axis::x}}),
      with("+_L", {StepTeleport{Axis::x, 0.0, 0.0}}),
      with("-_L", {StepTeleport{Axis::x, kPi, 0.0}}),
      with("phi+_L", {StepTeleport{Axis::x, 0.5 * kPi, 0.5 * kPi}}),
      with("phi-_L", {StepTeleport{Axis::x, 0.5 * kPi, -0.5 * kPi}}),
  };
}

/// Ideal logical target of each standard recipe, from the ideal gate action
/// on |0>.
inline Eigen::Vector2cd ideal_logical_target(const std::string& name) {
  Eigen::Vector2cd zero(1, 0);
  auto normalized = [](Eigen::Matrix2cd u, Eigen::Vector2cd v) {
    Eigen::Vector2cd w = u * v;
    return Eigen::Vector2cd(w / w.norm());
  };
  if (name == "0_L") return zero;
  if (name == "1_L") {
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    return normalized(x, zero);
  }
  if (name == "+_L") return normalized(ideal_teleported_gate(0.0, 0.0), zero);
  if (name == "-_L") return normalized(ideal_teleported_gate(kPi, 0.0), zero);
  if (name == "phi+_L") return normalized(ideal_teleported_gate(0.5 * kPi, 0.5 * kPi), zero);
  if (name == "phi-_L") return normalized(ideal_teleported_gate(0.5 * kPi, -0.5 * kPi), zero);
  throw std::invalid_argument("unknown state label '" + name + "'");
}

}  // namespace gridsim
