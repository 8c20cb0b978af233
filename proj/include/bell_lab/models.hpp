// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: concrete theories. Deterministic and stochastic local
// hidden-variable models, the quantum singlet reference, and a signaling
// negative control. Each exposes exactly the functions the inequality
// derivations consume; locality is structural (the signatures carry no
// distant setting).

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bell_lab/core.hpp"

namespace bell_lab {

using OutcomeFn = std::function<Outcome(const Axis&, const HiddenState&)>;
using ProbabilityFn = std::function<double(Outcome, const Axis&, const HiddenState&)>;
using CorrelationFn = std::function<double(const Axis&, const Axis&)>;

enum class Side { alice, bob };

/// Sign convention fixed project-wide: sign(t) = +1 for t >= 0.
inline int sign_of(double t) { return t >= 0.0 ? 1 : -1; }

// ---------------------------------------------------------------------------
// Deterministic local models
// ---------------------------------------------------------------------------

/// Outcome functions A(a, lambda) = +-1 and B(b, lambda) = +-1 over a shared
/// hidden-state distribution. Both functions must be pure. A model that sets
/// claims_anticorrelation promises A(x, lambda) = -B(x, lambda) for every
/// axis and state; the promise is checked by anticorrelation_check and by
/// the derivation audits, not at construction.
struct DeterministicLocalModel {
  std::string name;
  HiddenDistribution dist;
  OutcomeFn alice_outcome;
  OutcomeFn bob_outcome;
  bool claims_anticorrelation = false;

  /// Closed-form E(a, b) when one is known for this model, else null.
  /// Kept separate from the quadrature and Monte Carlo routes so the three
  /// can be checked against each other.
  CorrelationFn known_correlation;
};

/// Probability tables P(A|a, lambda), P(B|b, lambda) over a shared
/// distribution. Each table must assign [0,1] probabilities summing to 1
/// for the two outcomes at every (axis, lambda).
struct StochasticLocalModel {
  std::string name;
  HiddenDistribution dist;
  ProbabilityFn alice_prob;
  ProbabilityFn bob_prob;
  CorrelationFn known_correlation;
};

/// The theory's average outcome at one wing: P(+1|axis,lambda) - P(-1|axis,lambda).
/// Validates normalization on the way through and throws ModelInvariantError
/// if the table is malformed.
inline double mean_value(const StochasticLocalModel& model, Side side, const Axis& axis,
                         const HiddenState& lambda) {
  const ProbabilityFn& prob = (side == Side::alice) ? model.alice_prob : model.bob_prob;
  const double p_plus = prob(Outcome::plus(), axis, lambda);
  const double p_minus = prob(Outcome::minus(), axis, lambda);
  if (!(p_plus >= 0.0 && p_plus <= 1.0) || !(p_minus >= 0.0 && p_minus <= 1.0) ||
      std::abs(p_plus + p_minus - 1.0) > 1e-12) {
    throw ModelInvariantError("mean_value: outcome probabilities of model '" + model.name +
                              "' do not form a distribution");
  }
  return p_plus - p_minus;
}

/// Determinism as the point-mass special case: the lifted table puts all
/// probability on the deterministic outcome, so the lifted mean value equals
/// the original outcome exactly (+-1, never intermediate).
inline StochasticLocalModel lift_deterministic(const DeterministicLocalModel& model) {
  auto lift = [](const OutcomeFn& outcome) {
    return [outcome](Outcome o, const Axis& axis, const HiddenState& lambda) {
      return outcome(axis, lambda) == o ? 1.0 : 0.0;
    };
  };
  return StochasticLocalModel{model.name + " (lifted)", model.dist,
                              lift(model.alice_outcome), lift(model.bob_outcome),
                              model.known_correlation};
}

/// The canonical textbook LHV instance: lambda uniform on the unit sphere,
/// A = sign(a . lambda), B = -sign(b . lambda). Perfectly anti-correlated on
/// equal axes, with E(a, b) = -1 + 2 theta / pi for included angle theta.
inline DeterministicLocalModel make_sign_sphere_model() {
  DeterministicLocalModel model{
      "sign_sphere",
      uniform_sphere_distribution(),
      [](const Axis& a, const HiddenState& lambda) { return Outcome(sign_of(dot(a, lambda))); },
      [](const Axis& b, const HiddenState& lambda) { return Outcome(-sign_of(dot(b, lambda))); },
      /*claims_anticorrelation=*/true,
      /*known_correlation=*/nullptr};
  model.known_correlation = [](const Axis& a, const Axis& b) {
    return -1.0 + 2.0 * angle_between(a, b) / kPi;
  };
  return model;
}

/// A genuinely stochastic LHV instance: lambda uniform on the sphere,
/// P(+1 | a, lambda) = (1 + bias * a.lambda)/2 for Alice and the mirrored
/// (1 - bias * b.lambda)/2 for Bob. E(a, b) = -bias^2 (a . b) / 3, the 1/3
/// coming from the second moment of a uniform sphere direction.
inline StochasticLocalModel make_local_noise_model(double bias) {
  if (!(std::abs(bias) <= 1.0)) {
    throw std::invalid_argument("make_local_noise_model: |bias| must be <= 1");
  }
  auto table = [bias](double side_sign) {
    return [bias, side_sign](Outcome o, const Axis& axis, const HiddenState& lambda) {
      return 0.5 * (1.0 + side_sign * bias * o.value() * dot(axis, lambda));
    };
  };
  StochasticLocalModel model{"local_noise", uniform_sphere_distribution(),
                             table(+1.0), table(-1.0), nullptr};
  model.known_correlation = [bias](const Axis& a, const Axis& b) {
    return -bias * bias * dot(a, b) / 3.0;
  };
  return model;
}

// ---------------------------------------------------------------------------
// Quantum singlet reference
// ---------------------------------------------------------------------------

/// The singlet-state predictions, deliberately not expressed as an LHV model:
/// no lambda, only the joint outcome table P(A,B | a,b) = (1 - A B a.b)/4 and
/// its consequences. Marginals are exactly 1/2 at every setting.
struct QuantumSingletReference {
  static double joint_probability(Outcome a_out, Outcome b_out, const Axis& a, const Axis& b) {
    return 0.25 * (1.0 - a_out.value() * b_out.value() * dot(a, b));
  }
};

/// E(a, b) = -(a . b): equal axes give perfectly opposite outcomes.
inline double quantum_correlation(const Axis& a, const Axis& b) { return -dot(a, b); }

/// One trial from the joint table: Alice's outcome is a fair coin (her
/// marginal), Bob's is drawn from the conditional (1 - A B a.b)/2.
inline std::pair<Outcome, Outcome> quantum_sample_pair(const Axis& a, const Axis& b,
                                                       RandomStream& stream) {
  const double d = dot(a, b);
  const Outcome a_out = stream.next_unit() < 0.5 ? Outcome::plus() : Outcome::minus();
  const double p_b_plus = 0.5 * (1.0 - a_out.value() * d);
  const Outcome b_out = stream.next_unit() < p_b_plus ? Outcome::plus() : Outcome::minus();
  return {a_out, b_out};
}

// ---------------------------------------------------------------------------
// Signaling negative control
// ---------------------------------------------------------------------------

/// Like a deterministic model except Alice's outcome reads Bob's setting:
/// a deliberate locality violation, used to prove the checks can fail.
struct SignalingReferenceModel {
  std::string name;
  HiddenDistribution dist;
  /// (local setting, distant setting, lambda) -> outcome.
  std::function<Outcome(const Axis&, const Axis&, const HiddenState&)> alice_outcome;
  OutcomeFn bob_outcome;
};

inline SignalingReferenceModel make_signaling_demo_model() {
  return SignalingReferenceModel{
      "signaling_demo",
      uniform_sphere_distribution(),
      [](const Axis& local, const Axis& distant, const HiddenState& lambda) {
        return Outcome(sign_of(dot(local, lambda)) * sign_of(dot(distant, lambda)));
      },
      [](const Axis& b, const HiddenState& lambda) { return Outcome(-sign_of(dot(b, lambda))); }};
}

/// Slice of a signaling model with the distant setting frozen. The slice has
/// local signatures, so it can be fed to the local-model machinery; the
/// signaling shows up as a failed anti-correlation premise.
inline DeterministicLocalModel signaling_local_view(const SignalingReferenceModel& model,
                                                    const Axis& frozen_distant) {
  auto alice = model.alice_outcome;
  return DeterministicLocalModel{
      model.name + " (distant setting frozen)", model.dist,
      [alice, frozen_distant](const Axis& a, const HiddenState& lambda) {
        return alice(a, frozen_distant, lambda);
      },
      model.bob_outcome,
      /*claims_anticorrelation=*/false,
      /*known_correlation=*/nullptr};
}

// ---------------------------------------------------------------------------
// Built-in model registry (names the CLI accepts)
// ---------------------------------------------------------------------------

struct QuantumSingletTag {};

using AnyModel = std::variant<DeterministicLocalModel, StochasticLocalModel, QuantumSingletTag,
                              SignalingReferenceModel>;

inline std::vector<std::string> builtin_model_names() {
  return {"sign_sphere", "local_noise", "quantum_singlet", "signaling_demo"};
}

inline AnyModel make_builtin_model(std::string_view name) {
  if (name == "sign_sphere") return make_sign_sphere_model();
  if (name == "local_noise") return make_local_noise_model(1.0);
  if (name == "quantum_singlet") return QuantumSingletTag{};
  if (name == "signaling_demo") return make_signaling_demo_model();
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (known: sign_sphere, local_noise, quantum_singlet, signaling_demo)");
}

}  // namespace bell_lab
