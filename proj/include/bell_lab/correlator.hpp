// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: correlation functions E(a, b) three ways (closed form where a
// model knows one, quadrature over the hidden-state distribution, seeded
// Monte Carlo trial simulation) plus the perfect anti-correlation check.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bell_lab/core.hpp"
#include "bell_lab/detail/parallel.hpp"
#include "bell_lab/models.hpp"

namespace bell_lab {

// ---------------------------------------------------------------------------
// Quadrature over the hidden-state space
// ---------------------------------------------------------------------------

/// Product rule for sphere-supported distributions: Gauss-Legendre in
/// cos(theta) over [-1, 1] times a uniform periodic trapezoid in phi over
/// [0, 2pi). Weights are normalized to sum to 1.
class QuadratureSpec {
 public:
  explicit QuadratureSpec(int n_theta = 64, int n_phi = 64)
      : n_theta_(n_theta), n_phi_(n_phi) {
    if (n_theta_ < 2) throw std::invalid_argument("QuadratureSpec: n_theta must be >= 2");
    if (n_phi_ < 4) throw std::invalid_argument("QuadratureSpec: n_phi must be >= 4");
  }

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }

 private:
  int n_theta_;
  int n_phi_;
};

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence. Weights sum to 2.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p_prev = 1.0;
      double p = z;
      for (int k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * z * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
      }
      deriv = n * (z * p - p_prev) / (z * z - 1.0);
      const double step = p / deriv;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * deriv * deriv);
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

}  // namespace detail

/// Nodes for the unit-sphere product rule; weights sum to 1 within 1e-12.
/// The phi nodes take the midpoint phase (j + 1/2) so that no node sits on
/// the sign discontinuities of equator-crossing integrands at the canonical
/// right-angle settings.
inline std::vector<QuadratureNode> sphere_quadrature_nodes(const QuadratureSpec& spec) {
  std::vector<double> u, wu;
  detail::gauss_legendre(spec.n_theta(), u, wu);
  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(spec.n_theta()) * spec.n_phi());
  for (int i = 0; i < spec.n_theta(); ++i) {
    const double rho = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
    const double w = wu[i] / (2.0 * spec.n_phi());
    for (int j = 0; j < spec.n_phi(); ++j) {
      const double phi = kTwoPi * (j + 0.5) / spec.n_phi();
      nodes.push_back({HiddenState{{rho * std::cos(phi), rho * std::sin(phi), u[i]}}, w});
    }
  }
  return nodes;
}

/// The node set used to integrate over a distribution: the distribution's own
/// nodes if it carries any, else generated sphere nodes, else an error.
inline std::vector<QuadratureNode> quadrature_nodes_for(const HiddenDistribution& dist,
                                                        const QuadratureSpec& spec) {
  if (dist.quadrature_nodes().has_value()) return *dist.quadrature_nodes();
  if (dist.sphere_supported()) return sphere_quadrature_nodes(spec);
  throw UnsupportedDistributionError(
      "quadrature_nodes_for: distribution has neither quadrature nodes nor sphere support");
}

// ---------------------------------------------------------------------------
// Exact (quadrature) correlations
// ---------------------------------------------------------------------------

inline CorrelationEstimate correlation_on_nodes(const DeterministicLocalModel& model,
                                                const Axis& a, const Axis& b,
                                                std::span<const QuadratureNode> nodes) {
  double sum = 0.0;
  for (const auto& node : nodes) {
    sum += node.weight * (model.alice_outcome(a, node.state) * model.bob_outcome(b, node.state));
  }
  return CorrelationEstimate(sum, 0.0, static_cast<long long>(nodes.size()),
                             EstimateMethod::quadrature);
}

inline CorrelationEstimate correlation_on_nodes(const StochasticLocalModel& model,
                                                const Axis& a, const Axis& b,
                                                std::span<const QuadratureNode> nodes) {
  double sum = 0.0;
  for (const auto& node : nodes) {
    sum += node.weight * mean_value(model, Side::alice, a, node.state) *
           mean_value(model, Side::bob, b, node.state);
  }
  return CorrelationEstimate(sum, 0.0, static_cast<long long>(nodes.size()),
                             EstimateMethod::quadrature);
}

inline CorrelationEstimate correlation_exact(const DeterministicLocalModel& model, const Axis& a,
                                             const Axis& b,
                                             const QuadratureSpec& spec = QuadratureSpec()) {
  const auto nodes = quadrature_nodes_for(model.dist, spec);
  return correlation_on_nodes(model, a, b, nodes);
}

inline CorrelationEstimate correlation_exact(const StochasticLocalModel& model, const Axis& a,
                                             const Axis& b,
                                             const QuadratureSpec& spec = QuadratureSpec()) {
  const auto nodes = quadrature_nodes_for(model.dist, spec);
  return correlation_on_nodes(model, a, b, nodes);
}

/// Closed-form route, when the model carries one.
template <typename Model>
std::optional<CorrelationEstimate> correlation_closed_form(const Model& model, const Axis& a,
                                                           const Axis& b) {
  if (!model.known_correlation) return std::nullopt;
  return CorrelationEstimate(model.known_correlation(a, b), 0.0, 0, EstimateMethod::closed_form);
}

// ---------------------------------------------------------------------------
// Monte Carlo correlations
// ---------------------------------------------------------------------------

namespace detail {

/// Shared trial loop. per_trial(t) must return the +-1 outcome product of
/// trial t and draw all of its randomness from RandomStream(seed, t), which
/// keeps results bit-identical for any worker count: products are summed as
/// integers, so the reduction order cannot matter.
template <typename PerTrial>
CorrelationEstimate run_trials(long long n, PerTrial&& per_trial) {
  if (n < 1) throw std::invalid_argument("correlation_mc: need at least one trial");
  std::atomic<long long> total{0};
  for_each_chunk(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    long long partial = 0;
    for (std::size_t t = begin; t < end; ++t) {
      partial += per_trial(static_cast<std::uint64_t>(t));
    }
    total.fetch_add(partial, std::memory_order_relaxed);
  });
  const double mean = static_cast<double>(total.load()) / static_cast<double>(n);
  double stderr_value = std::numeric_limits<double>::quiet_NaN();
  if (n > 1) {
    // Sample variance of +-1 products reduces to n(1 - mean^2)/(n - 1).
    stderr_value = std::sqrt(std::max(0.0, 1.0 - mean * mean) / static_cast<double>(n - 1));
  }
  return CorrelationEstimate(mean, stderr_value, n, EstimateMethod::monte_carlo);
}

}  // namespace detail

inline CorrelationEstimate correlation_mc(const DeterministicLocalModel& model, const Axis& a,
                                          const Axis& b, long long n, std::uint64_t seed) {
  return detail::run_trials(n, [&](std::uint64_t t) {
    RandomStream stream(seed, t);
    const HiddenState lambda = model.dist.sample(stream);
    return model.alice_outcome(a, lambda) * model.bob_outcome(b, lambda);
  });
}

inline CorrelationEstimate correlation_mc(const StochasticLocalModel& model, const Axis& a,
                                          const Axis& b, long long n, std::uint64_t seed) {
  return detail::run_trials(n, [&](std::uint64_t t) {
    RandomStream stream(seed, t);
    const HiddenState lambda = model.dist.sample(stream);
    // Outcomes are drawn independently given lambda, one draw per wing.
    const double p_alice = model.alice_prob(Outcome::plus(), a, lambda);
    const double p_bob = model.bob_prob(Outcome::plus(), b, lambda);
    if (!(p_alice >= 0.0 && p_alice <= 1.0) || !(p_bob >= 0.0 && p_bob <= 1.0)) {
      throw ModelInvariantError("correlation_mc: probability outside [0,1] in model '" +
                                model.name + "'");
    }
    const int alice = stream.next_unit() < p_alice ? 1 : -1;
    const int bob = stream.next_unit() < p_bob ? 1 : -1;
    return alice * bob;
  });
}

inline CorrelationEstimate correlation_mc(QuantumSingletTag, const Axis& a, const Axis& b,
                                          long long n, std::uint64_t seed) {
  return detail::run_trials(n, [&](std::uint64_t t) {
    RandomStream stream(seed, t);
    const auto [alice, bob] = quantum_sample_pair(a, b, stream);
    return alice * bob;
  });
}

// ---------------------------------------------------------------------------
// Perfect anti-correlation check
// ---------------------------------------------------------------------------

/// Record of every probe where a model failed A(x, lambda) = -B(x, lambda).
struct AnticorrelationReport {
  struct Violation {
    std::size_t axis_index;
    std::size_t lambda_index;
    Axis axis;
    HiddenState lambda;
    int alice;
    int bob;
  };

  std::vector<Violation> violations;
  std::size_t probes = 0;

  bool passed() const { return violations.empty(); }
};

inline AnticorrelationReport anticorrelation_check(const DeterministicLocalModel& model,
                                                   std::span<const Axis> axes, int n_lambda,
                                                   std::uint64_t seed) {
  AnticorrelationReport report;
  for (int k = 0; k < n_lambda; ++k) {
    RandomStream stream(seed, static_cast<std::uint64_t>(k));
    const HiddenState lambda = model.dist.sample(stream);
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const int alice = model.alice_outcome(axes[i], lambda).value();
      const int bob = model.bob_outcome(axes[i], lambda).value();
      ++report.probes;
      if (alice != -bob) {
        report.violations.push_back(
            {i, static_cast<std::size_t>(k), axes[i], lambda, alice, bob});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Estimator convergence scan
// ---------------------------------------------------------------------------

namespace detail {

template <typename McFn>
Table convergence_scan(const std::vector<long long>& n_list, double exact_value, McFn&& mc) {
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    if (n_list[i + 1] <= n_list[i]) {
      throw std::invalid_argument("mc_convergence_scan: n_list must be strictly ascending");
    }
  }
  Table table;
  table.columns = {"n", "abs_error", "stderr"};
  for (const long long n : n_list) {
    const CorrelationEstimate est = mc(n);
    table.rows.push_back({static_cast<double>(n), std::abs(est.value() - exact_value),
                          est.stderr_value()});
  }
  return table;
}

}  // namespace detail

/// Rows of (n, |mc - exact|, stderr) for each requested sample count. The
/// reference value is the model's closed form when it has one, otherwise
/// the default quadrature.
inline Table mc_convergence_scan(const DeterministicLocalModel& model, const Axis& a,
                                 const Axis& b, const std::vector<long long>& n_list,
                                 std::uint64_t seed) {
  const double exact = model.known_correlation ? model.known_correlation(a, b)
                                               : correlation_exact(model, a, b).value();
  return detail::convergence_scan(n_list, exact,
                                  [&](long long n) { return correlation_mc(model, a, b, n, seed); });
}

inline Table mc_convergence_scan(const StochasticLocalModel& model, const Axis& a, const Axis& b,
                                 const std::vector<long long>& n_list, std::uint64_t seed) {
  const double exact = model.known_correlation ? model.known_correlation(a, b)
                                               : correlation_exact(model, a, b).value();
  return detail::convergence_scan(n_list, exact,
                                  [&](long long n) { return correlation_mc(model, a, b, n, seed); });
}

inline Table mc_convergence_scan(QuantumSingletTag tag, const Axis& a, const Axis& b,
                                 const std::vector<long long>& n_list, std::uint64_t seed) {
  return detail::convergence_scan(n_list, quantum_correlation(a, b),
                                  [&](long long n) { return correlation_mc(tag, a, b, n, seed); });
}

// ---------------------------------------------------------------------------
// Uniform correlation access for the CLI and sweeps
// ---------------------------------------------------------------------------

/// One handle over "anything that can produce E(a, b)": a deterministic or
/// stochastic local model, or the quantum singlet reference. Signaling
/// models enter through their frozen local view, which is the only slice of
/// them the local machinery can talk about.
class CorrelationSource {
 public:
  explicit CorrelationSource(DeterministicLocalModel model) : impl_(std::move(model)) {}
  explicit CorrelationSource(StochasticLocalModel model) : impl_(std::move(model)) {}
  explicit CorrelationSource(QuantumSingletTag tag) : impl_(tag) {}

  static CorrelationSource from_any(const AnyModel& any,
                                    const Axis& frozen_distant = axis_from_planar_angle(0.0)) {
    return std::visit(
        [&](const auto& model) -> CorrelationSource {
          using T = std::decay_t<decltype(model)>;
          if constexpr (std::is_same_v<T, SignalingReferenceModel>) {
            return CorrelationSource(signaling_local_view(model, frozen_distant));
          } else {
            return CorrelationSource(model);
          }
        },
        any);
  }

  bool is_quantum() const { return std::holds_alternative<QuantumSingletTag>(impl_); }

  bool has_closed_form() const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return static_cast<bool>(det->known_correlation);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return static_cast<bool>(sto->known_correlation);
    }
    return true;
  }

  std::vector<QuadratureNode> nodes_for(const QuadratureSpec& spec) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return quadrature_nodes_for(det->dist, spec);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return quadrature_nodes_for(sto->dist, spec);
    }
    throw UnsupportedDistributionError("nodes_for: the quantum reference has no hidden states");
  }

  /// Best deterministic-path estimate: closed form when available, else
  /// quadrature.
  CorrelationEstimate correlate(const Axis& a, const Axis& b,
                                const QuadratureSpec& spec = QuadratureSpec()) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      if (auto closed = correlation_closed_form(*det, a, b)) return *closed;
      return correlation_exact(*det, a, b, spec);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      if (auto closed = correlation_closed_form(*sto, a, b)) return *closed;
      return correlation_exact(*sto, a, b, spec);
    }
    return CorrelationEstimate(quantum_correlation(a, b), 0.0, 0, EstimateMethod::closed_form);
  }

  /// Quadrature route (closed form for the quantum reference, which has no
  /// hidden-state space to integrate over).
  CorrelationEstimate exact(const Axis& a, const Axis& b,
                            const QuadratureSpec& spec = QuadratureSpec()) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return correlation_exact(*det, a, b, spec);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return correlation_exact(*sto, a, b, spec);
    }
    return CorrelationEstimate(quantum_correlation(a, b), 0.0, 0, EstimateMethod::closed_form);
  }

  CorrelationEstimate exact_on_nodes(const Axis& a, const Axis& b,
                                     std::span<const QuadratureNode> nodes) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return correlation_on_nodes(*det, a, b, nodes);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return correlation_on_nodes(*sto, a, b, nodes);
    }
    return CorrelationEstimate(quantum_correlation(a, b), 0.0, 0, EstimateMethod::closed_form);
  }

  CorrelationEstimate mc(const Axis& a, const Axis& b, long long n, std::uint64_t seed) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return correlation_mc(*det, a, b, n, seed);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return correlation_mc(*sto, a, b, n, seed);
    }
    return correlation_mc(QuantumSingletTag{}, a, b, n, seed);
  }

  Table convergence_scan(const Axis& a, const Axis& b, const std::vector<long long>& n_list,
                         std::uint64_t seed) const {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&impl_)) {
      return mc_convergence_scan(*det, a, b, n_list, seed);
    }
    if (const auto* sto = std::get_if<StochasticLocalModel>(&impl_)) {
      return mc_convergence_scan(*sto, a, b, n_list, seed);
    }
    return mc_convergence_scan(QuantumSingletTag{}, a, b, n_list, seed);
  }

 private:
  std::variant<DeterministicLocalModel, StochasticLocalModel, QuantumSingletTag> impl_;
};

}  // namespace bell_lab
