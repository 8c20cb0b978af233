// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: domain primitives shared by every module: measurement axes,
// bivalent outcomes, hidden-state spaces and distributions over them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bell_lab/rng.hpp"

namespace bell_lab {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance ladder used throughout: algebraic identities and closed forms
/// must hold to kClosedFormTol; values that went through a quadrature rule
/// get kQuadratureTol; Monte Carlo estimates are judged in units of stderr.
inline constexpr double kClosedFormTol = 1e-9;
inline constexpr double kQuadratureTol = 1e-6;
inline constexpr double kMonteCarloSigmas = 5.0;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Thrown when a model breaks one of its structural promises (e.g. a
/// probability table that does not normalize).
class ModelInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a derivation's premise fails on the supplied model, e.g. the
/// perfect anti-correlation requirement behind the three-correlation
/// inequality. The message names the offending (axis, lambda) probe.
class PremiseViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an exact correlation is requested for a distribution that
/// neither carries quadrature nodes nor lives on the unit sphere.
class UnsupportedDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Axis
// ---------------------------------------------------------------------------

/// A measurement direction: a unit 3-vector. Construction renormalizes, so
/// an Axis always satisfies x^2 + y^2 + z^2 = 1 to within 1e-12.
class Axis {
 public:
  Axis(double x, double y, double z) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw std::invalid_argument("Axis: components must be finite");
    }
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm >= 1e-300) || !std::isfinite(norm)) {
      throw std::invalid_argument("Axis: vector norm must be positive and finite");
    }
    x_ = x / norm;
    y_ = y / norm;
    z_ = z / norm;
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

 private:
  double x_, y_, z_;
};

/// Places a setting in the x-z measurement plane: theta (radians) is the
/// angle from +z, so 0 -> (0,0,1) and pi/2 -> (1,0,0).
inline Axis axis_from_planar_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("axis_from_planar_angle: theta must be finite");
  }
  return Axis(std::sin(theta), 0.0, std::cos(theta));
}

/// Dot product clamped to [-1, 1] to absorb rounding on unit inputs.
inline double dot(const Axis& a, const Axis& b) {
  const double d = a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  return std::clamp(d, -1.0, 1.0);
}

/// Included angle in [0, pi].
inline double angle_between(const Axis& a, const Axis& b) {
  return std::acos(dot(a, b));
}

// ---------------------------------------------------------------------------
// Outcome
// ---------------------------------------------------------------------------

/// A bivalent measurement result, +1 or -1. Never 0.
class Outcome {
 public:
  explicit Outcome(int value) : value_(value) {
    if (value != 1 && value != -1) {
      throw std::invalid_argument("Outcome: value must be +1 or -1");
    }
  }

  static Outcome plus() { return Outcome(1); }
  static Outcome minus() { return Outcome(-1); }

  int value() const { return value_; }
  Outcome operator-() const { return Outcome(-value_); }
  friend bool operator==(Outcome a, Outcome b) = default;

 private:
  int value_;
};

/// Product of two outcomes, as the integer +1 or -1.
inline int operator*(Outcome a, Outcome b) { return a.value() * b.value(); }

// ---------------------------------------------------------------------------
// Hidden states and distributions
// ---------------------------------------------------------------------------

/// A point lambda in a model-declared state space. The container commits to
/// nothing beyond a fixed dimension; what the coordinates mean is entirely
/// the owning model's business.
struct HiddenState {
  std::vector<double> coords;

  double operator[](std::size_t i) const { return coords[i]; }
  std::size_t dimension() const { return coords.size(); }
};

/// Dot of an axis with the first three coordinates of a hidden state.
inline double dot(const Axis& a, const HiddenState& s) {
  return a.x() * s.coords[0] + a.y() * s.coords[1] + a.z() * s.coords[2];
}

struct QuadratureNode {
  HiddenState state;
  double weight;
};

/// rho(lambda): how the preparation procedure distributes hidden states.
///
/// Always samplable; optionally integrable, either through an explicit node
/// list (weights sum to 1) or by declaring support on the unit sphere, in
/// which case the correlator generates product-rule nodes on demand.
class HiddenDistribution {
 public:
  using Sampler = std::function<HiddenState(RandomStream&)>;

  HiddenDistribution(int dimension, Sampler sampler, bool sphere_supported = false)
      : dimension_(dimension), sampler_(std::move(sampler)), sphere_supported_(sphere_supported) {
    if (dimension_ <= 0) {
      throw std::invalid_argument("HiddenDistribution: dimension must be positive");
    }
    if (!sampler_) {
      throw std::invalid_argument("HiddenDistribution: sampler required");
    }
  }

  HiddenDistribution(int dimension, Sampler sampler, std::vector<QuadratureNode> nodes)
      : HiddenDistribution(dimension, std::move(sampler)) {
    double total = 0.0;
    for (const auto& node : nodes) {
      if (static_cast<int>(node.state.dimension()) != dimension_) {
        throw std::invalid_argument("HiddenDistribution: node dimension mismatch");
      }
      if (!(node.weight >= 0.0)) {
        throw std::invalid_argument("HiddenDistribution: negative quadrature weight");
      }
      total += node.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("HiddenDistribution: quadrature weights must sum to 1");
    }
    nodes_ = std::move(nodes);
  }

  int dimension() const { return dimension_; }
  bool sphere_supported() const { return sphere_supported_; }
  const std::optional<std::vector<QuadratureNode>>& quadrature_nodes() const { return nodes_; }

  HiddenState sample(RandomStream& stream) const {
    HiddenState s = sampler_(stream);
    if (static_cast<int>(s.dimension()) != dimension_) {
      throw ModelInvariantError("HiddenDistribution: sampler produced wrong dimension");
    }
    return s;
  }

 private:
  int dimension_;
  Sampler sampler_;
  bool sphere_supported_;
  std::optional<std::vector<QuadratureNode>> nodes_;
};

inline HiddenState sample_hidden(const HiddenDistribution& dist, RandomStream& stream) {
  return dist.sample(stream);
}

/// Uniform distribution on the unit sphere S^2 (area measure).
inline HiddenDistribution uniform_sphere_distribution() {
  auto sampler = [](RandomStream& stream) {
    const double z = stream.next_symmetric();
    const double phi = kTwoPi * stream.next_unit();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return HiddenState{{r * std::cos(phi), r * std::sin(phi), z}};
  };
  return HiddenDistribution(3, sampler, /*sphere_supported=*/true);
}

/// Degenerate rho concentrated on a single state.
inline HiddenDistribution point_mass_distribution(HiddenState at) {
  const int dim = static_cast<int>(at.dimension());
  auto sampler = [at](RandomStream&) { return at; };
  std::vector<QuadratureNode> nodes{{at, 1.0}};
  return HiddenDistribution(dim, std::move(sampler), std::move(nodes));
}

// ---------------------------------------------------------------------------
// Correlation estimates
// ---------------------------------------------------------------------------

enum class EstimateMethod { closed_form, quadrature, monte_carlo };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::closed_form: return "closed_form";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

/// The value of E(a, b) together with how it was obtained and how much it
/// can be trusted. Statistical estimates may overshoot |E| = 1 by a few
/// stderr; deterministic methods may not.
class CorrelationEstimate {
 public:
  CorrelationEstimate(double value, double stderr_value, long long n_samples,
                      EstimateMethod method)
      : value_(value), stderr_(stderr_value), n_samples_(n_samples), method_(method) {
    if (n_samples_ < 0) {
      throw std::logic_error("CorrelationEstimate: negative sample count");
    }
    if (std::isfinite(stderr_) && stderr_ < 0.0) {
      throw std::logic_error("CorrelationEstimate: negative stderr");
    }
    const double slack = (method_ == EstimateMethod::monte_carlo)
                             ? 3.0 * stderr_
                             : 1e-9;
    // stderr may be NaN for degenerate single-sample estimates; no bound then.
    if (std::isfinite(slack) && std::abs(value_) > 1.0 + slack) {
      throw std::logic_error("CorrelationEstimate: |value| exceeds 1 beyond tolerance");
    }
  }

  double value() const { return value_; }
  double stderr_value() const { return stderr_; }
  long long n_samples() const { return n_samples_; }
  EstimateMethod method() const { return method_; }

 private:
  double value_;
  double stderr_;
  long long n_samples_;
  EstimateMethod method_;
};

// ---------------------------------------------------------------------------
// Tabular results
// ---------------------------------------------------------------------------

/// Minimal numeric table: named columns, optional row labels, double cells.
/// This is what scans and sweeps return and what the CSV writer consumes.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;  // empty, or one label per row
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::invalid_argument("Table: no column named " + name);
  }
};

}  // namespace bell_lab
