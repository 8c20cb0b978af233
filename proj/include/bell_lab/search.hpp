// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: the two bounds from the search side. The local bound comes from
// exhaustive enumeration of deterministic strategies (exact integer
// arithmetic, no tolerance); the quantum maximum comes from derivative-free
// refinement of the measurement angles against the closed-form singlet
// correlation.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bell_lab/core.hpp"
#include "bell_lab/correlator.hpp"
#include "bell_lab/detail/parallel.hpp"
#include "bell_lab/inequalities.hpp"

namespace bell_lab {

enum class FunctionalKind { bell, chsh };

/// A deterministic strategy: one +-1 answer per setting index on each wing.
struct StrategyTable {
  std::vector<int> alice_values;
  std::vector<int> bob_values;
};

/// The finite measurement scenario a search runs over.
struct ScenarioSpec {
  std::vector<Axis> alice_settings;
  std::vector<Axis> bob_settings;
};

/// Functional value of one strategy with E(i,j) = alice[i] * bob[j].
/// Exact integer arithmetic widened to double at the end.
inline double evaluate_strategy(FunctionalKind functional, const StrategyTable& strategy) {
  const auto& av = strategy.alice_values;
  const auto& bv = strategy.bob_values;
  auto e = [&](std::size_t i, std::size_t j) { return av.at(i) * bv.at(j); };
  if (functional == FunctionalKind::chsh) {
    if (av.size() < 2 || bv.size() < 2) {
      throw std::invalid_argument("evaluate_strategy: chsh needs 2 settings per wing");
    }
    return static_cast<double>(std::abs(e(0, 0) - e(0, 1)) + std::abs(e(1, 1) + e(1, 0)));
  }
  if (av.size() < 3 || bv.size() < 3) {
    throw std::invalid_argument("evaluate_strategy: bell needs the 3-axis layout");
  }
  // |E(a,b) - E(a,c)| - E(b,c), bounded by 1 for anti-correlated strategies.
  return static_cast<double>(std::abs(e(0, 1) - e(0, 2)) - e(1, 2));
}

struct LocalBoundResult {
  double max_value;
  StrategyTable argmax;
  std::size_t n_strategies;
};

/// Brute force over the deterministic strategies of the scenario. CHSH runs
/// over all 2^2 * 2^2 = 16 tables; the three-axis layout runs over the 8
/// anti-correlated tables (bob = -alice on the shared axes), since perfect
/// anti-correlation is a premise of that inequality. First-found maximum
/// wins ties.
inline LocalBoundResult enumerate_local_bound(const ScenarioSpec& scenario,
                                              FunctionalKind functional) {
  if (functional == FunctionalKind::chsh) {
    if (scenario.alice_settings.size() != 2 || scenario.bob_settings.size() != 2) {
      throw std::invalid_argument("enumerate_local_bound: chsh scenario needs 2x2 settings");
    }
    LocalBoundResult result{-1e9, {}, 0};
    for (int a0 : {+1, -1}) {
      for (int a1 : {+1, -1}) {
        for (int b0 : {+1, -1}) {
          for (int b1 : {+1, -1}) {
            StrategyTable strategy{{a0, a1}, {b0, b1}};
            const double value = evaluate_strategy(functional, strategy);
            ++result.n_strategies;
            if (value > result.max_value) {
              result.max_value = value;
              result.argmax = strategy;
            }
          }
        }
      }
    }
    return result;
  }
  if (scenario.alice_settings.size() != 3 || scenario.bob_settings.size() != 3) {
    throw std::invalid_argument("enumerate_local_bound: bell scenario needs 3 shared axes");
  }
  LocalBoundResult result{-1e9, {}, 0};
  for (int v0 : {+1, -1}) {
    for (int v1 : {+1, -1}) {
      for (int v2 : {+1, -1}) {
        StrategyTable strategy{{v0, v1, v2}, {-v0, -v1, -v2}};
        const double value = evaluate_strategy(functional, strategy);
        ++result.n_strategies;
        if (value > result.max_value) {
          result.max_value = value;
          result.argmax = strategy;
        }
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Quantum maximum
// ---------------------------------------------------------------------------

struct OptimizeResult {
  double s_value;
  ScenarioSpec settings;
  bool converged;
  long long evaluations;
};

namespace detail {

inline double planar_angle_of(const Axis& axis) {
  if (std::abs(axis.y()) > 1e-9) {
    throw std::invalid_argument("optimize_quantum_chsh: settings must lie in the x-z plane");
  }
  return std::atan2(axis.x(), axis.z());
}

/// S at planar angles (alice, alice', bob, bob') under E = -cos(difference).
inline double chsh_objective(const double angles[4]) {
  const double e_ab = -std::cos(angles[0] - angles[2]);
  const double e_ab2 = -std::cos(angles[0] - angles[3]);
  const double e_a2b = -std::cos(angles[1] - angles[2]);
  const double e_a2b2 = -std::cos(angles[1] - angles[3]);
  return std::abs(e_ab - e_ab2) + std::abs(e_a2b2 + e_a2b);
}

}  // namespace detail

/// Coordinate descent with a golden-section line search over the four planar
/// angles. Planar settings lose no generality for the singlet objective,
/// which depends only on included angles. Returns the best point found, with
/// converged = false if the evaluation budget ran out first.
inline OptimizeResult optimize_quantum_chsh(const ScenarioSpec& initial, long long budget) {
  if (budget < 100) {
    throw std::invalid_argument("optimize_quantum_chsh: budget must be >= 100 evaluations");
  }
  if (initial.alice_settings.size() != 2 || initial.bob_settings.size() != 2) {
    throw std::invalid_argument("optimize_quantum_chsh: scenario needs 2x2 settings");
  }

  double angles[4] = {detail::planar_angle_of(initial.alice_settings[0]),
                      detail::planar_angle_of(initial.alice_settings[1]),
                      detail::planar_angle_of(initial.bob_settings[0]),
                      detail::planar_angle_of(initial.bob_settings[1])};

  long long evals = 0;
  auto objective = [&](const double candidate[4]) {
    ++evals;
    return detail::chsh_objective(candidate);
  };

  double best = objective(angles);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

  // Maximizes the 1-d slice along one coordinate: coarse scan to bracket,
  // then golden-section refinement.
  auto line_search = [&](int coord, double window) {
    double trial[4] = {angles[0], angles[1], angles[2], angles[3]};
    const double center = angles[coord];
    constexpr int kScan = 8;
    double scan_best = best;
    double scan_best_angle = center;
    for (int k = 0; k <= kScan; ++k) {
      if (evals >= budget) return;
      const double x = center - window + 2.0 * window * k / kScan;
      trial[coord] = x;
      const double value = objective(trial);
      if (value > scan_best) {
        scan_best = value;
        scan_best_angle = x;
      }
    }
    double lo = scan_best_angle - 2.0 * window / kScan;
    double hi = scan_best_angle + 2.0 * window / kScan;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    trial[coord] = x1;
    double f1 = objective(trial);
    trial[coord] = x2;
    double f2 = objective(trial);
    while (hi - lo > 1e-12 && evals < budget) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        trial[coord] = x2;
        f2 = objective(trial);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        trial[coord] = x1;
        f1 = objective(trial);
      }
    }
    const double x_best = 0.5 * (lo + hi);
    trial[coord] = x_best;
    const double value = objective(trial);
    if (value > best) {
      best = value;
      angles[coord] = x_best;
    } else if (scan_best > best) {
      best = scan_best;
      angles[coord] = scan_best_angle;
    }
  };

  double window = kPi / 4.0;
  bool converged = false;
  while (evals < budget) {
    const double before = best;
    for (int coord = 0; coord < 4 && evals < budget; ++coord) {
      line_search(coord, window);
    }
    if (best - before < 1e-13) {
      window *= 0.35;
      if (window < 1e-9) {
        converged = true;
        break;
      }
    }
  }

  ScenarioSpec settings{{axis_from_planar_angle(angles[0]), axis_from_planar_angle(angles[1])},
                        {axis_from_planar_angle(angles[2]), axis_from_planar_angle(angles[3])}};
  return OptimizeResult{best, settings, converged, evals};
}

// ---------------------------------------------------------------------------
// Violation landscape
// ---------------------------------------------------------------------------

/// Functional values over a planar grid with the given step (radians).
/// The first wing's first angle is pinned to 0: both functionals depend only
/// on angle differences, so the pinned slice already contains the whole
/// landscape. Rows carry angles in degrees plus the functional value and a
/// satisfied flag (1/0).
inline Table angle_sweep(FunctionalKind functional, const CorrelationSource& source,
                         double grid_step, const QuadratureSpec& spec = QuadratureSpec()) {
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("angle_sweep: grid_step must be positive");
  }
  std::vector<double> grid;
  for (double angle = 0.0; angle < kTwoPi - 1e-12; angle += grid_step) {
    grid.push_back(angle);
  }
  if (grid.empty()) grid.push_back(0.0);
  const std::size_t g = grid.size();

  // Alice-side angles: the pinned 0 plus the grid (the grid entries serve as
  // a' for chsh and as b-measured-by-alice for bell). Correlations are
  // precomputed once per angle pair; models without a closed form share one
  // node set so every row is built from the same discrete measure.
  std::vector<double> alice_angles;
  alice_angles.push_back(0.0);
  alice_angles.insert(alice_angles.end(), grid.begin(), grid.end());

  const bool direct = source.is_quantum() || source.has_closed_form();
  std::vector<QuadratureNode> nodes;
  if (!direct) nodes = source.nodes_for(spec);

  const std::size_t n_alice = alice_angles.size();
  std::vector<double> e(n_alice * g);
  detail::for_each_chunk(e.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Axis alice_axis = axis_from_planar_angle(alice_angles[idx / g]);
      const Axis bob_axis = axis_from_planar_angle(grid[idx % g]);
      e[idx] = direct ? source.correlate(alice_axis, bob_axis, spec).value()
                      : source.exact_on_nodes(alice_axis, bob_axis, nodes).value();
    }
  });
  auto corr = [&](std::size_t alice_idx, std::size_t bob_idx) {
    return e[alice_idx * g + bob_idx];
  };

  Table table;
  if (functional == FunctionalKind::chsh) {
    table.columns = {"theta_a_deg", "theta_a2_deg", "theta_b_deg", "theta_b2_deg",
                     "s_value", "satisfied"};
    table.rows.reserve(g * g * g);
    for (std::size_t ia2 = 0; ia2 < g; ++ia2) {
      for (std::size_t ib = 0; ib < g; ++ib) {
        for (std::size_t ib2 = 0; ib2 < g; ++ib2) {
          const ChshReport report =
              chsh_functional(corr(0, ib), corr(0, ib2), corr(1 + ia2, ib), corr(1 + ia2, ib2));
          table.rows.push_back({0.0, rad_to_deg(grid[ia2]), rad_to_deg(grid[ib]),
                                rad_to_deg(grid[ib2]), report.s_value,
                                report.satisfied ? 1.0 : 0.0});
        }
      }
    }
    return table;
  }

  table.columns = {"theta_a_deg", "theta_b_deg", "theta_c_deg", "lhs", "rhs", "margin",
                   "satisfied"};
  table.rows.reserve(g * g);
  for (std::size_t ib = 0; ib < g; ++ib) {
    for (std::size_t ic = 0; ic < g; ++ic) {
      const BellReport report = bell_functional(corr(0, ib), corr(0, ic), corr(1 + ib, ic));
      table.rows.push_back({0.0, rad_to_deg(grid[ib]), rad_to_deg(grid[ic]), report.lhs,
                            report.rhs, report.margin, report.satisfied ? 1.0 : 0.0});
    }
  }
  return table;
}

}  // namespace bell_lab
