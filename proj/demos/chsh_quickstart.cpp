// SPDX-License-Identifier: Apache-2.0
//
// Smallest useful tour: the local bound by enumeration, the quantum value
// at the standard angles, and what a concrete hidden-variable model does
// at the same settings.

#include <cstdio>

#include "bell_lab/bell_lab.hpp"

int main() {
  using namespace bell_lab;

  const Axis a = axis_from_planar_angle(0.0);
  const Axis a2 = axis_from_planar_angle(deg_to_rad(90.0));
  const Axis b = axis_from_planar_angle(deg_to_rad(45.0));
  const Axis b2 = axis_from_planar_angle(deg_to_rad(135.0));

  const ScenarioSpec scenario{{a, a2}, {b, b2}};
  const auto bound = enumerate_local_bound(scenario, FunctionalKind::chsh);
  std::printf("local bound over %zu strategies: %.1f\n", bound.n_strategies, bound.max_value);

  const ChshReport quantum = chsh_functional(
      quantum_correlation(a, b), quantum_correlation(a, b2),
      quantum_correlation(a2, b), quantum_correlation(a2, b2));
  std::printf("quantum singlet at (0, 90, 45, 135) deg: S = %.8f\n", quantum.s_value);

  const auto model = make_sign_sphere_model();
  const auto e = [&](const Axis& x, const Axis& y) { return model.known_correlation(x, y); };
  const ChshReport lhv = chsh_functional(e(a, b), e(a, b2), e(a2, b), e(a2, b2));
  std::printf("sign-sphere model at the same settings: S = %.8f (%s)\n", lhv.s_value,
              lhv.satisfied ? "satisfied" : "violated");

  const auto mc = correlation_mc(model, a, b, 200000, /*seed=*/42);
  std::printf("sign-sphere E(a,b): monte carlo %.4f +/- %.4f, closed form %.4f\n", mc.value(),
              mc.stderr_value(), e(a, b));
  return 0;
}
