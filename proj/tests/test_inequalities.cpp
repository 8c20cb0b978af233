// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "bell_lab/inequalities.hpp"

using namespace bell_lab;

namespace {

Axis random_axis(RandomStream& stream) {
  const double z = stream.next_symmetric();
  const double phi = kTwoPi * stream.next_unit();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Axis(r * std::cos(phi), r * std::sin(phi), z);
}

bool has_step(const DerivationAudit& audit, const std::string& name) {
  return std::find(audit.step_names.begin(), audit.step_names.end(), name) !=
         audit.step_names.end();
}

}  // namespace

TEST_CASE("bell_functional arithmetic and validation", "[inequalities]") {
  // Degenerate all-same-axis point: 0 <= 0, satisfied at the boundary.
  const BellReport degenerate = bell_functional(-1.0, -1.0, -1.0);
  CHECK(degenerate.lhs == 0.0);
  CHECK(degenerate.rhs == 0.0);
  CHECK(degenerate.margin == 0.0);
  CHECK(degenerate.satisfied);

  // Quantum values at theta_ab = theta_bc = 45deg, theta_ac = 90deg.
  const double e45 = -std::cos(kPi / 4);
  const BellReport quantum = bell_functional(e45, 0.0, e45);
  CHECK(quantum.lhs == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
  CHECK(quantum.rhs == Catch::Approx(1.0 - std::sqrt(0.5)).margin(1e-12));
  CHECK_FALSE(quantum.satisfied);

  // Sign-sphere values at the same geometry: saturates with margin 0.
  const BellReport sawtooth = bell_functional(-0.5, 0.0, -0.5);
  CHECK(sawtooth.lhs == 0.5);
  CHECK(sawtooth.rhs == 0.5);
  CHECK(sawtooth.satisfied);

  CHECK_THROWS_AS(bell_functional(-1.02, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bell_functional(0.0, 1.5, 0.0), std::invalid_argument);
  CHECK_NOTHROW(bell_functional(1.005, -1.005, 0.0));
}

TEST_CASE("chsh_functional arithmetic and validation", "[inequalities]") {
  const ChshReport boundary = chsh_functional(-1.0, -1.0, -1.0, -1.0);
  CHECK(boundary.s_value == 2.0);
  CHECK(boundary.satisfied);
  CHECK(boundary.margin == 0.0);

  const double q = std::sqrt(0.5);
  const ChshReport quantum = chsh_functional(-q, q, -q, -q);
  CHECK(quantum.s_value == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
  CHECK_FALSE(quantum.satisfied);

  const ChshReport flat = chsh_functional(0.0, 0.0, 0.0, 0.0);
  CHECK(flat.s_value == 0.0);
  CHECK(flat.satisfied);

  CHECK_THROWS_AS(chsh_functional(0.0, 0.0, 0.0, -1.2), std::invalid_argument);
}

TEST_CASE("quantum correlations violate CHSH at the standard angles", "[inequalities]") {
  const Axis a = axis_from_planar_angle(0.0);
  const Axis a2 = axis_from_planar_angle(kPi / 2);
  const Axis b = axis_from_planar_angle(kPi / 4);
  const Axis b2 = axis_from_planar_angle(3 * kPi / 4);
  const ChshReport report =
      chsh_functional(quantum_correlation(a, b), quantum_correlation(a, b2),
                      quantum_correlation(a2, b), quantum_correlation(a2, b2));
  CHECK(report.s_value == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-9));
  CHECK_FALSE(report.satisfied);
}

TEST_CASE("audit_bell_derivation: node-exact identities for the sign-sphere", "[inequalities]") {
  const auto model = make_sign_sphere_model();
  RandomStream stream(61, 0);
  for (int i = 0; i < 10; ++i) {
    const Axis a = random_axis(stream);
    const Axis b = random_axis(stream);
    const Axis c = random_axis(stream);
    const DerivationAudit audit = audit_bell_derivation(model, a, b, c, QuadratureSpec(32, 32));
    REQUIRE(audit.step_names.size() == audit.step_residuals.size());
    REQUIRE(audit.max_residual <= 1e-9);
    REQUIRE(audit.max_residual ==
            *std::max_element(audit.step_residuals.begin(), audit.step_residuals.end()));

    // The inserted unity collapses the four-outcome term to -E(a,c) on the
    // shared nodes.
    const auto nodes = quadrature_nodes_for(model.dist, QuadratureSpec(32, 32));
    const double e_ac = correlation_on_nodes(model, a, c, nodes).value();
    REQUIRE(audit.four_term_value == Catch::Approx(-e_ac).margin(1e-12));
  }
}

TEST_CASE("audit_bell_derivation at the 60/60/120 geometry", "[inequalities]") {
  const auto model = make_sign_sphere_model();
  const Axis a = axis_from_planar_angle(0.0);
  const Axis b = axis_from_planar_angle(kPi / 3);
  const Axis c = axis_from_planar_angle(2 * kPi / 3);
  CHECK(audit_bell_derivation(model, a, b, c).max_residual <= 1e-9);

  // Closed form at this geometry: E(60) = -1/3, E(120) = +1/3; the
  // inequality saturates.
  const double e_ab = model.known_correlation(a, b);
  const double e_ac = model.known_correlation(a, c);
  const double e_bc = model.known_correlation(b, c);
  CHECK(e_ab == Catch::Approx(-1.0 / 3.0).margin(1e-12));
  CHECK(e_ac == Catch::Approx(1.0 / 3.0).margin(1e-12));
  const BellReport report = bell_functional(e_ab, e_ac, e_bc);
  CHECK(report.lhs == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(report.rhs == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(report.satisfied);
  CHECK(std::abs(report.margin) < 1e-12);
}

TEST_CASE("audit_bell_derivation rejects models that break the premise", "[inequalities]") {
  auto model = make_sign_sphere_model();
  model.bob_outcome = model.alice_outcome;  // B = A, not -A
  const Axis a = axis_from_planar_angle(0.1);
  const Axis b = axis_from_planar_angle(0.9);
  const Axis c = axis_from_planar_angle(2.0);
  CHECK_THROWS_AS(audit_bell_derivation(model, a, b, c), PremiseViolationError);
  CHECK_THROWS_WITH(audit_bell_derivation(model, a, b, c),
                    Catch::Matchers::ContainsSubstring("axis") &&
                        Catch::Matchers::ContainsSubstring("lambda"));

  const auto view = signaling_local_view(make_signaling_demo_model(), axis_from_planar_angle(0.0));
  CHECK_THROWS_AS(audit_bell_derivation(view, a, b, c), PremiseViolationError);
}

TEST_CASE("audit_chsh_derivation: node-exact identities, both sign branches", "[inequalities]") {
  const auto noise = make_local_noise_model(1.0);
  RandomStream stream(67, 0);
  for (int i = 0; i < 10; ++i) {
    const Axis a = random_axis(stream);
    const Axis a2 = random_axis(stream);
    const Axis b = random_axis(stream);
    const Axis b2 = random_axis(stream);
    const DerivationAudit audit = audit_chsh_derivation(noise, a, a2, b, b2);
    REQUIRE(audit.max_residual <= 1e-9);
    // The added-zero cross terms must cancel per node, not just on average.
    for (std::size_t s = 0; s < audit.step_names.size(); ++s) {
      if (audit.step_names[s] == "s3_added_zero_cancels_pointwise") {
        REQUIRE(audit.step_residuals[s] <= 1e-12);
      }
    }
    REQUIRE(has_step(audit, "s4_factored_display_plus_branch"));
    REQUIRE(has_step(audit, "s4_factored_display_minus_branch"));
    REQUIRE(has_step(audit, "s6_bound_chain_plus_branch"));
    REQUIRE(has_step(audit, "s6_bound_chain_minus_branch"));

    // Independent oracle for the four-average term: with averages
    // bias*(x.lambda) (sign-flipped on Bob's wing) it is the fourth moment
    // of a uniform sphere direction,
    //   [ (a.a')(b.b') + (a.b)(a'.b') + (a.b')(a'.b) ] / 15.
    const double expected = (dot(a, a2) * dot(b, b2) + dot(a, b) * dot(a2, b2) +
                             dot(a, b2) * dot(a2, b)) / 15.0;
    REQUIRE(audit.four_term_value == Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("audit_chsh_derivation on the lifted sign-sphere", "[inequalities]") {
  const auto model = make_sign_sphere_model();
  const Axis a = axis_from_planar_angle(0.0);
  const Axis a2 = axis_from_planar_angle(kPi / 2);
  const Axis b = axis_from_planar_angle(kPi / 4);
  const Axis b2 = axis_from_planar_angle(3 * kPi / 4);

  // Deterministic models are audited through their lift.
  const DerivationAudit audit = audit_chsh_derivation(model, a, a2, b, b2);
  CHECK(audit.max_residual <= 1e-9);

  // The sawtooth correlation saturates CHSH at the standard angles: the four
  // closed-form correlations are +-1/2 and S = 2 exactly.
  const auto e = [&](const Axis& x, const Axis& y) { return model.known_correlation(x, y); };
  const ChshReport report = chsh_functional(e(a, b), e(a, b2), e(a2, b), e(a2, b2));
  CHECK(report.s_value == Catch::Approx(2.0).margin(1e-12));
  CHECK(report.satisfied);
}

TEST_CASE("audit_chsh_derivation rejects malformed probability tables", "[inequalities]") {
  auto model = make_local_noise_model(1.0);
  model.alice_prob = [](Outcome, const Axis&, const HiddenState&) { return 1.2; };
  const Axis a = axis_from_planar_angle(0.0);
  CHECK_THROWS_AS(audit_chsh_derivation(model, a, a, a, a), ModelInvariantError);
}

TEST_CASE("local models satisfy their inequalities on random settings", "[inequalities]") {
  const auto sphere = make_sign_sphere_model();
  const auto lifted = lift_deterministic(sphere);
  const auto noise = make_local_noise_model(0.85);
  const QuadratureSpec spec(16, 16);
  const auto nodes = sphere_quadrature_nodes(spec);
  RandomStream stream(71, 0);

  for (int i = 0; i < 200; ++i) {
    const Axis a = random_axis(stream);
    const Axis b = random_axis(stream);
    const Axis c = random_axis(stream);
    const BellReport report = bell_functional(
        correlation_on_nodes(sphere, a, b, nodes).value(),
        correlation_on_nodes(sphere, a, c, nodes).value(),
        correlation_on_nodes(sphere, b, c, nodes).value());
    REQUIRE(report.satisfied);
  }

  for (int i = 0; i < 200; ++i) {
    const Axis a = random_axis(stream);
    const Axis a2 = random_axis(stream);
    const Axis b = random_axis(stream);
    const Axis b2 = random_axis(stream);
    for (const StochasticLocalModel* model : {&lifted, &noise}) {
      const ChshReport report = chsh_functional(
          correlation_on_nodes(*model, a, b, nodes).value(),
          correlation_on_nodes(*model, a, b2, nodes).value(),
          correlation_on_nodes(*model, a2, b, nodes).value(),
          correlation_on_nodes(*model, a2, b2, nodes).value());
      REQUIRE(report.satisfied);
    }
  }
}
