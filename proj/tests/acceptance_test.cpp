// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one self-contained check per release criterion, one
// PASS/FAIL line each. Exits non-zero if anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bell_lab/bell_lab.hpp"
#include "bell_lab/cli.hpp"

using namespace bell_lab;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Axis random_axis(RandomStream& stream) {
  const double z = stream.next_symmetric();
  const double phi = kTwoPi * stream.next_unit();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Axis(r * std::cos(phi), r * std::sin(phi), z);
}

std::string fmt(const char* format, auto... values) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, values...);
  return std::string(buffer);
}

const double kTsirelson = 2.0 * std::sqrt(2.0);

// --------------------------------------------------------------------------
// 1. Local bound, exact: 16 CHSH strategies give exactly 2 with a witness.
// --------------------------------------------------------------------------
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  ScenarioSpec scenario{{axis_from_planar_angle(0.0), axis_from_planar_angle(deg_to_rad(90))},
                        {axis_from_planar_angle(deg_to_rad(45)),
                         axis_from_planar_angle(deg_to_rad(135))}};
  const LocalBoundResult result = enumerate_local_bound(scenario, FunctionalKind::chsh);
  const double elapsed = seconds_since(start);

  bool witness_ok = result.argmax.alice_values.size() == 2 &&
                    result.argmax.bob_values.size() == 2 &&
                    evaluate_strategy(FunctionalKind::chsh, result.argmax) == result.max_value;
  for (int v : result.argmax.alice_values) witness_ok = witness_ok && (v == 1 || v == -1);
  for (int v : result.argmax.bob_values) witness_ok = witness_ok && (v == 1 || v == -1);

  const bool ok =
      result.max_value == 2.0 && result.n_strategies == 16 && witness_ok && elapsed < 1.0;
  report(1, ok,
         fmt("local bound = %g over %zu strategies, witness valid, %.3f s (< 1 s)",
             result.max_value, result.n_strategies, elapsed));
}

// --------------------------------------------------------------------------
// 2. Quantum violation: closed form 2*sqrt(2) at the standard angles, and
//    the optimizer recovers it from 10-degree-perturbed starts in < 5 s.
// --------------------------------------------------------------------------
void criterion_2() {
  const Axis a = axis_from_planar_angle(0.0);
  const Axis a2 = axis_from_planar_angle(deg_to_rad(90));
  const Axis b = axis_from_planar_angle(deg_to_rad(45));
  const Axis b2 = axis_from_planar_angle(deg_to_rad(135));
  const ChshReport closed =
      chsh_functional(quantum_correlation(a, b), quantum_correlation(a, b2),
                      quantum_correlation(a2, b), quantum_correlation(a2, b2));
  const bool closed_ok = std::abs(closed.s_value - kTsirelson) <= 1e-9 && !closed.satisfied;

  const auto start = std::chrono::steady_clock::now();
  bool optimizer_ok = true;
  double worst = 0.0;
  const double perturbations[][4] = {{10, 10, 10, 10},  {-10, -10, -10, -10},
                                     {10, -10, 10, -10}, {-10, 10, 10, -10},
                                     {10, 10, -10, -10}};
  for (const auto& p : perturbations) {
    ScenarioSpec initial{{axis_from_planar_angle(deg_to_rad(0 + p[0])),
                          axis_from_planar_angle(deg_to_rad(90 + p[1]))},
                         {axis_from_planar_angle(deg_to_rad(45 + p[2])),
                          axis_from_planar_angle(deg_to_rad(135 + p[3]))}};
    const OptimizeResult result = optimize_quantum_chsh(initial, 200000);
    const double error = std::abs(result.s_value - kTsirelson);
    worst = std::max(worst, error);
    optimizer_ok = optimizer_ok && result.converged && error <= 1e-6 &&
                   result.s_value <= kTsirelson + 1e-9;
  }
  const double elapsed = seconds_since(start);
  const bool ok = closed_ok && optimizer_ok && elapsed < 5.0;
  report(2, ok,
         fmt("closed form S = %.9f (|err| <= 1e-9), optimizer worst error %.2e from 5 "
             "perturbed starts in %.2f s (< 5 s)",
             closed.s_value, worst, elapsed));
}

// --------------------------------------------------------------------------
// 3. Original violation geometry: quantum violates, the sign-sphere model
//    saturates. Values via the closed forms at 1e-9; margin and verdict on
//    the shared-node quadrature path at 1e-6.
// --------------------------------------------------------------------------
void criterion_3() {
  const Axis a = axis_from_planar_angle(0.0);
  const Axis b = axis_from_planar_angle(deg_to_rad(45));
  const Axis c = axis_from_planar_angle(deg_to_rad(90));

  const BellReport quantum = bell_functional(
      quantum_correlation(a, b), quantum_correlation(a, c), quantum_correlation(b, c));
  const bool quantum_ok = std::abs(quantum.lhs - std::sqrt(0.5)) <= 1e-9 &&
                          std::abs(quantum.rhs - (1.0 - std::sqrt(0.5))) <= 1e-9 &&
                          !quantum.satisfied;

  const auto model = make_sign_sphere_model();
  const BellReport closed = bell_functional(model.known_correlation(a, b),
                                            model.known_correlation(a, c),
                                            model.known_correlation(b, c));
  const bool closed_ok = std::abs(closed.lhs - 0.5) <= 1e-9 &&
                         std::abs(closed.rhs - 0.5) <= 1e-9 &&
                         std::abs(closed.margin) <= 1e-9 && closed.satisfied;

  const auto nodes = sphere_quadrature_nodes(QuadratureSpec(64, 64));
  const BellReport quad = bell_functional(
      correlation_on_nodes(model, a, b, nodes).value(),
      correlation_on_nodes(model, a, c, nodes).value(),
      correlation_on_nodes(model, b, c, nodes).value(), kQuadratureTol);
  const bool quad_ok = quad.satisfied && std::abs(quad.margin) <= 1e-6;

  report(3, quantum_ok && closed_ok && quad_ok,
         fmt("quantum LHS %.6f / RHS %.6f VIOLATED; sign-sphere LHS %.6f / RHS %.6f margin "
             "%.1e SATISFIED (closed form), quadrature margin %.1e",
             quantum.lhs, quantum.rhs, closed.lhs, closed.rhs, closed.margin, quad.margin));
}

// --------------------------------------------------------------------------
// 4. Locality implies the bounds: 200 random stochastic models satisfy CHSH
//    and 200 random anti-correlated deterministic models satisfy the
//    three-correlation inequality, all via correlation_exact, in < 60 s.
// --------------------------------------------------------------------------
StochasticLocalModel random_stochastic_model(RandomStream& stream) {
  // P(+1 | x, lambda) = (1 + b (x.lambda) + c (x.v)(w.lambda)) / 2 with
  // |b| + |c| <= 1 keeps the table in [0, 1]. Bob gets his own parameters.
  struct Wing {
    double b, c;
    Axis v, w;
  };
  auto wing = [&stream]() {
    const double b = stream.next_symmetric();
    const double c = (1.0 - std::abs(b)) * stream.next_symmetric();
    return Wing{b, c, random_axis(stream), random_axis(stream)};
  };
  auto table = [](Wing p) {
    return [p](Outcome o, const Axis& x, const HiddenState& lambda) {
      const double mean = p.b * dot(x, lambda) + p.c * dot(x, p.v) * dot(p.w, lambda);
      return 0.5 * (1.0 + o.value() * mean);
    };
  };
  return StochasticLocalModel{"random_stochastic", uniform_sphere_distribution(), table(wing()),
                              table(wing()), nullptr};
}

DeterministicLocalModel random_anticorrelated_model(RandomStream& stream) {
  // A(x, lambda) = sign(x . T lambda) for a random positive-definite-ish
  // stretch T = I + alpha v v^T + beta w w^T; B = -A by construction.
  const Axis v = random_axis(stream);
  const Axis w = random_axis(stream);
  const double alpha = -0.8 + 2.8 * stream.next_unit();
  const double beta = -0.8 + 2.8 * stream.next_unit();
  auto transform = [v, w, alpha, beta](const HiddenState& lambda) {
    const double lv = v.x() * lambda[0] + v.y() * lambda[1] + v.z() * lambda[2];
    const double lw = w.x() * lambda[0] + w.y() * lambda[1] + w.z() * lambda[2];
    return HiddenState{{lambda[0] + alpha * v.x() * lv + beta * w.x() * lw,
                        lambda[1] + alpha * v.y() * lv + beta * w.y() * lw,
                        lambda[2] + alpha * v.z() * lv + beta * w.z() * lw}};
  };
  auto alice = [transform](const Axis& x, const HiddenState& lambda) {
    return Outcome(sign_of(dot(x, transform(lambda))));
  };
  auto bob = [alice](const Axis& x, const HiddenState& lambda) { return -alice(x, lambda); };
  return DeterministicLocalModel{"random_deterministic", uniform_sphere_distribution(), alice,
                                 bob, true, nullptr};
}

void criterion_4() {
  const auto start = std::chrono::steady_clock::now();
  const QuadratureSpec spec(32, 32);
  RandomStream stream(20260811, 0);

  int chsh_ok = 0;
  double worst_s = 0.0;
  for (int i = 0; i < 200; ++i) {
    // Three sub-families: biased-coin tables, two-parameter tables, and
    // point-mass lifts of random deterministic models. The lifts push S all
    // the way to the boundary.
    const StochasticLocalModel model =
        (i % 3 == 0) ? make_local_noise_model(stream.next_symmetric())
        : (i % 3 == 1) ? random_stochastic_model(stream)
                       : lift_deterministic(random_anticorrelated_model(stream));
    const Axis a = random_axis(stream), a2 = random_axis(stream);
    const Axis b = random_axis(stream), b2 = random_axis(stream);
    const ChshReport report = chsh_functional(
        correlation_exact(model, a, b, spec).value(),
        correlation_exact(model, a, b2, spec).value(),
        correlation_exact(model, a2, b, spec).value(),
        correlation_exact(model, a2, b2, spec).value(), 1e-6);
    worst_s = std::max(worst_s, report.s_value);
    if (report.satisfied) ++chsh_ok;
  }

  int bell_ok = 0;
  double worst_margin = 1e9;
  for (int i = 0; i < 200; ++i) {
    const DeterministicLocalModel model = random_anticorrelated_model(stream);
    const Axis a = random_axis(stream), b = random_axis(stream), c = random_axis(stream);
    const BellReport report = bell_functional(
        correlation_exact(model, a, b, spec).value(),
        correlation_exact(model, a, c, spec).value(),
        correlation_exact(model, b, c, spec).value(), 1e-6);
    worst_margin = std::min(worst_margin, report.margin);
    if (report.satisfied) ++bell_ok;
  }

  const double elapsed = seconds_since(start);
  const bool ok = chsh_ok == 200 && bell_ok == 200 && elapsed < 60.0;
  report(4, ok,
         fmt("CHSH satisfied %d/200 (max S %.6f), three-correlation satisfied %d/200 (min "
             "margin %.1e), %.1f s (< 60 s)",
             chsh_ok, worst_s, bell_ok, worst_margin, elapsed));
}

// --------------------------------------------------------------------------
// 5. Derivation audits: residuals <= 1e-9 on shared nodes for 50 random
//    setting tuples per audit, four-outcome and four-average terms included.
// --------------------------------------------------------------------------
void criterion_5() {
  RandomStream stream(555, 0);
  const auto sphere = make_sign_sphere_model();
  const auto lifted = lift_deterministic(sphere);
  const auto noise = make_local_noise_model(1.0);

  double worst_bell = 0.0, worst_chsh = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Axis a = random_axis(stream), b = random_axis(stream), c = random_axis(stream);
    worst_bell = std::max(worst_bell, audit_bell_derivation(sphere, a, b, c).max_residual);
  }
  for (int i = 0; i < 50; ++i) {
    const Axis a = random_axis(stream), a2 = random_axis(stream);
    const Axis b = random_axis(stream), b2 = random_axis(stream);
    worst_chsh =
        std::max(worst_chsh, audit_chsh_derivation(lifted, a, a2, b, b2).max_residual);
    worst_chsh =
        std::max(worst_chsh, audit_chsh_derivation(noise, a, a2, b, b2).max_residual);
  }
  const bool ok = worst_bell <= 1e-9 && worst_chsh <= 1e-9;
  report(5, ok,
         fmt("max residual over 50 tuples: bell audit %.1e, chsh audits %.1e (bound 1e-9)",
             worst_bell, worst_chsh));
}

// --------------------------------------------------------------------------
// 6. Estimator correctness: closed-form coverage at 1e6 samples for 20
//    random angles, seed coverage >= 99/100, and 1/sqrt(n) error scaling.
// --------------------------------------------------------------------------
void criterion_6() {
  const auto model = make_sign_sphere_model();
  const Axis z = axis_from_planar_angle(0.0);
  RandomStream angle_stream(606, 0);

  int inside = 0;
  for (int i = 0; i < 20; ++i) {
    const double theta = kPi * angle_stream.next_unit();
    const Axis b = axis_from_planar_angle(theta);
    const auto est = correlation_mc(model, z, b, 1000000, 7000 + i);
    const double truth = -1.0 + 2.0 * theta / kPi;
    if (std::abs(est.value() - truth) <= kMonteCarloSigmas * est.stderr_value()) ++inside;
  }

  const Axis fixed = axis_from_planar_angle(kPi / 3);
  const double truth = -1.0 / 3.0;
  int covered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto est = correlation_mc(model, z, fixed, 100000, static_cast<std::uint64_t>(seed));
    if (std::abs(est.value() - truth) <= kMonteCarloSigmas * est.stderr_value()) ++covered;
  }

  const Table scan = mc_convergence_scan(model, z, fixed, {250000, 1000000}, 31337);
  const double ratio = scan.rows[1][2] / scan.rows[0][2];
  const bool scaling_ok = ratio >= 0.25 && ratio <= 0.75;

  const bool ok = inside == 20 && covered >= 99 && scaling_ok;
  report(6, ok,
         fmt("20/20 within 5 stderr: %s (%d), seed coverage %d/100 (>= 99), stderr ratio at "
             "4x samples %.3f (in [0.25, 0.75])",
             inside == 20 ? "yes" : "no", inside, covered, ratio));
}

// --------------------------------------------------------------------------
// 7. Perfect anti-correlation on equal axes: exact -1 with zero stderr for
//    the sign-sphere under Monte Carlo, -1 within 1e-9 for the quantum
//    closed form, over 20 random axes.
// --------------------------------------------------------------------------
void criterion_7() {
  const auto model = make_sign_sphere_model();
  RandomStream stream(707, 0);
  bool mc_exact = true, quantum_ok = true;
  for (int i = 0; i < 20; ++i) {
    const Axis axis = random_axis(stream);
    const auto est = correlation_mc(model, axis, axis, 10000, 900 + i);
    mc_exact = mc_exact && est.value() == -1.0 && est.stderr_value() == 0.0;
    quantum_ok = quantum_ok && std::abs(quantum_correlation(axis, axis) + 1.0) <= 1e-9;
  }
  report(7, mc_exact && quantum_ok,
         fmt("sign-sphere MC exactly -1 with stderr 0: %s; quantum closed form within 1e-9: %s",
             mc_exact ? "yes" : "no", quantum_ok ? "yes" : "no"));
}

// --------------------------------------------------------------------------
// 8. Reproducibility: identical config and seed give byte-identical CSV,
//    independent of BELL_LAB_WORKERS.
// --------------------------------------------------------------------------
std::string run_to_csv(const std::vector<std::string>& args, const std::string& path) {
  auto config = cli::parse_config(args);
  config.output_path = path;
  std::ostringstream sink;
  std::streambuf* saved = std::cout.rdbuf(sink.rdbuf());
  const int status = cli::run(config);
  std::cout.rdbuf(saved);
  if (status != 0) return "RUN FAILED";
  std::ifstream in(path, std::ios::binary);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return bytes.str();
}

void criterion_8() {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "bell_lab_acceptance.csv").string();
  const std::vector<std::vector<std::string>> commands = {
      {"chsh", "--model", "quantum_singlet", "--angles", "0,90,45,135"},
      {"mc-scan", "--model", "sign_sphere", "--angles", "0,60", "--n", "65536", "--seed", "3"},
      {"correlate", "--model", "local_noise", "--angles", "10,70", "--n", "100000"},
  };
  bool ok = true;
  for (const auto& args : commands) {
    setenv("BELL_LAB_WORKERS", "1", 1);
    const std::string serial = run_to_csv(args, path);
    setenv("BELL_LAB_WORKERS", "4", 1);
    const std::string threaded = run_to_csv(args, path);
    unsetenv("BELL_LAB_WORKERS");
    const std::string automatic = run_to_csv(args, path);
    const std::string rerun = run_to_csv(args, path);
    ok = ok && serial != "RUN FAILED" && serial == threaded && serial == automatic &&
         serial == rerun;
  }
  fs::remove(path);
  report(8, ok, std::string("byte-identical CSV across reruns and worker counts: ") +
                    (ok ? "yes" : "no"));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0) {
    std::printf("acceptance: all 8 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
