#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spde/error.hpp"
#include "spde/noise.hpp"
#include "spde/solvers.hpp"

using namespace spde;

namespace {

ModelSpec single_mode(double lam, ReactionKind r) {
  return ModelSpec(0.5, 0.25, r, [lam](std::ptrdiff_t) { return lam; }, [](std::ptrdiff_t) { return 0.0; },
                   "single");
}

double one_step(SchemeKind s, double lam, ReactionKind r, double dt) {
  const auto m = single_mode(lam, r);
  PathState st{SpectralField(2), 0, dt, s};
  st.field.set_mode(0, 1.0);
  const auto next = step(st, m, SpectralField(2));
  CHECK(next.j == 1);
  return next.field.mode(0).real();
}

}  // namespace

TEST_CASE("solvers: single-step examples") {
  CHECK(one_step(SchemeKind::ExpEuler, 1.0, ReactionKind::Zero, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(one_step(SchemeKind::ExpEuler, 2.0, ReactionKind::Linear, 0.5) ==
        doctest::Approx(std::exp(-1.0) + (1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-14));
  CHECK(one_step(SchemeKind::ExpEuler, 2.0, ReactionKind::Linear, 0.5) == doctest::Approx(0.683940).epsilon(1e-6));
  CHECK(one_step(SchemeKind::Milstein, 2.0, ReactionKind::Linear, 0.5) == doctest::Approx(0.551819).epsilon(1e-6));
  CHECK(one_step(SchemeKind::DriftExpEuler, 2.0, ReactionKind::Linear, 0.5) == doctest::Approx(0.683940).epsilon(1e-6));

  PathState st{SpectralField(4), 0, 0.1, SchemeKind::ExpEuler};
  CHECK_THROWS_AS(step(st, single_mode(1.0, ReactionKind::Linear), SpectralField(8)), UsageError);
}

TEST_CASE("solvers: drift-exponential and Milstein coincide without reaction") {
  const auto m = default_model(0.25, ReactionKind::Zero);
  const NoiseStreamKey key{4, 0, 1, StreamRole::Estimator};
  const auto a = solve_path(m, SchemeKind::DriftExpEuler, 64, 32, key);
  const auto b = solve_path(m, SchemeKind::Milstein, 64, 32, key);
  CHECK(h_norm(a - b) <= 1e-15);
}

TEST_CASE("solvers: one step path equals step()") {
  const auto m = default_model(0.5, ReactionKind::Trigonometric);
  const NoiseStreamKey key{9, 0, 0, StreamRole::Estimator};
  for (SchemeKind s : kAllSchemes) {
    IncrementGenerator gen(m, s, 16, m.final_time());
    SpectralField noise(16);
    gen.generate(key, 0, noise.dofs());
    const auto direct = step({triangular_wave_coefficients(16), 0, m.final_time(), s}, m, noise);
    CHECK(solve_path(m, s, 16, 1, key) == direct.field);
  }
}

TEST_CASE("solvers: deterministic recursions") {
  const auto lin = default_model(0.25, ReactionKind::Linear);
  const std::size_t J = 37;
  const double dt = 0.5 / J;
  const auto v = solve_deterministic(lin, 16, J);
  for (std::ptrdiff_t n = -8; n < 8; ++n) {
    const double l = oracle::lambda(n);
    const double factor = std::exp(-l * dt) + (1.0 - std::exp(-l * dt)) / l;
    const double expect = oracle::u0_mode(n) * std::pow(factor, static_cast<double>(J));
    CHECK(std::abs(v.mode(n).real() - expect) <= 1e-12 * std::max(1e-3, std::abs(expect)));
    CHECK(v.mode(n).imag() == 0.0);
  }
  const auto zero = solve_deterministic(default_model(0.25, ReactionKind::Zero), 16, 10);
  for (std::ptrdiff_t n = -8; n < 8; ++n) {
    const double expect = oracle::u0_mode(n) * std::exp(-oracle::lambda(n) * 0.5);
    CHECK(zero.mode(n).real() == doctest::Approx(expect).epsilon(1e-13).scale(1e-300));
  }
}

TEST_CASE("solvers: linear reference is converged in time") {
  const auto m = default_model(0.25, ReactionKind::Linear);
  const auto a = solve_deterministic(m, 1024, std::size_t{1} << 14);
  const auto b = solve_deterministic(m, 1024, std::size_t{1} << 15);
  CHECK(h_norm(a - b) <= 1e-6);
}

TEST_CASE("solvers: exponential Euler reproduces the OU law for any J") {
  const double b = 0.25, T = 0.5;
  const auto m = default_model(b, ReactionKind::Zero);
  const std::size_t N = 8, paths = 10000;
  for (std::size_t J : {1u, 4u, 64u}) {
    PathSolver solver(m, SchemeKind::ExpEuler, N, J);
    std::vector<double> sum(N + 2, 0.0), sum_sq(N + 2, 0.0);
    for (std::size_t i = 0; i < paths; ++i) {
      const auto& v = solver.solve({31, 0, i, StreamRole::Estimator});
      const auto d = v.dofs();
      for (std::size_t k = 0; k < N + 2; ++k) {
        sum[k] += d[k];
        sum_sq[k] += d[k] * d[k];
      }
    }
    for (std::size_t k = 0; k <= N / 2; ++k) {
      const auto n = static_cast<std::ptrdiff_t>(k);
      const double total = oracle::ou_variance(oracle::lambda(n), oracle::q(n, b), T);
      const double var = (k == 0) ? total : total / 2.0;  // per real part
      const double mean = oracle::u0_mode(n) * std::exp(-oracle::lambda(n) * T);
      const double m_hat = sum[2 * k] / paths;
      const double v_hat = (sum_sq[2 * k] - paths * m_hat * m_hat) / (paths - 1);
      CHECK(std::abs(m_hat - mean) <= 4.0 * std::sqrt(var / paths));
      CHECK(std::abs(v_hat - var) <= 4.0 * var * std::sqrt(2.0 / paths));
    }
  }
}

TEST_CASE("solvers: coupled pairs") {
  const auto zero = default_model(0.25, ReactionKind::Zero);
  const NoiseStreamKey key{12, 3, 7, StreamRole::Estimator};

  SUBCASE("level 0 has a zero coarse member") {
    const auto [f, c] = solve_coupled_pair(zero, SchemeKind::ExpEuler, {16, 8, 0, 0}, key);
    CHECK(c == SpectralField(16));
    CHECK(h_norm(f) > 0.0);
  }
  SUBCASE("resolution checks") {
    CHECK_THROWS_AS(solve_coupled_pair(zero, SchemeKind::ExpEuler, {16, 8, 16, 8}, key), UsageError);
    CHECK_THROWS_AS(solve_coupled_pair(zero, SchemeKind::ExpEuler, {16, 8, 32, 4}, key), UsageError);
  }
  SUBCASE("drift-exponential one coarse step: difference is (1 - a) R_1") {
    const std::size_t N = 16;
    const auto m = default_model(0.5, ReactionKind::Zero);
    const auto [f, c] = solve_coupled_pair(m, SchemeKind::DriftExpEuler, {N, 2, N, 1}, key);
    IncrementGenerator gen(m, SchemeKind::DriftExpEuler, N, 0.25);
    std::vector<double> r1(N + 2);
    gen.generate(key, 1, r1);
    const SpectralField diff = f - c;
    const auto df = diff.dofs();
    for (std::size_t k = 0; k < N + 1; ++k) {
      const auto n = static_cast<std::ptrdiff_t>(k / 2);
      const double expect = (1.0 - std::exp(-oracle::lambda(n) * 0.25)) * r1[k];
      CHECK(df[k] == doctest::Approx(expect).epsilon(1e-12).scale(1e-14));
    }
  }
  SUBCASE("SDC: exponential Euler coarse path tracks the projected fine path") {
    double worst = 0.0;
    solve_coupled_pair(zero, SchemeKind::ExpEuler, {64, 64, 32, 32}, key, nullptr,
                       [&](const CoupledStepView& s) {
                         worst = std::max(worst, h_norm(project(s.fine, 32) - s.coarse));
                       });
    CHECK(worst <= 1e-12 * h_norm(triangular_wave_coefficients(64)));
  }
}

TEST_CASE("solvers: operation counts follow the cost model") {
  const NoiseStreamKey key{1, 0, 0, StreamRole::Estimator};
  for (ReactionKind r : {ReactionKind::Linear, ReactionKind::Trigonometric, ReactionKind::Zero}) {
    const auto m = default_model(0.25, r);
    for (std::size_t N : {16u, 256u}) {
      OpCounter ops;
      solve_path(m, SchemeKind::Milstein, N, 32, key, &ops);
      const double ratio = static_cast<double>(ops.total()) / path_cost_model(N, 32, r);
      CHECK(ratio >= 0.5);
      CHECK(ratio <= 2.0);
    }
  }
}
