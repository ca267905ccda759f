#include <cmath>

#include "doctest.h"
#include "spde/error.hpp"
#include "spde/model.hpp"

using namespace spde;

TEST_CASE("model: default eigenvalues and nominal phi") {
  CHECK(default_lambda(0) == 1.0);
  CHECK(default_lambda(3) == doctest::Approx(std::pow(6.0 * M_PI, 2) / 5.0).epsilon(1e-15));
  CHECK(default_lambda(-3) == default_lambda(3));
  const auto m = default_model(0.25, ReactionKind::Linear);
  CHECK(m.final_time() == 0.5);
  CHECK(m.q(2) == doctest::Approx(0.25 / std::sqrt(default_lambda(2))).epsilon(1e-15));
  CHECK(m.phi_nominal() == 0.5);
  CHECK(default_model(0.5, ReactionKind::Linear).phi_nominal() == 0.75);
  CHECK(default_model(1.0, ReactionKind::Linear).phi_nominal() == doctest::Approx(1.0 - 1e-6));
  CHECK_THROWS_AS(default_model(0.0, ReactionKind::Linear), ConfigError);
}

TEST_CASE("model: reaction names") {
  CHECK(parse_reaction("zero") == ReactionKind::Zero);
  CHECK(parse_reaction("linear") == ReactionKind::Linear);
  CHECK(parse_reaction("trig") == ReactionKind::Trigonometric);
  CHECK(parse_reaction("trigonometric") == ReactionKind::Trigonometric);
  CHECK_THROWS_AS(parse_reaction("cubic"), ConfigError);
}

TEST_CASE("model: validation examples") {
  SUBCASE("b = 1/2, linear: all checks pass and both results apply") {
    const auto r = validate_model(default_model(0.5, ReactionKind::Linear));
    CHECK(r.all_checks_pass());
    CHECK(r.exp_euler_theorem_applies);
    CHECK(r.milstein_theorem_applies);
    CHECK(r.noise_tail_exponent < -1.0);
  }
  SUBCASE("b = 1/4, trig: phi <= 1/2 rules out the Milstein result") {
    const auto r = validate_model(default_model(0.25, ReactionKind::Trigonometric));
    CHECK(r.all_checks_pass());
    CHECK_FALSE(r.milstein_theorem_applies);
    CHECK_FALSE(r.exp_euler_theorem_applies);
    CHECK_FALSE(r.notes.empty());
  }
  SUBCASE("negative eigenvalue") {
    const ModelSpec bad(0.5, 0.25, ReactionKind::Linear,
                        [](std::ptrdiff_t n) { return n == 3 ? -1.0 : default_lambda(n); },
                        [](std::ptrdiff_t) { return 0.1; }, "broken");
    CHECK_THROWS_AS(validate_model(bad), ModelError);
  }
  SUBCASE("negative noise weight") {
    const ModelSpec bad(0.5, 0.25, ReactionKind::Linear, default_lambda,
                        [](std::ptrdiff_t n) { return n == 5 ? -0.1 : 0.1; }, "broken");
    CHECK_THROWS_AS(validate_model(bad), ModelError);
  }
  SUBCASE("non-summable noise is reported") {
    const ModelSpec rough(0.5, 0.25, ReactionKind::Linear, default_lambda,
                          [](std::ptrdiff_t) { return 1.0; }, "white");
    const auto r = validate_model(rough);
    CHECK_FALSE(r.noise_summable);
    CHECK_FALSE(r.all_checks_pass());
  }
}
