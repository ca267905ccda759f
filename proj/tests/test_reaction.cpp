#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spde/reaction.hpp"
#include "spde/spectral.hpp"
#include "spde/transform.hpp"

using namespace spde;

namespace {

SpectralField smooth_field(std::size_t n, std::mt19937_64& rng, double amp) {
  std::normal_distribution<double> g;
  SpectralField v(n);
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n / 2); ++k) {
    const double s = amp / (1.0 + static_cast<double>(k * k));
    v.set_mode(k, {s * g(rng), k == 0 ? 0.0 : s * g(rng)});
  }
  return v;
}

}  // namespace

TEST_CASE("reaction: pointwise map examples") {
  std::mt19937_64 rng(1);
  const auto v = smooth_field(32, rng, 1.0);

  CHECK(eval_fN(v, ReactionKind::Zero) == SpectralField(32));

  const auto lin = eval_fN(v, ReactionKind::Linear);
  for (std::ptrdiff_t n = -16; n < 16; ++n) CHECK(std::abs(lin.mode(n) - v.mode(n)) <= 1e-12);

  const auto t0 = eval_fN(SpectralField(16), ReactionKind::Trigonometric);
  CHECK(t0.mode(0).real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(h_norm(t0 - pad(project(t0, 2), 16)) <= 1e-14);

  SpectralField quarter(16);
  quarter.set_mode(0, 0.25);
  const auto tq = eval_fN(quarter, ReactionKind::Trigonometric);
  CHECK(tq.mode(0).real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(tq.mode(3)) <= 1e-14);
}

TEST_CASE("reaction: output is a canonical real field") {
  std::mt19937_64 rng(2);
  const auto v = smooth_field(64, rng, 0.7);
  const auto f = eval_fN(v, ReactionKind::Trigonometric);
  CHECK(f.stored()[0].imag() == 0.0);
  CHECK(f.stored()[32].imag() == 0.0);
  // grid values of the projected map agree with the map at the nodes
  const auto g = to_grid(v);
  const auto fg = to_grid(f);
  for (std::size_t k = 0; k < 64; ++k)
    CHECK(fg[k] == doctest::Approx(reaction_map(ReactionKind::Trigonometric, g[k])).epsilon(1e-12).scale(1.0));
}

TEST_CASE("reaction: Lipschitz bound on random smooth fields") {
  std::mt19937_64 rng(3);
  for (ReactionKind kind : {ReactionKind::Linear, ReactionKind::Trigonometric}) {
    const double L = reaction_lipschitz(kind);
    for (int t = 0; t < 40; ++t) {
      const auto u = smooth_field(64, rng, 0.5);
      const auto v = u + smooth_field(64, rng, 0.05);
      const double lhs = h_norm(eval_fN(u, kind) - eval_fN(v, kind));
      CHECK(lhs <= (L + 0.1) * h_norm(u - v));
    }
  }
  CHECK(reaction_lipschitz(ReactionKind::Trigonometric) == doctest::Approx(4.0 * std::sqrt(2.0) * std::numbers::pi));
}

TEST_CASE("reaction: operation counts grow like N log N") {
  for (std::size_t n : {16u, 256u, 1024u}) {
    OpCounter ops;
    eval_fN(SpectralField(n), ReactionKind::Linear, &ops);
    const auto lg = static_cast<std::uint64_t>(std::log2(static_cast<double>(n)));
    CHECK(ops.pointwise == n);
    CHECK(ops.transform == 5 * n * lg);
  }
  OpCounter a, b;
  eval_fN(SpectralField(256), ReactionKind::Trigonometric, &a);
  eval_fN(SpectralField(512), ReactionKind::Trigonometric, &b);
  const double ratio = static_cast<double>(b.total()) / static_cast<double>(a.total());
  CHECK(ratio >= 1.8);
  CHECK(ratio <= 2.5);
  OpCounter z;
  eval_fN(SpectralField(256), ReactionKind::Zero, &z);
  CHECK(z.total() == 0);
}
