#pragma once

#include <cstdint>

#include "spde/model.hpp"
#include "spde/spectral.hpp"
#include "spde/transform.hpp"

namespace spde {

/// Hardware-independent operation tally.
///
/// A Gaussian draw counts one unit and so does the update of one real degree of
/// freedom (scaling, decay and drift combined). A grid transform pair of length N
/// counts 5 N log2(N) units and each pointwise map application one unit.
struct OpCounter {
  std::uint64_t arithmetic = 0;
  std::uint64_t gaussian_draws = 0;
  std::uint64_t transform = 0;
  std::uint64_t pointwise = 0;

  std::uint64_t total() const noexcept { return arithmetic + gaussian_draws + transform + pointwise; }

  OpCounter& operator+=(const OpCounter& o) noexcept {
    arithmetic += o.arithmetic;
    gaussian_draws += o.gaussian_draws;
    transform += o.transform;
    pointwise += o.pointwise;
    return *this;
  }
};

/// Units charged for one forward/backward transform pair of length n.
std::uint64_t transform_pair_units(std::size_t n) noexcept;

/// Pointwise map g of the Nemytskii operator f(U)(x) = g(U(x)).
double reaction_map(ReactionKind kind, double u) noexcept;

/// Lipschitz constant of the pointwise map.
double reaction_lipschitz(ReactionKind kind) noexcept;

/// Evaluates f_N(v) = P_N g(v) through the grid (no dealiasing).
class ReactionEvaluator {
 public:
  ReactionEvaluator(ReactionKind kind, std::size_t n_modes);

  ReactionKind kind() const noexcept { return kind_; }
  std::size_t n_modes() const noexcept { return transform_.size(); }

  void evaluate(const SpectralField& v, SpectralField& out, OpCounter* ops = nullptr);

 private:
  ReactionKind kind_;
  GridTransform transform_;
};

SpectralField eval_fN(const SpectralField& v, ReactionKind kind, OpCounter* ops = nullptr);

}  // namespace spde
