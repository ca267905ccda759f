#include "spde/reaction.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace spde {

std::uint64_t transform_pair_units(std::size_t n) noexcept {
  if (n < 2) return 0;
  const auto log2n = static_cast<std::uint64_t>(std::bit_width(n) - 1);
  return 5 * static_cast<std::uint64_t>(n) * log2n;
}

double reaction_map(ReactionKind kind, double u) noexcept {
  switch (kind) {
    case ReactionKind::Zero: return 0.0;
    case ReactionKind::Linear: return u;
    case ReactionKind::Trigonometric: {
      const double a = 2.0 * std::numbers::pi * u;
      return 2.0 * (std::sin(a) + std::cos(a));
    }
  }
  return 0.0;
}

double reaction_lipschitz(ReactionKind kind) noexcept {
  switch (kind) {
    case ReactionKind::Zero: return 0.0;
    case ReactionKind::Linear: return 1.0;
    case ReactionKind::Trigonometric: return 4.0 * std::numbers::sqrt2 * std::numbers::pi;
  }
  return 0.0;
}

ReactionEvaluator::ReactionEvaluator(ReactionKind kind, std::size_t n_modes)
    : kind_(kind), transform_(n_modes) {}

void ReactionEvaluator::evaluate(const SpectralField& v, SpectralField& out, OpCounter* ops) {
  const std::size_t n = transform_.size();
  if (kind_ == ReactionKind::Zero) {
    if (out.n_modes() != n) out = SpectralField(n);
    out.set_zero();
    return;
  }
  auto grid = transform_.to_grid_buffer(v);
  if (kind_ == ReactionKind::Trigonometric) {
    for (double& g : grid) g = reaction_map(ReactionKind::Trigonometric, g);
  }
  transform_.from_grid_buffer(out);
  if (ops) {
    ops->pointwise += n;
    ops->transform += transform_pair_units(n);
  }
}

SpectralField eval_fN(const SpectralField& v, ReactionKind kind, OpCounter* ops) {
  ReactionEvaluator eval(kind, v.n_modes());
  SpectralField out(v.n_modes());
  eval.evaluate(v, out, ops);
  return out;
}

}  // namespace spde
