#include "spde/solvers.hpp"

#include <cmath>
#include <string>

#include "spde/error.hpp"
#include "spde/simd/kernels.hpp"

namespace spde {

StepOperator::StepOperator(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes, double dt)
    : scheme_(scheme),
      n_modes_(n_modes),
      dt_(dt),
      reaction_(m.reaction()),
      evaluator_(m.reaction(), n_modes),
      drift_(n_modes) {
  if (!(dt > 0.0)) throw UsageError("time step must be positive");
  decay_ = dof_profile(n_modes, 0.0, [&](std::ptrdiff_t n) { return std::exp(-m.lambda(n) * dt); });
  phi1_ = dof_profile(n_modes, 0.0, [&](std::ptrdiff_t n) {
    const double l = m.lambda(n);
    return -std::expm1(-l * dt) / l;
  });
}

void StepOperator::apply(SpectralField& v, std::span<const double> noise, OpCounter* ops) {
  if (v.n_modes() != n_modes_ || noise.size() != n_modes_ + 2)
    throw UsageError("step expects " + std::to_string(n_modes_) + " modes, got field of " +
                     std::to_string(v.n_modes()) + " and noise of " +
                     std::to_string(noise.size()) + " dofs");
  const auto& k = simd::kernels();
  if (reaction_ == ReactionKind::Zero) {
    k.decay_update(v.dofs(), decay_, noise);
  } else {
    evaluator_.evaluate(v, drift_, ops);
    if (scheme_ == SchemeKind::Milstein)
      k.milstein_update(v.dofs(), decay_, dt_, drift_.dofs(), noise);
    else
      k.exp_update(v.dofs(), decay_, phi1_, drift_.dofs(), noise);
  }
  if (ops) ops->arithmetic += n_modes_;
}

PathState step(const PathState& state, const ModelSpec& m, const SpectralField& noise,
               OpCounter* ops) {
  if (noise.n_modes() != state.field.n_modes())
    throw UsageError("noise and state have different mode counts");
  StepOperator op(m, state.scheme, state.field.n_modes(), state.dt);
  PathState next = state;
  op.apply(next.field, noise.dofs(), ops);
  ++next.j;
  return next;
}

namespace {
void require_steps(std::size_t n_steps) {
  if (n_steps == 0) throw ConfigError("number of time steps must be at least 1");
  if (n_steps > (std::size_t{1} << 31)) throw ConfigError("number of time steps exceeds 2^31");
}
}  // namespace

SpectralField solve_path_driven(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                                std::size_t n_steps, const IncrementSource& source,
                                OpCounter* ops) {
  require_steps(n_steps);
  const double dt = m.final_time() / static_cast<double>(n_steps);
  StepOperator op(m, scheme, n_modes, dt);
  SpectralField v = triangular_wave_coefficients(n_modes);
  std::vector<double> noise(n_modes + 2, 0.0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    source(k, noise);
    op.apply(v, noise, ops);
  }
  return v;
}

SpectralField solve_path(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                         std::size_t n_steps, const NoiseStreamKey& key, OpCounter* ops) {
  PathSolver solver(m, scheme, n_modes, n_steps);
  return solver.solve(key, ops);
}

SpectralField solve_deterministic(const ModelSpec& m, std::size_t n_modes, std::size_t n_steps,
                                  SchemeKind scheme) {
  return solve_path_driven(m, scheme, n_modes, n_steps,
                           [](std::size_t, std::span<double> dofs) {
                             std::fill(dofs.begin(), dofs.end(), 0.0);
                           });
}

PathSolver::PathSolver(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                       std::size_t n_steps)
    : n_modes_(n_modes),
      n_steps_((require_steps(n_steps), n_steps)),
      initial_(triangular_wave_coefficients(n_modes)),
      op_(m, scheme, n_modes, m.final_time() / static_cast<double>(n_steps)),
      gen_(m, scheme, n_modes, m.final_time() / static_cast<double>(n_steps)),
      noise_(n_modes + 2) {}

const SpectralField& PathSolver::solve(const NoiseStreamKey& key, OpCounter* ops) {
  state_ = initial_;
  for (std::size_t k = 0; k < n_steps_; ++k) {
    gen_.generate(key, static_cast<std::uint32_t>(k), noise_, ops);
    op_.apply(state_, noise_, ops);
  }
  return state_;
}

void validate_resolution(const CoupledResolution& res) {
  require_power_of_two(res.fine_modes, "fine mode count");
  require_steps(res.fine_steps);
  if (res.coarse_modes == 0) return;
  require_power_of_two(res.coarse_modes, "coarse mode count");
  if (res.coarse_modes > res.fine_modes)
    throw UsageError("coarse band (" + std::to_string(res.coarse_modes) +
                     " modes) exceeds the fine band (" + std::to_string(res.fine_modes) + ")");
  if (res.fine_steps != 2 * res.coarse_steps)
    throw UsageError("fine steps (" + std::to_string(res.fine_steps) +
                     ") must be twice the coarse steps (" + std::to_string(res.coarse_steps) + ")");
}

namespace {
double fine_dt(const ModelSpec& m, const CoupledResolution& res) {
  validate_resolution(res);
  return m.final_time() / static_cast<double>(res.fine_steps);
}
}  // namespace

CoupledPairSolver::CoupledPairSolver(const ModelSpec& m, SchemeKind scheme,
                                     const CoupledResolution& res)
    : scheme_(scheme),
      res_(res),
      fine_initial_(triangular_wave_coefficients(res.fine_modes)),
      fine_op_(m, scheme, res.fine_modes, fine_dt(m, res)),
      gen_(m, scheme, res.fine_modes, fine_dt(m, res)),
      r1_(res.fine_modes + 2),
      r2_(res.fine_modes + 2) {
  if (res.coarse_modes > 0) {
    coarse_initial_ = triangular_wave_coefficients(res.coarse_modes);
    coarse_op_.emplace(m, scheme, res.coarse_modes, 2.0 * fine_dt(m, res));
    rc_.resize(res.coarse_modes + 2);
  } else {
    coarse_initial_ = SpectralField(res.fine_modes);
  }
}

void CoupledPairSolver::solve(const NoiseStreamKey& key, OpCounter* ops,
                              const CoupledObserver& observer) {
  fine_ = fine_initial_;
  coarse_ = coarse_initial_;
  if (!coarse_op_) {
    for (std::size_t k = 0; k < res_.fine_steps; ++k) {
      gen_.generate(key, static_cast<std::uint32_t>(k), r1_, ops);
      fine_op_.apply(fine_, r1_, ops);
    }
    return;
  }
  for (std::size_t j = 0; j < res_.coarse_steps; ++j) {
    gen_.generate(key, static_cast<std::uint32_t>(2 * j), r1_, ops);
    fine_op_.apply(fine_, r1_, ops);
    gen_.generate(key, static_cast<std::uint32_t>(2 * j + 1), r2_, ops);
    fine_op_.apply(fine_, r2_, ops);
    couple_increments(scheme_, gen_.decay(), r1_, r2_, rc_, ops);
    coarse_op_->apply(coarse_, rc_, ops);
    if (observer) observer({j, fine_, coarse_, rc_});
  }
}

std::pair<SpectralField, SpectralField> solve_coupled_pair(const ModelSpec& m, SchemeKind scheme,
                                                           const CoupledResolution& res,
                                                           const NoiseStreamKey& key,
                                                           OpCounter* ops,
                                                           const CoupledObserver& observer) {
  CoupledPairSolver solver(m, scheme, res);
  solver.solve(key, ops, observer);
  return {solver.fine(), solver.coarse()};
}

double path_cost_model(std::size_t n_modes, std::size_t n_steps, ReactionKind reaction) noexcept {
  const double n = static_cast<double>(n_modes);
  double per_step = n;
  if (reaction != ReactionKind::Zero)
    per_step += n + static_cast<double>(transform_pair_units(n_modes));
  return static_cast<double>(n_steps) * per_step;
}

}  // namespace spde
