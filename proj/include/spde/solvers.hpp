#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spde/model.hpp"
#include "spde/noise.hpp"
#include "spde/reaction.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"

namespace spde {

struct PathState {
  SpectralField field;
  std::size_t j = 0;
  double dt = 0.0;
  SchemeKind scheme = SchemeKind::ExpEuler;
};

/// One scheme step on a fixed band and step size, with the per-mode factors
/// precomputed:
///   ExpEuler, DriftExpEuler:  v' = e^{-lambda dt} v + phi1 f_N(v) + r,  phi1 = (1 - e^{-lambda dt})/lambda
///   Milstein:                 v' = e^{-lambda dt} (v + dt f_N(v)) + r
class StepOperator {
 public:
  StepOperator(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes, double dt);

  SchemeKind scheme() const noexcept { return scheme_; }
  std::size_t n_modes() const noexcept { return n_modes_; }
  double dt() const noexcept { return dt_; }

  /// Advances v by one step; `noise` is in the dof layout (n_modes + 2 entries).
  void apply(SpectralField& v, std::span<const double> noise, OpCounter* ops = nullptr);

 private:
  SchemeKind scheme_;
  std::size_t n_modes_;
  double dt_;
  ReactionKind reaction_;
  std::vector<double> decay_;
  std::vector<double> phi1_;
  ReactionEvaluator evaluator_;
  SpectralField drift_;
};

/// Single step from an explicit state; `noise` must have the state's mode count.
PathState step(const PathState& state, const ModelSpec& m, const SpectralField& noise,
               OpCounter* ops = nullptr);

/// Supplies the increment of step k in dof layout.
using IncrementSource = std::function<void(std::size_t step, std::span<double> dofs)>;

/// Path from P_N u0 over J steps of size T/J with externally supplied increments.
SpectralField solve_path_driven(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                                std::size_t n_steps, const IncrementSource& source,
                                OpCounter* ops = nullptr);

/// Path driven by the key's stream; step k uses fine-step counter k.
SpectralField solve_path(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes,
                         std::size_t n_steps, const NoiseStreamKey& key, OpCounter* ops = nullptr);

/// Noise-free path; the default scheme gives the deterministic reference.
SpectralField solve_deterministic(const ModelSpec& m, std::size_t n_modes, std::size_t n_steps,
                                  SchemeKind scheme = SchemeKind::ExpEuler);

/// Reusable single-path solver (keeps its transform plans and buffers).
class PathSolver {
 public:
  PathSolver(const ModelSpec& m, SchemeKind scheme, std::size_t n_modes, std::size_t n_steps);

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t n_steps() const noexcept { return n_steps_; }

  const SpectralField& solve(const NoiseStreamKey& key, OpCounter* ops = nullptr);

 private:
  std::size_t n_modes_;
  std::size_t n_steps_;
  SpectralField initial_;
  StepOperator op_;
  IncrementGenerator gen_;
  std::vector<double> noise_;
  SpectralField state_;
};

struct CoupledResolution {
  std::size_t fine_modes = 0;
  std::size_t fine_steps = 0;
  std::size_t coarse_modes = 0;   // 0 on level 0
  std::size_t coarse_steps = 0;
};

/// State after coarse step j (fine index 2j + 2).
struct CoupledStepView {
  std::size_t coarse_step;
  const SpectralField& fine;
  const SpectralField& coarse;
  std::span<const double> coarse_increment;
};
using CoupledObserver = std::function<void(const CoupledStepView&)>;

/// Reusable coupled fine/coarse solver for one level.
///
/// The fine path takes two steps per coarse step with freshly drawn fine
/// increments; the coarse increment is derived from them by the scheme's coupling
/// rule. With coarse_modes == 0 only the fine path is computed and the coarse
/// result is the zero field.
class CoupledPairSolver {
 public:
  CoupledPairSolver(const ModelSpec& m, SchemeKind scheme, const CoupledResolution& res);

  const CoupledResolution& resolution() const noexcept { return res_; }

  void solve(const NoiseStreamKey& key, OpCounter* ops = nullptr,
             const CoupledObserver& observer = {});

  const SpectralField& fine() const noexcept { return fine_; }
  const SpectralField& coarse() const noexcept { return coarse_; }

 private:
  SchemeKind scheme_;
  CoupledResolution res_;
  SpectralField fine_initial_;
  SpectralField coarse_initial_;
  StepOperator fine_op_;
  std::optional<StepOperator> coarse_op_;
  IncrementGenerator gen_;
  std::vector<double> r1_;
  std::vector<double> r2_;
  std::vector<double> rc_;
  SpectralField fine_;
  SpectralField coarse_;
};

/// Checks J_fine = 2 J_coarse, N_coarse <= N_fine and power-of-two sizes.
void validate_resolution(const CoupledResolution& res);

std::pair<SpectralField, SpectralField> solve_coupled_pair(const ModelSpec& m, SchemeKind scheme,
                                                           const CoupledResolution& res,
                                                           const NoiseStreamKey& key,
                                                           OpCounter* ops = nullptr,
                                                           const CoupledObserver& observer = {});

/// Operation-count model of one path: J (N + cost(f_N)) with
/// cost(f_N) = N + 5 N log2 N for a non-zero reaction.
double path_cost_model(std::size_t n_modes, std::size_t n_steps, ReactionKind reaction) noexcept;

}  // namespace spde
