#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace spde {

enum class ReactionKind { Zero, Linear, Trigonometric };

/// Accepts "zero", "linear" and "trig" (also "trigonometric").
ReactionKind parse_reaction(std::string_view name);
std::string_view to_string(ReactionKind kind) noexcept;

/// The model problem dU = (AU + f(U)) dt + dW on the periodic unit interval.
///
/// The spectrum of -A and the covariance of W share the Fourier basis. Both are
/// given as maps n -> value over all integer modes, so alternative laws plug in
/// through the same code path as the default one.
class ModelSpec {
 public:
  using ModeMap = std::function<double(std::ptrdiff_t)>;

  ModelSpec(double final_time, double b, ReactionKind reaction, ModeMap lambda, ModeMap q,
            std::string law_name);

  double final_time() const noexcept { return final_time_; }
  double b() const noexcept { return b_; }
  ReactionKind reaction() const noexcept { return reaction_; }
  const std::string& law_name() const noexcept { return law_name_; }

  double lambda(std::ptrdiff_t n) const { return lambda_(n); }
  double q(std::ptrdiff_t n) const { return q_(n); }

  /// Nominal noise regularity: the supremum 1/4 + b, capped below 1.
  double phi_nominal() const noexcept;

  ModelSpec with_reaction(ReactionKind r) const;

 private:
  double final_time_;
  double b_;
  ReactionKind reaction_;
  ModeMap lambda_;
  ModeMap q_;
  std::string law_name_;
};

/// lambda_0 = 1, lambda_n = (2 n pi)^2 / 5.
double default_lambda(std::ptrdiff_t n) noexcept;

/// Default eigenvalue law with q_n = lambda_n^{-2b} / 4 and T = 1/2.
ModelSpec default_model(double b, ReactionKind reaction, double final_time = 0.5);

struct ValidationReport {
  bool spectrum_ok = false;         // lambda_n > 0 and nondecreasing in |n|
  bool noise_summable = false;      // tail exponent of lambda^{2phi'-1} q_n below -1
  double phi_checked = 0.0;         // phi' = phi_nominal - 1e-3
  double partial_sum = 0.0;         // sum_{|n| <= 2^16} lambda_n^{2phi'-1} q_n
  double noise_tail_exponent = 0.0;
  bool initial_data_regular = false;  // u_0 in H_{phi'} for the triangular wave
  double initial_tail_exponent = 0.0;
  bool reaction_smooth = false;     // reaction satisfies the smoothness required for exponential Euler
  bool exp_euler_theorem_applies = false;
  bool milstein_theorem_applies = false;
  bool phi_capped = false;          // 1/4 + b >= 1 so the nominal phi was capped
  std::vector<std::string> notes;

  bool all_checks_pass() const noexcept {
    return spectrum_ok && noise_summable && initial_data_regular;
  }
};

/// Checks the structural model assumptions numerically and reports which of the
/// cost-versus-error results nominally apply. Throws ModelError on a non-positive
/// eigenvalue or a negative noise weight.
ValidationReport validate_model(const ModelSpec& model);

}  // namespace spde
