#include "spde/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spde/error.hpp"
#include "spde/spectral.hpp"

namespace spde {

ReactionKind parse_reaction(std::string_view name) {
  if (name == "zero") return ReactionKind::Zero;
  if (name == "linear") return ReactionKind::Linear;
  if (name == "trig" || name == "trigonometric") return ReactionKind::Trigonometric;
  throw ConfigError("unknown reaction '" + std::string(name) + "' (expected zero|linear|trig)");
}

std::string_view to_string(ReactionKind kind) noexcept {
  switch (kind) {
    case ReactionKind::Zero: return "zero";
    case ReactionKind::Linear: return "linear";
    case ReactionKind::Trigonometric: return "trig";
  }
  return "unknown";
}

ModelSpec::ModelSpec(double final_time, double b, ReactionKind reaction, ModeMap lambda, ModeMap q,
                     std::string law_name)
    : final_time_(final_time),
      b_(b),
      reaction_(reaction),
      lambda_(std::move(lambda)),
      q_(std::move(q)),
      law_name_(std::move(law_name)) {
  if (!(final_time_ > 0.0)) throw ConfigError("final time must be positive");
  if (!lambda_ || !q_) throw ConfigError("eigenvalue and noise laws must be set");
}

double ModelSpec::phi_nominal() const noexcept { return std::min(0.25 + b_, 1.0 - 1e-6); }

ModelSpec ModelSpec::with_reaction(ReactionKind r) const {
  ModelSpec copy = *this;
  copy.reaction_ = r;
  return copy;
}

double default_lambda(std::ptrdiff_t n) noexcept {
  if (n == 0) return 1.0;
  const double k = 2.0 * static_cast<double>(n) * std::numbers::pi;
  return k * k / 5.0;
}

ModelSpec default_model(double b, ReactionKind reaction, double final_time) {
  if (!(b > 0.0)) throw ConfigError("noise decay exponent b must be positive");
  return ModelSpec(
      final_time, b, reaction, default_lambda,
      [b](std::ptrdiff_t n) { return 0.25 * std::pow(default_lambda(n), -2.0 * b); }, "default");
}

namespace {

constexpr std::ptrdiff_t kCheckModes = std::ptrdiff_t{1} << 16;

// Slope of log(t(n)) against log(n) between n0 and n1.
template <class F>
double tail_exponent(F&& term, std::ptrdiff_t n0, std::ptrdiff_t n1) {
  const double t0 = term(n0);
  const double t1 = term(n1);
  if (t0 <= 0.0 || t1 <= 0.0) return -HUGE_VAL;
  return std::log(t1 / t0) / std::log(static_cast<double>(n1) / static_cast<double>(n0));
}

}  // namespace

ValidationReport validate_model(const ModelSpec& model) {
  ValidationReport rep;
  rep.spectrum_ok = true;
  double prev = 0.0;
  for (std::ptrdiff_t n = 0; n <= kCheckModes; ++n) {
    for (std::ptrdiff_t s : {n, -n}) {
      const double l = model.lambda(s);
      if (!(l > 0.0) || !std::isfinite(l))
        throw ModelError("eigenvalue lambda_" + std::to_string(s) + " = " + std::to_string(l) +
                         " is not positive");
      const double q = model.q(s);
      if (!(q >= 0.0) || !std::isfinite(q))
        throw ModelError("noise weight q_" + std::to_string(s) + " = " + std::to_string(q) +
                         " is negative");
      if (l < prev) rep.spectrum_ok = false;
    }
    prev = std::max(model.lambda(n), model.lambda(-n));
  }
  if (!rep.spectrum_ok) rep.notes.emplace_back("eigenvalues are not nondecreasing in |n|");

  const double phi = model.phi_nominal();
  rep.phi_capped = 0.25 + model.b() >= 1.0;
  if (rep.phi_capped)
    rep.notes.emplace_back("1/4 + b >= 1; regularity parameter capped below 1");
  rep.phi_checked = phi - 1e-3;

  auto noise_term = [&](std::ptrdiff_t n) {
    return std::pow(model.lambda(n), 2.0 * rep.phi_checked - 1.0) * model.q(n);
  };
  double sum = noise_term(0);
  for (std::ptrdiff_t n = 1; n <= kCheckModes; ++n) sum += noise_term(n) + noise_term(-n);
  rep.partial_sum = sum;
  rep.noise_tail_exponent = tail_exponent(noise_term, kCheckModes / 16, kCheckModes);
  rep.noise_summable = std::isfinite(sum) && rep.noise_tail_exponent < -1.0;
  if (!rep.noise_summable)
    rep.notes.emplace_back("noise weights are not summable at the nominal regularity");

  auto initial_term = [&](std::ptrdiff_t n) {
    const double c = triangular_wave_mode(n);
    return std::pow(model.lambda(n), 2.0 * rep.phi_checked) * c * c;
  };
  rep.initial_tail_exponent =
      tail_exponent(initial_term, kCheckModes / 16 + 1, kCheckModes + 1);
  rep.initial_data_regular = rep.initial_tail_exponent < -1.0;
  if (!rep.initial_data_regular)
    rep.notes.emplace_back("initial data lacks the nominal regularity");

  rep.reaction_smooth = model.reaction() != ReactionKind::Trigonometric;
  rep.exp_euler_theorem_applies = rep.reaction_smooth && rep.all_checks_pass();
  if (!rep.reaction_smooth)
    rep.notes.emplace_back(
        "trigonometric reaction has no bounded Frechet derivative on H: exponential Euler MLMC "
        "runs outside the proved assumptions");
  rep.milstein_theorem_applies = phi > 0.5 && rep.all_checks_pass();
  if (phi <= 0.5)
    rep.notes.emplace_back("phi <= 1/2: the Milstein cost theorem does not apply");
  return rep;
}

}  // namespace spde
