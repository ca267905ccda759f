#include "spde/harness/commands.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <numeric>

#include "spde/error.hpp"
#include "spde/model.hpp"
#include "spde/noise.hpp"
#include "spde/rates.hpp"
#include "spde/solvers.hpp"

namespace spde::harness {

namespace {

template <class... Args>
void log(fmt::format_string<Args...> f, Args&&... args) {
  fmt::print(stderr, "[spde-mlmc] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelSpec checked_model(const ExperimentConfig& cfg, Json* summary) {
  ModelSpec m = cfg.model_spec();
  const ValidationReport v = validate_model(m);
  if (!v.all_checks_pass()) {
    std::string why;
    for (const auto& n : v.notes) why += "\n  " + n;
    throw ModelError("model assumptions fail numerically:" + why);
  }
  if (summary) {
    (*summary)["model_checks"] = {{"phi", m.phi_nominal()},
                                  {"noise_tail_exponent", v.noise_tail_exponent},
                                  {"initial_tail_exponent", v.initial_tail_exponent},
                                  {"exp_euler_theorem_applies", v.exp_euler_theorem_applies},
                                  {"milstein_theorem_applies", v.milstein_theorem_applies},
                                  {"notes", v.notes}};
  }
  return m;
}

std::filesystem::path summary_path(const ExperimentConfig& cfg, Command c) {
  return cfg.out_dir / fmt::format("summary_{}.json", to_string(c));
}

// Slope of log2(y) against log2(x) by ordinary least squares.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log2(x[i]);
    my += std::log2(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log2(x[i]) - mx;
    sxy += dx * (std::log2(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double target_time_slope(SchemeKind s, double phi) { return s == SchemeKind::ExpEuler ? 1.0 : phi; }

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "rates") return Command::Rates;
  if (name == "mlmc") return Command::Mlmc;
  if (name == "reference") return Command::Reference;
  if (name == "compare") return Command::Compare;
  if (name == "coupling-demo") return Command::CouplingDemo;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Rates: return "rates";
    case Command::Mlmc: return "mlmc";
    case Command::Reference: return "reference";
    case Command::Compare: return "compare";
    case Command::CouplingDemo: return "coupling-demo";
  }
  return "?";
}

double h_distance(const SpectralField& a, const SpectralField& b) {
  const std::size_t n = std::max(a.n_modes(), b.n_modes());
  return h_norm(pad(a, n) - pad(b, n));
}

// ---------------------------------------------------------------- rates

Json cmd_rates(const ExperimentConfig& cfg) {
  Json summary = summary_header(cfg, "rates");
  const ModelSpec m = checked_model(cfg, &summary);
  const double phi = m.phi_nominal();
  const auto& r = cfg.rates;

  CsvWriter csv(cfg.out_dir / "rates.csv", cfg, "rates",
                {"method", "reaction", "b", "axis", "resolution", "rmse", "stderr", "samples", "seed"});
  Json fits = Json::array();
  for (SchemeKind scheme : cfg.schemes) {
    for (RateAxis axis : r.axes) {
      const bool time = axis == RateAxis::Time;
      const auto grid = time ? dyadic_grid(r.time_min_exp, r.time_max_exp - 1)
                             : dyadic_grid(r.space_min_exp, r.space_max_exp - 1);
      const std::size_t fixed = time ? r.time_fixed_modes : r.space_fixed_steps;
      const std::uint64_t samples = time ? r.time_samples : r.space_samples;
      const auto t0 = std::chrono::steady_clock::now();
      const RateStudy study = rmse_study(m, scheme, axis, grid, fixed, samples, cfg.seed, cfg.threads);
      const double secs = seconds_since(t0);
      log("rates {} {} slope {:.3f} +- {:.3f} ({:.1f} s)", to_string(scheme), to_string(axis),
          study.fit.slope, study.fit.stderr_slope, secs);
      for (const auto& p : study.points) {
        csv.cell(to_string(scheme)).cell(to_string(m.reaction())).cell(m.b()).cell(to_string(axis));
        csv.cell(static_cast<std::uint64_t>(p.resolution)).cell(p.rmse).cell(p.stderr_rmse);
        csv.cell(p.samples).cell(cfg.seed);
        csv.end_row();
      }
      const double target = time ? target_time_slope(scheme, phi) : 2.0 * phi;
      Json f = {{"method", std::string(to_string(scheme))},
                {"axis", std::string(to_string(axis))},
                {"fixed", fixed},
                {"samples", samples},
                {"slope", study.fit.slope},
                {"stderr", study.fit.stderr_slope},
                {"used_points", study.fit.used_points},
                {"observed_target", target},
                {"warnings", study.fit.warnings}};
      if (cfg.timing) f["seconds"] = secs;
      fits.push_back(std::move(f));
    }
  }
  csv.close();
  summary["fits"] = std::move(fits);
  write_summary(summary_path(cfg, Command::Rates), summary);
  return summary;
}

// ----------------------------------------------------------------- mlmc

Json cmd_mlmc(const ExperimentConfig& cfg) {
  Json summary = summary_header(cfg, "mlmc");
  const ModelSpec m = checked_model(cfg, &summary);

  CsvWriter runs(cfg.out_dir / "mlmc_run.csv", cfg, "mlmc",
                 {"method", "epsilon", "repetition", "level", "N", "N_rule", "J", "M", "V_model",
                  "V_measured", "C_model", "ops_measured", "seconds"});
  CsvWriter field(cfg.out_dir / "mean_field.csv", cfg, "mlmc",
                  {"method", "epsilon", "repetition", "x", "value"});
  Json list = Json::array();
  for (SchemeKind scheme : cfg.schemes) {
    for (unsigned k : cfg.mlmc.epsilon_exponents) {
      const double eps = std::ldexp(1.0, -static_cast<int>(k));
      const MlmcConfig mc = cfg.mlmc_config(scheme, eps);
      for (unsigned rep = 0; rep < cfg.mlmc.repetitions; ++rep) {
        const std::uint64_t seed = derive_seed(cfg.seed, rep);
        const MlmcReport rpt = run_estimator(m, mc, seed);
        log("mlmc {} eps=2^-{} rep {}: L={} cost={:.4g} ops={} ({:.1f} s)", to_string(scheme), k, rep,
            rpt.num_levels, rpt.total_model_cost, rpt.total_ops, rpt.total_seconds);
        for (const auto& lv : rpt.levels) {
          runs.cell(to_string(scheme)).cell(eps).cell(rep).cell(static_cast<std::uint64_t>(lv.level));
          runs.cell(static_cast<std::uint64_t>(lv.n_modes)).cell(static_cast<std::uint64_t>(lv.n_modes_raw));
          runs.cell(static_cast<std::uint64_t>(lv.n_steps)).cell(lv.samples);
          runs.cell(lv.v_model).cell(lv.v_measured).cell(lv.c_model).cell(lv.ops);
          runs.cell(cfg.timing ? lv.seconds : 0.0);
          runs.end_row();
        }
        const auto values = grid_values(rpt.mean, rpt.mean.n_modes());
        for (std::size_t i = 0; i < values.size(); ++i) {
          field.cell(to_string(scheme)).cell(eps).cell(rep);
          field.cell(static_cast<double>(i) / static_cast<double>(values.size())).cell(values[i]);
          field.end_row();
        }
        Json e = {{"method", std::string(to_string(scheme))},
                  {"epsilon", eps},
                  {"repetition", rep},
                  {"seed", seed},
                  {"level_rule", std::string(to_string(rpt.rule))},
                  {"variance_mode", std::string(to_string(rpt.variance_mode))},
                  {"rates", {{"alpha", rpt.rates.alpha}, {"beta", rpt.rates.beta}, {"gamma", rpt.rates.gamma}}},
                  {"L", rpt.num_levels},
                  {"total_model_cost", rpt.total_model_cost},
                  {"total_ops", rpt.total_ops},
                  {"estimator_variance", rpt.estimator_variance()},
                  {"mean_norm", h_norm(rpt.mean)}};
        if (cfg.timing) e["seconds"] = rpt.total_seconds;
        list.push_back(std::move(e));
      }
    }
  }
  runs.close();
  field.close();
  summary["runs"] = std::move(list);
  write_summary(summary_path(cfg, Command::Mlmc), summary);
  return summary;
}

// ------------------------------------------------------------ reference

std::string ReferenceSpec::key_text(const ExperimentConfig& cfg) const {
  std::string s = fmt::format("b={};T={};reaction={};law={};kind={}", cfg.model.b, cfg.model.final_time,
                              to_string(cfg.model.reaction), cfg.model.lambda_law, kind);
  if (kind == "deterministic") {
    s += fmt::format(";N={};J={}", modes, steps);
  } else {
    s += fmt::format(";eps=2^-{};seed={};role=reference;multipliers={},{};variance={};pilot={}",
                     epsilon_exponent, seed, cfg.mlmc.multiplier_first, cfg.mlmc.multiplier_rest,
                     to_string(cfg.mlmc.variance_mode), cfg.mlmc.pilot_samples);
  }
  return s;
}

ReferenceSpec reference_spec(const ExperimentConfig& cfg) {
  ReferenceSpec s;
  if (cfg.model.reaction == ReactionKind::Trigonometric) {
    s.kind = "overkill-mlmc";
    s.epsilon_exponent = cfg.overkill_exponent();
    s.seed = cfg.seed;
  } else {
    s.kind = "deterministic";
    s.modes = cfg.reference.modes;
    s.steps = cfg.reference.steps;
  }
  return s;
}

std::filesystem::path reference_cache_path(const ExperimentConfig& cfg) {
  const ReferenceSpec s = reference_spec(cfg);
  return cfg.out_dir / "cache" / fmt::format("reference-{}.json", hex64(fnv1a64(s.key_text(cfg))));
}

SpectralField compute_reference(const ExperimentConfig& cfg, const ReferenceSpec& spec) {
  const ModelSpec m = cfg.model_spec();
  if (spec.kind == "deterministic") return solve_deterministic(m, spec.modes, spec.steps);
  MlmcConfig mc = make_mlmc_config(m, SchemeKind::ExpEuler, std::ldexp(1.0, -static_cast<int>(spec.epsilon_exponent)));
  mc.multiplier_first = cfg.mlmc.multiplier_first;
  mc.multiplier_rest = cfg.mlmc.multiplier_rest;
  mc.variance_mode = cfg.mlmc.variance_mode;
  mc.pilot_samples = cfg.mlmc.pilot_samples;
  mc.threads = cfg.threads;
  const MlmcReport rpt = run_estimator(m, mc, spec.seed, StreamRole::Reference,
                                       [](const LevelReport& lv) {
                                         log("reference level {} (N={}, J={}, M={}) done", lv.level,
                                             lv.n_modes, lv.n_steps, lv.samples);
                                       });
  return rpt.mean;
}

std::string serialize_reference(const ExperimentConfig& cfg, const ReferenceSpec& spec,
                                const SpectralField& field) {
  Json j;
  j["format"] = "spde-mlmc-reference-1";
  j["key"] = spec.key_text(cfg);
  j["kind"] = spec.kind;
  j["n_modes"] = field.n_modes();
  Json re = Json::array(), im = Json::array();
  for (const auto& c : field.stored()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j.dump() + "\n";
}

SpectralField parse_reference(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(std::string("corrupt reference file: ") + e.what());
  }
  const std::size_t n = j.at("n_modes").get<std::size_t>();
  require_power_of_two(n, "reference n_modes");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  SpectralField f(n);
  auto st = f.stored();
  if (re.size() != st.size() || im.size() != st.size()) throw IoError("reference coefficient count mismatch");
  for (std::size_t k = 0; k < st.size(); ++k) st[k] = {re[k].get<double>(), im[k].get<double>()};
  return f;
}

SpectralField load_reference(const ExperimentConfig& cfg) {
  const auto path = reference_cache_path(cfg);
  if (!std::filesystem::exists(path))
    throw MissingArtifactError("pseudo-reference " + path.string() +
                               " not found; run `spde-mlmc reference` with the same config first");
  return parse_reference(read_text(path));
}

Json cmd_reference(const ExperimentConfig& cfg) {
  Json summary = summary_header(cfg, "reference");
  checked_model(cfg, &summary);
  const ReferenceSpec spec = reference_spec(cfg);
  const auto path = reference_cache_path(cfg);
  SpectralField field;
  bool hit = std::filesystem::exists(path);
  const auto t0 = std::chrono::steady_clock::now();
  if (hit) {
    log("reference cache hit: {}", path.string());
    field = parse_reference(read_text(path));
  } else {
    log("computing {} reference: {}", spec.kind, spec.key_text(cfg));
    field = compute_reference(cfg, spec);
    write_text(path, serialize_reference(cfg, spec, field));
    log("wrote {}", path.string());
  }
  CsvWriter csv(cfg.out_dir / "reference.csv", cfg, "reference", {"x", "value"});
  const auto values = grid_values(field, field.n_modes());
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv.cell(static_cast<double>(i) / static_cast<double>(values.size())).cell(values[i]);
    csv.end_row();
  }
  csv.close();
  summary["reference"] = {{"kind", spec.kind},
                          {"key", spec.key_text(cfg)},
                          {"cache_file", path.filename().string()},
                          {"n_modes", field.n_modes()},
                          {"h_norm", h_norm(field)}};
  summary["cache_hit"] = hit;
  if (cfg.timing) summary["seconds"] = seconds_since(t0);
  write_summary(summary_path(cfg, Command::Reference), summary);
  return summary;
}

// -------------------------------------------------------------- compare

Json cmd_compare(const ExperimentConfig& cfg) {
  Json summary = summary_header(cfg, "compare");
  const ModelSpec m = checked_model(cfg, &summary);
  const SpectralField reference = load_reference(cfg);

  CsvWriter csv(cfg.out_dir / "compare.csv", cfg, "compare",
                {"method", "reaction", "b", "epsilon", "repetition", "error_sq", "model_cost",
                 "ops_measured", "seconds"});
  Json per_scheme = Json::array();
  for (SchemeKind scheme : cfg.schemes) {
    std::vector<double> inv_eps, cost, ops, mse;
    Json points = Json::array();
    for (unsigned k : cfg.mlmc.epsilon_exponents) {
      const double eps = std::ldexp(1.0, -static_cast<int>(k));
      const MlmcConfig mc = cfg.mlmc_config(scheme, eps);
      double sum_err = 0, sum_cost = 0, sum_ops = 0;
      for (unsigned rep = 0; rep < cfg.mlmc.repetitions; ++rep) {
        const MlmcReport rpt = run_estimator(m, mc, derive_seed(cfg.seed, rep));
        const double d = h_distance(rpt.mean, reference);
        const double err = d * d;
        log("compare {} eps=2^-{} rep {}: error^2/eps^2={:.3f} cost={:.4g} ({:.1f} s)", to_string(scheme), k,
            rep, err / (eps * eps), rpt.total_model_cost, rpt.total_seconds);
        csv.cell(to_string(scheme)).cell(to_string(m.reaction())).cell(m.b()).cell(eps).cell(rep);
        csv.cell(err).cell(rpt.total_model_cost).cell(rpt.total_ops).cell(cfg.timing ? rpt.total_seconds : 0.0);
        csv.end_row();
        sum_err += err;
        sum_cost += rpt.total_model_cost;
        sum_ops += static_cast<double>(rpt.total_ops);
      }
      const double reps = cfg.mlmc.repetitions;
      inv_eps.push_back(1.0 / eps);
      cost.push_back(sum_cost / reps);
      ops.push_back(sum_ops / reps);
      mse.push_back(sum_err / reps);
      points.push_back({{"epsilon", eps},
                        {"mse", sum_err / reps},
                        {"mse_over_eps_sq", sum_err / reps / (eps * eps)},
                        {"model_cost", sum_cost / reps},
                        {"ops_measured", sum_ops / reps}});
    }
    per_scheme.push_back({{"method", std::string(to_string(scheme))},
                          {"cost_slope", loglog_slope(inv_eps, cost)},
                          {"ops_slope", loglog_slope(inv_eps, ops)},
                          {"points", std::move(points)}});
  }
  csv.close();
  summary["reference_file"] = reference_cache_path(cfg).filename().string();
  summary["cost_fits"] = std::move(per_scheme);
  write_summary(summary_path(cfg, Command::Compare), summary);
  return summary;
}

// -------------------------------------------------------- coupling demo

Json cmd_coupling_demo(const ExperimentConfig& cfg) {
  Json summary = summary_header(cfg, "coupling-demo");
  const ModelSpec m = checked_model(cfg, &summary);
  const std::size_t n = cfg.coupling.modes;
  CsvWriter csv(cfg.out_dir / "coupling.csv", cfg, "coupling-demo",
                {"x", "fine", "coarse", "scheme", "J", "b", "reaction"});
  Json rows = Json::array();
  const NoiseStreamKey key{cfg.seed, 0, 0, StreamRole::Demo};
  for (SchemeKind scheme : cfg.schemes) {
    for (std::size_t j : cfg.coupling.steps) {
      CoupledPairSolver solver(m, scheme, {n, j, n, j / 2});
      solver.solve(key);
      const auto fine = grid_values(solver.fine(), n);
      const auto coarse = grid_values(solver.coarse(), n);
      for (std::size_t i = 0; i < n; ++i) {
        csv.cell(static_cast<double>(i) / static_cast<double>(n)).cell(fine[i]).cell(coarse[i]);
        csv.cell(to_string(scheme)).cell(static_cast<std::uint64_t>(j)).cell(m.b()).cell(to_string(m.reaction()));
        csv.end_row();
      }
      rows.push_back({{"method", std::string(to_string(scheme))},
                      {"J", j},
                      {"N", n},
                      {"h_distance", h_distance(solver.fine(), solver.coarse())}});
    }
  }
  csv.close();
  summary["pairs"] = std::move(rows);
  write_summary(summary_path(cfg, Command::CouplingDemo), summary);
  return summary;
}

Json run_command(Command c, const ExperimentConfig& cfg) {
  switch (c) {
    case Command::Rates: return cmd_rates(cfg);
    case Command::Mlmc: return cmd_mlmc(cfg);
    case Command::Reference: return cmd_reference(cfg);
    case Command::Compare: return cmd_compare(cfg);
    case Command::CouplingDemo: return cmd_coupling_demo(cfg);
  }
  throw UsageError("unhandled command");
}

}  // namespace spde::harness
