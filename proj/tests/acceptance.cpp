// Acceptance checks. One PASS/FAIL line per criterion on stdout; supporting
// numbers are printed as indented lines and written under ./acceptance-results.
//
//   spde_acceptance [criterion ...]      (default: all)
//
// SPDE_ACCEPT_BUDGET_HOURS caps the wall time spent on the 32-run MSE cells of
// the cost-separation check (default 1). Cells that would overrun are reported
// as not executed and the criterion fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spde/harness/commands.hpp"
#include "spde/harness/config.hpp"
#include "spde/harness/output.hpp"
#include "spde/mlmc.hpp"
#include "spde/noise.hpp"
#include "spde/parallel.hpp"
#include "spde/rates.hpp"
#include "spde/solvers.hpp"

using namespace spde;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  template <class... A>
  void note(fmt::format_string<A...> f, A&&... a) {
    lines.push_back(fmt::format(f, std::forward<A>(a)...));
    fmt::print("    {}\n", lines.back());
    std::fflush(stdout);
  }
  void require(bool ok) { pass = pass && ok; }
};

const fs::path kOut = "acceptance-results";
constexpr std::uint64_t kSeed = 20240601;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

const char* mark(bool ok) { return ok ? "ok " : "BAD"; }

std::string name_of(SchemeKind s) { return std::string(to_string(s)); }
std::string name_of(ReactionKind r) { return std::string(to_string(r)); }

// ------------------------------------------------------------------ 1

Outcome sample_allocation() {
  Outcome o;
  const auto t0 = Clock::now();
  MlmcConfig c;
  c.epsilon = std::ldexp(1.0, -11);
  c.rates = {1.0, 2.0, 2.0};
  const std::size_t L = choose_num_levels(c.epsilon, 1.0, LevelRule::PaperExpEuler, 0.5);
  std::vector<double> v(L + 1), cost(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    v[l] = model_variance(l, 2.0);
    cost[l] = model_cost(l, 2.0);
  }
  const auto m = allocate_samples(c, L, v, cost);
  const double ms = 1e3 * since(t0);
  o.note("L = {}", L);
  o.note("M_1 = {}, M_2 = {} (want 216868270, 44268050)", m[1], m[2]);
  o.note("M_0 = {} (want 4907168680), M_10 = {} (want 355), M_11 = {} (want 85)", m[0], m[10], m[11]);
  o.note("runtime {:.3f} ms", ms);
  o.require(L == 11 && m.size() == 12);
  o.require(m[0] == 4907168680ULL && m[1] == 216868270ULL && m[2] == 44268050ULL && m[10] == 355 && m[11] == 85);
  o.require(ms < 1.0);
  return o;
}

// ------------------------------------------------------------------ 2

Outcome sdc_exactness() {
  Outcome o;
  for (double b : {0.25, 0.5}) {
    const auto m = default_model(b, ReactionKind::Zero);
    const auto cfg = make_mlmc_config(m, SchemeKind::ExpEuler, 1.0 / 64);
    for (SchemeKind s : kAllSchemes) {
      double worst = 0.0, u0 = 0.0;
      for (std::size_t l = 1; l <= 6; ++l) {
        const auto f = level_resolutions(l, cfg), c = level_resolutions(l - 1, cfg);
        u0 = h_norm(triangular_wave_coefficients(f.n_modes));
        for (std::uint64_t rep = 0; rep < 4; ++rep) {
          solve_coupled_pair(m, s, {f.n_modes, f.n_steps, c.n_modes, c.n_steps},
                             {kSeed, static_cast<std::uint32_t>(l), rep, StreamRole::Estimator}, nullptr,
                             [&](const CoupledStepView& v) {
                               worst = std::max(worst, h_norm(project(v.fine, c.n_modes) - v.coarse) / u0);
                             });
        }
      }
      const bool ok = s == SchemeKind::ExpEuler ? worst <= 1e-12 : worst > 0.0;
      o.note("{} b={} {:<16} max_j ||P F_2j - C_j|| / ||u0|| = {:.3e}  (want {})", mark(ok), b, name_of(s), worst,
             s == SchemeKind::ExpEuler ? "<= 1e-12" : "> 0");
      o.require(ok);
    }
  }
  return o;
}

// ------------------------------------------------------------------ 3

Outcome pathwise_correctness() {
  Outcome o;
  for (double b : {0.25, 0.5}) {
    for (ReactionKind r : {ReactionKind::Zero, ReactionKind::Linear, ReactionKind::Trigonometric}) {
      const auto m = default_model(b, r);
      for (SchemeKind s : kAllSchemes) {
        const auto cfg = make_mlmc_config(m, s, 1.0 / 64);
        double worst = 0.0;
        for (std::size_t l = 1; l <= 5; ++l) {
          const auto f = level_resolutions(l, cfg), c = level_resolutions(l - 1, cfg);
          std::vector<std::vector<double>> incs;
          const auto [fine, coarse] = solve_coupled_pair(
              m, s, {f.n_modes, f.n_steps, c.n_modes, c.n_steps}, {kSeed, static_cast<std::uint32_t>(l), 3},
              nullptr, [&](const CoupledStepView& v) {
                incs.emplace_back(v.coarse_increment.begin(), v.coarse_increment.end());
              });
          const auto direct = solve_path_driven(m, s, c.n_modes, c.n_steps, [&](std::size_t k, std::span<double> d) {
            std::copy(incs[k].begin(), incs[k].end(), d.begin());
          });
          worst = std::max(worst, h_norm(direct - coarse));
        }
        const bool ok = worst <= 1e-12;
        o.note("{} b={} {:<13} {:<16} max_l ||C - direct coarse solve|| = {:.3e}", mark(ok), b, name_of(r),
               name_of(s), worst);
        o.require(ok);
      }
    }
  }
  return o;
}

// ------------------------------------------------------------------ 4

Outcome exact_law() {
  Outcome o;
  const double b = 0.25, T = 0.5;
  const auto m = default_model(b, ReactionKind::Zero);
  const std::size_t N = 16, paths = 10000;
  const auto t0 = Clock::now();
  for (std::size_t J : {1u, 8u, 64u, 512u}) {
    PathSolver solver(m, SchemeKind::ExpEuler, N, J);
    std::vector<double> sum(N + 2), sq(N + 2);
    for (std::size_t i = 0; i < paths; ++i) {
      const auto d = solver.solve({kSeed, 0, i, StreamRole::Estimator}).dofs();
      for (std::size_t k = 0; k < N + 2; ++k) {
        sum[k] += d[k];
        sq[k] += d[k] * d[k];
      }
    }
    double worst_mean = 0, worst_var = 0;
    for (std::size_t k = 0; k < N + 2; ++k) {
      const std::size_t mode = k / 2;
      const bool imag = k % 2 == 1;
      if (imag && (mode == 0 || mode == N / 2)) continue;
      const auto n = static_cast<std::ptrdiff_t>(mode);
      const double lam = default_lambda(n), q = m.q(n);
      const double total = q * (1.0 - std::exp(-2.0 * lam * T)) / (2.0 * lam);
      const double var = mode == 0 ? total : total / 2.0;
      const double mean = imag ? 0.0 : triangular_wave_mode(n) * std::exp(-lam * T);
      const double mh = sum[k] / paths;
      const double vh = (sq[k] - paths * mh * mh) / (paths - 1);
      worst_mean = std::max(worst_mean, std::abs(mh - mean) / std::sqrt(var / paths));
      worst_var = std::max(worst_var, std::abs(vh - var) / (var * std::sqrt(2.0 / paths)));
    }
    const bool ok = worst_mean <= 4.0 && worst_var <= 4.0;
    o.note("{} J={:<4} worst |mean error| = {:.2f} SE, worst |variance error| = {:.2f} SE", mark(ok), J, worst_mean,
           worst_var);
    o.require(ok);
  }
  o.note("runtime {:.1f} s", since(t0));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome rate_reproduction() {
  Outcome o;
  harness::ensure_directory(kOut);
  std::FILE* csv = std::fopen((kOut / "rates.csv").c_str(), "w");
  fmt::print(csv, "method,reaction,b,axis,resolution,rmse,stderr,samples,seed\n");
  for (double b : {0.25, 0.5}) {
    for (ReactionKind r : {ReactionKind::Linear, ReactionKind::Trigonometric}) {
      const auto m = default_model(b, r);
      const double phi = m.phi_nominal();
      for (SchemeKind s : kAllSchemes) {
        for (RateAxis axis : {RateAxis::Time, RateAxis::Space}) {
          const bool time = axis == RateAxis::Time;
          const auto t0 = Clock::now();
          const auto st = time ? rmse_study(m, s, axis, dyadic_grid(4, 9), 256, 2000, kSeed)
                               : rmse_study(m, s, axis, dyadic_grid(2, 8), std::size_t{1} << 14, 128, kSeed);
          const double target = time ? (s == SchemeKind::ExpEuler ? 1.0 : phi) : 2.0 * phi;
          const double tol = time ? 0.15 : 0.2;
          const bool ok = std::abs(st.fit.slope - target) <= tol;
          o.note("{} b={} {:<13} {:<16} {:<5} slope {:.3f} +- {:.3f} (target {:.2f} +- {:.2f}) [{:.0f} s]", mark(ok),
                 b, name_of(r), name_of(s), to_string(axis), st.fit.slope, st.fit.stderr_slope, target, tol,
                 since(t0));
          o.require(ok);
          for (const auto& p : st.points)
            fmt::print(csv, "{},{},{},{},{},{},{},{},{}\n", name_of(s), name_of(r), b, to_string(axis), p.resolution,
                       p.rmse, p.stderr_rmse, p.samples, kSeed);
        }
      }
    }
  }
  std::fclose(csv);
  return o;
}

// ------------------------------------------------------------------ 6

Outcome variance_decay() {
  Outcome o;
  const std::uint64_t M = 1000;
  for (double b : {0.25, 0.5}) {
    for (ReactionKind r : {ReactionKind::Linear, ReactionKind::Trigonometric}) {
      const auto m = default_model(b, r);
      for (SchemeKind s : kAllSchemes) {
        const auto cfg = make_mlmc_config(m, s, 1.0 / 64);
        std::vector<double> x, y;
        std::string seq;
        for (std::size_t l = 2; l <= 6; ++l) {
          const auto f = level_resolutions(l, cfg), c = level_resolutions(l - 1, cfg);
          const auto st = sample_level(m, s, l, f, &c, M, kSeed, StreamRole::Estimator, 0);
          const double v = st.sum_sq / static_cast<double>(M);
          x.push_back(static_cast<double>(l));
          y.push_back(std::log2(v));
          seq += fmt::format(" {:.2e}", v);
        }
        const double slope = ols_slope(x, y);
        const double beta = cfg.rates.beta;
        const bool ok = std::abs(slope + beta) <= 0.3;
        o.note("{} b={} {:<13} {:<16} slope {:.3f} (target {:.2f} +- 0.3)  V:{}", mark(ok), b, name_of(r), name_of(s),
               slope, -beta, seq);
        o.require(ok);
      }
    }
  }
  return o;
}

// ------------------------------------------------------------------ 7

double model_total_cost(const ModelSpec& m, SchemeKind s, double eps) {
  const auto cfg = make_mlmc_config(m, s, eps);
  const std::size_t L = choose_num_levels(cfg);
  std::vector<double> v(L + 1), c(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    v[l] = model_variance(l, cfg.rates.beta);
    c[l] = model_cost(l, cfg.rates.gamma);
  }
  const auto M = allocate_samples(cfg, L, v, c);
  double total = 0;
  for (std::size_t l = 0; l <= L; ++l) total += static_cast<double>(M[l]) * c[l];
  return total;
}

SpectralField acceptance_reference(ReactionKind r, double b, double& seconds) {
  harness::CliOverrides ov;
  ov.out_dir = kOut;
  ov.timing = false;
  const auto cfg = harness::parse_config(
      fmt::format("[model]\nb = {}\nreaction = \"{}\"\n[run]\nseed = {}\n", b, name_of(r), kSeed), ov);
  const auto path = harness::reference_cache_path(cfg);
  const auto t0 = Clock::now();
  if (fs::exists(path)) {
    seconds = 0;
    return harness::load_reference(cfg);
  }
  const auto spec = harness::reference_spec(cfg);
  const auto field = harness::compute_reference(cfg, spec);
  harness::write_text(path, harness::serialize_reference(cfg, spec, field));
  seconds = since(t0);
  return field;
}

Outcome cost_separation() {
  Outcome o;
  const double budget_h = [] {
    const char* e = std::getenv("SPDE_ACCEPT_BUDGET_HOURS");
    return e ? std::atof(e) : 1.0;
  }();
  const double budget = 3600.0 * budget_h;
  const std::vector<unsigned> exps{4, 5, 6, 7};

  // Cost exponents from the model cost sum M_l C_l, which does not depend on samples.
  std::map<std::pair<double, SchemeKind>, double> slope;
  for (double b : {0.25, 0.5}) {
    const auto m = default_model(b, ReactionKind::Linear);
    for (SchemeKind s : kAllSchemes) {
      std::vector<double> x, y;
      std::string seq;
      for (unsigned k : exps) {
        const double c = model_total_cost(m, s, std::ldexp(1.0, -static_cast<int>(k)));
        x.push_back(k);
        y.push_back(std::log2(c));
        seq += fmt::format(" L={} cost={:.3e};", choose_num_levels(make_mlmc_config(m, s, std::ldexp(1.0, -static_cast<int>(k)))), c);
      }
      slope[{b, s}] = ols_slope(x, y);
      o.note("b={} {:<16} log-cost slope {:.3f} |{}", b, name_of(s), slope[{b, s}], seq);
    }
  }
  const double ee = slope[{0.25, SchemeKind::ExpEuler}];
  const double mil = slope[{0.25, SchemeKind::Milstein}];
  const double dee = slope[{0.25, SchemeKind::DriftExpEuler}];
  const bool near2 = std::abs(ee - 2.0) <= 0.6;
  const bool near3 = std::abs(mil - 3.0) <= 0.6 && std::abs(dee - 3.0) <= 0.6;
  const bool sep = std::min(mil, dee) - ee >= 0.6;
  double lo = 1e9, hi = -1e9;
  for (SchemeKind s : kAllSchemes) {
    lo = std::min(lo, slope[{0.5, s}]);
    hi = std::max(hi, slope[{0.5, s}]);
  }
  const bool close = hi - lo <= 0.3;
  o.note("{} b=1/4 exponential Euler slope {:.3f} ~ 2 (+-0.6)", mark(near2), ee);
  o.note("{} b=1/4 Milstein / drift-exponential slopes {:.3f} / {:.3f} ~ 3 (+-0.6)", mark(near3), mil, dee);
  o.note("{} b=1/4 separation {:.3f} >= 0.6", mark(sep), std::min(mil, dee) - ee);
  o.note("{} b=1/2 spread of the three slopes {:.3f} <= 0.3", mark(close), hi - lo);
  o.require(near2 && near3 && sep && close);

  // 32-run MSE against the pseudo-reference, b = 1/4, cheapest cells first.
  harness::ensure_directory(kOut);
  std::FILE* csv = std::fopen((kOut / "compare.csv").c_str(), "w");
  fmt::print(csv, "method,reaction,b,epsilon,repetition,error_sq,model_cost,ops_measured,seconds\n");
  const auto t_start = Clock::now();
  std::map<ReactionKind, SpectralField> refs;
  std::map<std::pair<ReactionKind, SchemeKind>, double> sec_per_cost;
  std::size_t skipped = 0;
  const double b = 0.25;
  for (unsigned k : exps) {
    const double eps = std::ldexp(1.0, -static_cast<int>(k));
    for (ReactionKind r : {ReactionKind::Linear, ReactionKind::Trigonometric}) {
      const auto m = default_model(b, r);
      if (!refs.count(r)) {
        double secs = 0;
        if (r == ReactionKind::Trigonometric && since(t_start) + 900.0 > budget &&
            !fs::exists(kOut / "cache")) {
          o.note("trig pseudo-reference not computed (budget)");
        }
        refs[r] = acceptance_reference(r, b, secs);
        o.note("pseudo-reference {} b={} ready ({:.0f} s)", name_of(r), b, secs);
      }
      for (SchemeKind s : kAllSchemes) {
        const double cost = model_total_cost(m, s, eps);
        const auto key = std::make_pair(r, s);
        const double projected = sec_per_cost.count(key) ? 32.0 * cost * sec_per_cost[key] : 0.0;
        if (since(t_start) + projected > budget) {
          ++skipped;
          o.note("BAD {:<13} {:<16} eps=2^-{}  not executed: projected {:.1f} h exceeds the remaining budget", name_of(r),
                 name_of(s), k, projected / 3600.0);
          continue;
        }
        const auto cfg = make_mlmc_config(m, s, eps);
        const auto t0 = Clock::now();
        double sum = 0;
        for (std::uint64_t rep = 0; rep < 32; ++rep) {
          const auto rpt = run_estimator(m, cfg, derive_seed(kSeed, rep));
          const double d = harness::h_distance(rpt.mean, refs[r]);
          sum += d * d;
          fmt::print(csv, "{},{},{},{},{},{},{},{},{}\n", name_of(s), name_of(r), b, eps, rep, d * d,
                     rpt.total_model_cost, rpt.total_ops, rpt.total_seconds);
        }
        std::fflush(csv);
        const double secs = since(t0);
        sec_per_cost[key] = secs / (32.0 * cost);
        const double c = sum / 32.0 / (eps * eps);
        const bool ok = c <= 10.0;
        o.note("{} {:<13} {:<16} eps=2^-{}  MSE/eps^2 = {:.4f} (<= 10)  [{:.0f} s]", mark(ok), name_of(r), name_of(s),
               k, c, secs);
        o.require(ok);
      }
    }
  }
  std::fclose(csv);
  if (skipped) {
    o.note("{} of 24 MSE cells not executed within SPDE_ACCEPT_BUDGET_HOURS={}", skipped, budget_h);
    o.require(false);
  }
  return o;
}

// ------------------------------------------------------------------ 8

Outcome telescoping() {
  Outcome o;
  const double eps = 1.0 / 32;
  for (double b : {0.25, 0.5}) {
    const auto m = default_model(b, ReactionKind::Linear);
    for (SchemeKind s : kAllSchemes) {
      const auto cfg = make_mlmc_config(m, s, eps);
      const auto t0 = Clock::now();
      std::vector<SpectralField> means;
      for (std::uint64_t rep = 0; rep < 32; ++rep) means.push_back(run_estimator(m, cfg, derive_seed(kSeed, rep)).mean);
      const std::size_t L = choose_num_levels(cfg);
      const auto top = level_resolutions(L, cfg);
      const auto ref = solve_deterministic(m, top.n_modes, top.n_steps, s);
      SpectralField avg(means[0].n_modes());
      for (const auto& x : means) avg += x;
      avg *= 1.0 / 32.0;
      double spread = 0;
      for (const auto& x : means) spread += std::pow(h_norm(x - avg), 2);
      const double se = std::sqrt(spread / 31.0 / 32.0);
      const double dist = h_norm(avg - ref);
      const bool ok = dist <= 3.0 * se;
      o.note("{} b={} {:<16} L={} ||mean of 32 - reference|| = {:.3e}, SE = {:.3e}, ratio {:.2f} (<= 3) [{:.0f} s]",
             mark(ok), b, name_of(s), L, dist, se, dist / se, since(t0));
      o.require(ok);
    }
  }
  return o;
}

struct Criterion {
  const char* name;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"sample-allocation", "sample allocation matches the exact M_l sequence for eps = 2^-11", sample_allocation},
      {"sdc", "SDC exactness for exponential Euler, strict coupling error for the others", sdc_exactness},
      {"pathwise", "coarse member equals a direct coarse solve on the derived noise", pathwise_correctness},
      {"exact-law", "exponential Euler OU law over 10^4 paths, any J", exact_law},
      {"rates", "desk-scale time and space convergence rates", rate_reproduction},
      {"variance-decay", "measured level variance decays like 2^{-beta l}", variance_decay},
      {"cost-separation", "cost exponents and 32-run MSE across the epsilon sweep", cost_separation},
      {"telescoping", "32-run estimator mean matches the finest deterministic solve", telescoping},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
    fmt::print("{}: {}\n", c.name, c.title);
    std::fflush(stdout);
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note("exception: {}", e.what());
    }
    fmt::print("{} {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.name, since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
