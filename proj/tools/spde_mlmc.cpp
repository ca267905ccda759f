#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <exception>
#include <string>

#include "spde/error.hpp"
#include "spde/harness/commands.hpp"
#include "spde/harness/config.hpp"
#include "spde/simd/kernels.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kModel = 3, kMissing = 4 };

int fail(int code, const std::exception& e) {
  fmt::print(stderr, "spde-mlmc: error: {}\n", e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spde;
  CLI::App app{"Spectral-Galerkin SPDE solver and multilevel Monte Carlo experiments"};
  app.set_version_flag("--version", std::string(harness::code_version()));

  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string scale;
  std::string out;
  bool no_timing = false;

  app.add_option("command", command, "rates | mlmc | reference | compare | coupling-demo")
      ->required()
      ->check(CLI::IsMember({"rates", "mlmc", "reference", "compare", "coupling-demo"}));
  app.add_option("--config", config_path, "TOML experiment file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (default: all cores)");
  auto* scale_opt = app.add_option("--scale", scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  auto* out_opt = app.add_option("--out", out, "output directory");
  app.add_flag("--no-timing", no_timing, "write 0 for wall-clock columns (byte-stable output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    harness::CliOverrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*threads_opt) ov.threads = threads;
    if (*scale_opt) ov.scale = harness::parse_scale(scale);
    if (*out_opt) ov.out_dir = out;
    if (no_timing) ov.timing = false;
    const auto cfg = harness::load_config(config_path, ov);
    const auto cmd = harness::parse_command(command);
    fmt::print(stderr, "[spde-mlmc] {} {} ({} scale, seed {}, kernels {})\n", command, cfg.name,
               harness::to_string(cfg.scale), cfg.seed, simd::to_string(simd::kernels().isa));
    harness::run_command(cmd, cfg);
    fmt::print(stderr, "[spde-mlmc] outputs in {}\n", cfg.out_dir.string());
    return kOk;
  } catch (const ConfigError& e) {
    return fail(kConfig, e);
  } catch (const ModelError& e) {
    return fail(kModel, e);
  } catch (const MissingArtifactError& e) {
    return fail(kMissing, e);
  } catch (const std::exception& e) {
    return fail(kOther, e);
  }
}
