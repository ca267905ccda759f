#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spde/mlmc.hpp"
#include "spde/model.hpp"
#include "spde/rates.hpp"
#include "spde/scheme.hpp"

namespace spde::harness {

enum class Scale { Desk, Paper };

Scale parse_scale(std::string_view name);
std::string_view to_string(Scale s) noexcept;

struct ModelBlock {
  double b = 0.25;
  double final_time = 0.5;
  ReactionKind reaction = ReactionKind::Linear;
  std::string lambda_law = "default";
};

struct RatesBlock {
  std::vector<RateAxis> axes{RateAxis::Time, RateAxis::Space};
  std::size_t time_fixed_modes = 256;
  unsigned time_min_exp = 4;   // resolutions 2^min .. 2^max; pairs (2J, J) with J < 2^max
  unsigned time_max_exp = 10;
  std::uint64_t time_samples = 2000;
  std::size_t space_fixed_steps = std::size_t{1} << 14;
  unsigned space_min_exp = 2;  // likewise, pairs (2N, N) with N < 2^max
  unsigned space_max_exp = 9;
  std::uint64_t space_samples = 128;
};

struct MlmcBlock {
  std::vector<unsigned> epsilon_exponents{4, 5, 6, 7};  // eps = 2^-k
  std::string level_rule = "paper";                     // paper | theorem
  VarianceMode variance_mode = VarianceMode::Model;
  std::uint64_t multiplier_first = 20;
  std::uint64_t multiplier_rest = 5;
  std::uint64_t pilot_samples = 64;
  unsigned repetitions = 1;
};

struct ReferenceBlock {
  std::size_t modes = std::size_t{1} << 10;          // deterministic reference band
  std::size_t steps = std::size_t{1} << 14;
  std::optional<unsigned> overkill_exponent;         // default: max sweep exponent + 2
};

struct CouplingBlock {
  std::size_t modes = 256;
  std::vector<std::size_t> steps{64, 256, 1024};
};

struct ExperimentConfig {
  std::string name = "unnamed";
  ModelBlock model;
  std::vector<SchemeKind> schemes{SchemeKind::ExpEuler, SchemeKind::DriftExpEuler,
                                  SchemeKind::Milstein};
  Scale scale = Scale::Desk;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  std::filesystem::path out_dir = "out";
  bool timing = true;
  RatesBlock rates;
  MlmcBlock mlmc;
  ReferenceBlock reference;
  CouplingBlock coupling;

  ModelSpec model_spec() const;
  MlmcConfig mlmc_config(SchemeKind scheme, double epsilon) const;
  unsigned overkill_exponent() const;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<Scale> scale;
  std::optional<std::filesystem::path> out_dir;
  std::optional<bool> timing;
};

/// Resolution and sample defaults of a scale preset.
void apply_scale_defaults(ExperimentConfig& cfg, Scale scale);

/// Parses a TOML document. The scale preset (CLI override, else [run].scale,
/// else desk) supplies defaults; keys present in the document override them.
/// Unknown keys are a ConfigError so typos do not pass silently.
ExperimentConfig parse_config(std::string_view toml_text, const CliOverrides& overrides = {},
                              std::string_view source_name = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides = {});

}  // namespace spde::harness
