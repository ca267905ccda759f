#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "spde/harness/config.hpp"
#include "spde/harness/output.hpp"
#include "spde/mlmc.hpp"
#include "spde/spectral.hpp"

namespace spde::harness {

enum class Command { Rates, Mlmc, Reference, Compare, CouplingDemo };

Command parse_command(std::string_view name);
std::string_view to_string(Command c) noexcept;

/// Pseudo-reference for E[U(T)]: a deterministic solve for linear or zero
/// reaction, an overkill exponential Euler MLMC run otherwise.
struct ReferenceSpec {
  std::string kind;            // "deterministic" | "overkill-mlmc"
  std::size_t modes = 0;       // deterministic only
  std::size_t steps = 0;       // deterministic only
  unsigned epsilon_exponent = 0;  // overkill only
  std::uint64_t seed = 0;      // overkill only

  /// Canonical text of everything that determines the reference.
  std::string key_text(const ExperimentConfig& cfg) const;
};

ReferenceSpec reference_spec(const ExperimentConfig& cfg);
std::filesystem::path reference_cache_path(const ExperimentConfig& cfg);

/// Computes the reference field. Slow for the overkill kind.
SpectralField compute_reference(const ExperimentConfig& cfg, const ReferenceSpec& spec);

/// Serialized form stored in the cache; exact round trip of every coefficient.
std::string serialize_reference(const ExperimentConfig& cfg, const ReferenceSpec& spec,
                                const SpectralField& field);
SpectralField parse_reference(std::string_view text);

/// Loads the cached reference; MissingArtifactError when absent.
SpectralField load_reference(const ExperimentConfig& cfg);

/// ||a - b||_H after embedding both into the larger band.
double h_distance(const SpectralField& a, const SpectralField& b);

/// Each command writes its CSV files and summary.json into cfg.out_dir and
/// returns the summary.
Json cmd_rates(const ExperimentConfig& cfg);
Json cmd_mlmc(const ExperimentConfig& cfg);
Json cmd_reference(const ExperimentConfig& cfg);
Json cmd_compare(const ExperimentConfig& cfg);
Json cmd_coupling_demo(const ExperimentConfig& cfg);

Json run_command(Command c, const ExperimentConfig& cfg);

}  // namespace spde::harness
