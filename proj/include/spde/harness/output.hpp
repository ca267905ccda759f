#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spde/harness/config.hpp"
#include "spde/spectral.hpp"

namespace spde::harness {

using Json = nlohmann::ordered_json;

std::string_view code_version() noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

/// Every input that affects results, in a fixed key order.
Json config_echo(const ExperimentConfig& cfg);
/// Hash of config_echo(cfg).dump().
std::string config_hash(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// CSV with "# key: value" provenance lines ahead of the column header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg, std::string_view command,
            std::initializer_list<std::string_view> columns);

  CsvWriter& cell(std::string_view s);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(unsigned v) { return cell(static_cast<std::uint64_t>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<double>(v)); }
  void end_row();
  void close();

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Creates the directory or throws IoError naming it.
void ensure_directory(const std::filesystem::path& dir);

/// Writes text atomically enough for our purposes (temp file + rename).
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// summary.json skeleton shared by all commands.
Json summary_header(const ExperimentConfig& cfg, std::string_view command);
void write_summary(const std::filesystem::path& path, const Json& summary);

/// Grid values of v at x_k = k / n_points (n_points >= v.n_modes(), power of two).
std::vector<double> grid_values(const SpectralField& v, std::size_t n_points);

}  // namespace spde::harness
