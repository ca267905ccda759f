#include "spde/harness/output.hpp"

#include <fmt/format.h>

#include <sstream>
#include <system_error>

#include "spde/error.hpp"
#include "spde/transform.hpp"

#ifndef SPDE_VERSION
#define SPDE_VERSION "0.0.0"
#endif

namespace spde::harness {

std::string_view code_version() noexcept { return SPDE_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

Json config_echo(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["model"] = {{"b", cfg.model.b},
                {"T", cfg.model.final_time},
                {"reaction", std::string(to_string(cfg.model.reaction))},
                {"lambda_law", cfg.model.lambda_law}};
  Json schemes = Json::array();
  for (auto s : cfg.schemes) schemes.push_back(std::string(to_string(s)));
  j["run"] = {{"schemes", schemes},
              {"seed", cfg.seed},
              {"scale", std::string(to_string(cfg.scale))}};
  Json axes = Json::array();
  for (auto a : cfg.rates.axes) axes.push_back(std::string(to_string(a)));
  const auto& r = cfg.rates;
  j["rates"] = {{"axes", axes},
                {"time_fixed_modes", r.time_fixed_modes},
                {"time_min_exp", r.time_min_exp},
                {"time_max_exp", r.time_max_exp},
                {"time_samples", r.time_samples},
                {"space_fixed_steps", r.space_fixed_steps},
                {"space_min_exp", r.space_min_exp},
                {"space_max_exp", r.space_max_exp},
                {"space_samples", r.space_samples}};
  const auto& m = cfg.mlmc;
  j["mlmc"] = {{"epsilon_exponents", m.epsilon_exponents},
               {"level_rule", m.level_rule},
               {"variance_mode", std::string(to_string(m.variance_mode))},
               {"multipliers", {m.multiplier_first, m.multiplier_rest}},
               {"pilot_samples", m.pilot_samples},
               {"repetitions", m.repetitions}};
  j["reference"] = {{"modes", cfg.reference.modes},
                    {"steps", cfg.reference.steps},
                    {"overkill_exponent", cfg.overkill_exponent()}};
  j["coupling"] = {{"modes", cfg.coupling.modes}, {"steps", cfg.coupling.steps}};
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(config_echo(cfg).dump())); }

std::string format_double(double v) { return fmt::format("{}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg,
                     std::string_view command, std::initializer_list<std::string_view> columns)
    : path_(path), columns_(columns.size()) {
  ensure_directory(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_ << "# spde-mlmc " << code_version() << '\n'
       << "# command: " << command << '\n'
       << "# scale: " << to_string(cfg.scale) << '\n'
       << "# seed: " << cfg.seed << '\n'
       << "# config_hash: " << config_hash(cfg) << '\n';
  bool first = true;
  for (auto c : columns) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (in_row_++ > 0) out_ << ',';
  out_ << s;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::string_view(fmt::format("{}", v))); }

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw UsageError(fmt::format("{}: row has {} cells, header has {}", path_.string(), in_row_, columns_));
  out_ << '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
  out_.close();
}

void ensure_directory(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  ensure_directory(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json summary_header(const ExperimentConfig& cfg, std::string_view command) {
  Json j;
  j["tool"] = "spde-mlmc";
  j["version"] = std::string(code_version());
  j["command"] = std::string(command);
  j["scale"] = std::string(to_string(cfg.scale));
  j["seed"] = cfg.seed;
  j["config_hash"] = config_hash(cfg);
  j["config"] = config_echo(cfg);
  return j;
}

void write_summary(const std::filesystem::path& path, const Json& summary) {
  write_text(path, summary.dump(2) + "\n");
}

std::vector<double> grid_values(const SpectralField& v, std::size_t n_points) {
  require_power_of_two(n_points, "grid size");
  if (n_points < v.n_modes()) throw ResolutionError("grid coarser than the field");
  return to_grid(n_points == v.n_modes() ? v : pad(v, n_points));
}

}  // namespace spde::harness
