#include "spde/harness/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spde/error.hpp"

namespace spde::harness {

Scale parse_scale(std::string_view name) {
  if (name == "desk") return Scale::Desk;
  if (name == "paper") return Scale::Paper;
  throw ConfigError("unknown scale '" + std::string(name) + "' (expected desk|paper)");
}

std::string_view to_string(Scale s) noexcept { return s == Scale::Desk ? "desk" : "paper"; }

void apply_scale_defaults(ExperimentConfig& cfg, Scale scale) {
  cfg.scale = scale;
  if (scale == Scale::Desk) {
    cfg.rates = RatesBlock{};
    cfg.mlmc.epsilon_exponents = {4, 5, 6, 7};
    cfg.reference.modes = std::size_t{1} << 10;
    cfg.reference.steps = std::size_t{1} << 14;
  } else {
    cfg.rates.time_fixed_modes = 1024;
    cfg.rates.time_min_exp = 4;
    cfg.rates.time_max_exp = 12;
    cfg.rates.time_samples = 10000;
    cfg.rates.space_fixed_steps = std::size_t{1} << 18;
    cfg.rates.space_min_exp = 2;
    cfg.rates.space_max_exp = 10;
    cfg.rates.space_samples = 250;
    cfg.mlmc.epsilon_exponents = {4, 5, 6, 7, 8, 9};
    cfg.reference.modes = std::size_t{1} << 13;
    cfg.reference.steps = std::size_t{1} << 18;
  }
  cfg.reference.overkill_exponent.reset();
  cfg.coupling = CouplingBlock{};
}

ModelSpec ExperimentConfig::model_spec() const {
  if (model.lambda_law != "default")
    throw ConfigError("unknown eigenvalue law '" + model.lambda_law + "' (expected default)");
  return default_model(model.b, model.reaction, model.final_time);
}

MlmcConfig ExperimentConfig::mlmc_config(SchemeKind scheme, double epsilon) const {
  MlmcConfig c = make_mlmc_config(model_spec(), scheme, epsilon);
  if (mlmc.level_rule == "theorem")
    c.rule = scheme == SchemeKind::ExpEuler ? LevelRule::Theorem2 : LevelRule::Theorem3;
  c.variance_mode = mlmc.variance_mode;
  c.multiplier_first = mlmc.multiplier_first;
  c.multiplier_rest = mlmc.multiplier_rest;
  c.pilot_samples = mlmc.pilot_samples;
  c.threads = threads;
  return c;
}

unsigned ExperimentConfig::overkill_exponent() const {
  if (reference.overkill_exponent) return *reference.overkill_exponent;
  const auto it = std::max_element(mlmc.epsilon_exponents.begin(), mlmc.epsilon_exponents.end());
  return (it == mlmc.epsilon_exponents.end() ? 7u : *it) + 2u;
}

namespace {

void check_keys(const toml::table& t, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : t) {
    (void)node;
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end())
      throw ConfigError("unknown key '" + std::string(key.str()) + "' in [" + std::string(section) + "]");
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError("[" + std::string(name) + "] must be a table");
  return n->as_table();
}

template <class T>
void read(const toml::table* t, std::string_view section_name, std::string_view key, T& out) {
  if (!t) return;
  const toml::node* n = t->get(key);
  if (!n) return;
  auto fail = [&](const char* what) {
    throw ConfigError("[" + std::string(section_name) + "]." + std::string(key) + " must be " + what);
  };
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = n->value<double>()) out = *v;
    else fail("a number");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = n->value<bool>()) out = *v;
    else fail("a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n->value<std::string>()) out = *v;
    else fail("a string");
  } else {
    static_assert(std::is_integral_v<T>);
    auto v = n->value<std::int64_t>();
    if (!v || *v < 0) fail("a non-negative integer");
    out = static_cast<T>(*v);
  }
}

template <class T>
void read_array(const toml::table* t, std::string_view section_name, std::string_view key,
                std::vector<T>& out) {
  if (!t) return;
  const toml::node* n = t->get(key);
  if (!n) return;
  const toml::array* arr = n->as_array();
  if (!arr) throw ConfigError("[" + std::string(section_name) + "]." + std::string(key) + " must be an array");
  std::vector<T> values;
  for (const auto& item : *arr) {
    if constexpr (std::is_same_v<T, std::string>) {
      auto v = item.value<std::string>();
      if (!v) throw ConfigError("[" + std::string(section_name) + "]." + std::string(key) + " must hold strings");
      values.push_back(*v);
    } else {
      auto v = item.value<std::int64_t>();
      if (!v || *v < 0)
        throw ConfigError("[" + std::string(section_name) + "]." + std::string(key) +
                          " must hold non-negative integers");
      values.push_back(static_cast<T>(*v));
    }
  }
  out = std::move(values);
}

void validate(const ExperimentConfig& c) {
  if (!(c.model.b > 0.0)) throw ConfigError("[model].b must be positive");
  if (!(c.model.final_time > 0.0)) throw ConfigError("[model].T must be positive");
  if (c.schemes.empty()) throw ConfigError("[run].schemes must not be empty");
  for (unsigned e : c.mlmc.epsilon_exponents)
    if (e == 0 || e > 30) throw ConfigError("[mlmc].epsilon_exponents must lie in 1..30");
  if (c.mlmc.epsilon_exponents.empty()) throw ConfigError("[mlmc].epsilon_exponents must not be empty");
  if (c.mlmc.level_rule != "paper" && c.mlmc.level_rule != "theorem")
    throw ConfigError("[mlmc].level_rule must be paper or theorem");
  if (c.mlmc.repetitions == 0) throw ConfigError("[mlmc].repetitions must be positive");
  if (c.mlmc.multiplier_first == 0 || c.mlmc.multiplier_rest == 0)
    throw ConfigError("[mlmc].multipliers must be positive");
  const auto& r = c.rates;
  if (r.time_max_exp < r.time_min_exp + 4 || r.space_max_exp < r.space_min_exp + 4)
    throw ConfigError("rate grids need at least 4 points");
  if (r.time_max_exp > 24 || r.space_max_exp > 20) throw ConfigError("rate grid exponent too large");
  require_power_of_two(r.time_fixed_modes, "[rates].time_fixed_modes");
  if (r.space_fixed_steps == 0) throw ConfigError("[rates].space_fixed_steps must be positive");
  if (r.time_samples < 2 || r.space_samples < 2) throw ConfigError("rate studies need >= 2 samples");
  require_power_of_two(c.reference.modes, "[reference].modes");
  if (c.reference.steps == 0) throw ConfigError("[reference].steps must be positive");
  require_power_of_two(c.coupling.modes, "[coupling].modes");
  for (std::size_t j : c.coupling.steps)
    if (j < 2 || j % 2 != 0) throw ConfigError("[coupling].steps must be even and >= 2");
}

}  // namespace

ExperimentConfig parse_config(std::string_view toml_text, const CliOverrides& overrides,
                              std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "cannot parse " << source_name << ": " << e.description() << " at line "
        << e.source().begin.line;
    throw ConfigError(msg.str());
  }
  check_keys(root, "root", {"name", "model", "run", "rates", "mlmc", "reference", "coupling"});
  const auto* model = section(root, "model");
  const auto* run = section(root, "run");
  const auto* rates = section(root, "rates");
  const auto* mlmc = section(root, "mlmc");
  const auto* reference = section(root, "reference");
  const auto* coupling = section(root, "coupling");
  if (model) check_keys(*model, "model", {"b", "T", "reaction", "lambda_law"});
  if (run) check_keys(*run, "run", {"mode", "schemes", "seed", "scale", "threads", "out", "timing"});
  if (rates)
    check_keys(*rates, "rates",
               {"axes", "time_fixed_modes", "time_min_exp", "time_max_exp", "time_samples",
                "space_fixed_steps", "space_min_exp", "space_max_exp", "space_samples"});
  if (mlmc)
    check_keys(*mlmc, "mlmc",
               {"epsilon_exponents", "level_rule", "variance_mode", "multipliers", "pilot_samples",
                "repetitions"});
  if (reference) check_keys(*reference, "reference", {"modes", "steps", "overkill_exponent"});
  if (coupling) check_keys(*coupling, "coupling", {"modes", "steps"});

  ExperimentConfig cfg;
  std::string scale_name = "desk";
  read(run, "run", "scale", scale_name);
  apply_scale_defaults(cfg, overrides.scale ? *overrides.scale : parse_scale(scale_name));

  if (auto n = root.get("name")) {
    if (auto v = n->value<std::string>()) cfg.name = *v;
    else throw ConfigError("name must be a string");
  }
  read(model, "model", "b", cfg.model.b);
  read(model, "model", "T", cfg.model.final_time);
  std::string reaction(to_string(cfg.model.reaction));
  read(model, "model", "reaction", reaction);
  cfg.model.reaction = parse_reaction(reaction);
  read(model, "model", "lambda_law", cfg.model.lambda_law);

  std::vector<std::string> schemes;
  read_array(run, "run", "schemes", schemes);
  if (!schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : schemes) cfg.schemes.push_back(parse_scheme(s));
  }
  std::string mode;
  read(run, "run", "mode", mode);
  if (!mode.empty() && mode != "rates" && mode != "mlmc" && mode != "reference" &&
      mode != "compare" && mode != "coupling-demo")
    throw ConfigError("[run].mode '" + mode + "' is not a command");
  read(run, "run", "seed", cfg.seed);
  read(run, "run", "threads", cfg.threads);
  std::string out;
  read(run, "run", "out", out);
  if (!out.empty()) cfg.out_dir = out;
  read(run, "run", "timing", cfg.timing);

  std::vector<std::string> axes;
  read_array(rates, "rates", "axes", axes);
  if (!axes.empty()) {
    cfg.rates.axes.clear();
    for (const auto& a : axes) cfg.rates.axes.push_back(parse_rate_axis(a));
  }
  read(rates, "rates", "time_fixed_modes", cfg.rates.time_fixed_modes);
  read(rates, "rates", "time_min_exp", cfg.rates.time_min_exp);
  read(rates, "rates", "time_max_exp", cfg.rates.time_max_exp);
  read(rates, "rates", "time_samples", cfg.rates.time_samples);
  read(rates, "rates", "space_fixed_steps", cfg.rates.space_fixed_steps);
  read(rates, "rates", "space_min_exp", cfg.rates.space_min_exp);
  read(rates, "rates", "space_max_exp", cfg.rates.space_max_exp);
  read(rates, "rates", "space_samples", cfg.rates.space_samples);

  read_array(mlmc, "mlmc", "epsilon_exponents", cfg.mlmc.epsilon_exponents);
  read(mlmc, "mlmc", "level_rule", cfg.mlmc.level_rule);
  std::string vmode(to_string(cfg.mlmc.variance_mode));
  read(mlmc, "mlmc", "variance_mode", vmode);
  cfg.mlmc.variance_mode = parse_variance_mode(vmode);
  std::vector<std::uint64_t> mult;
  read_array(mlmc, "mlmc", "multipliers", mult);
  if (!mult.empty()) {
    if (mult.size() != 2) throw ConfigError("[mlmc].multipliers must have two entries");
    cfg.mlmc.multiplier_first = mult[0];
    cfg.mlmc.multiplier_rest = mult[1];
  }
  read(mlmc, "mlmc", "pilot_samples", cfg.mlmc.pilot_samples);
  read(mlmc, "mlmc", "repetitions", cfg.mlmc.repetitions);

  read(reference, "reference", "modes", cfg.reference.modes);
  read(reference, "reference", "steps", cfg.reference.steps);
  if (reference && reference->get("overkill_exponent")) {
    unsigned e = 0;
    read(reference, "reference", "overkill_exponent", e);
    cfg.reference.overkill_exponent = e;
  }
  read(coupling, "coupling", "modes", cfg.coupling.modes);
  read_array(coupling, "coupling", "steps", cfg.coupling.steps);

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.timing) cfg.timing = *overrides.timing;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, path.string());
}

}  // namespace spde::harness
