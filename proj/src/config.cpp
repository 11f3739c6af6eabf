#include "qsi/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "qsi/errors.hpp"

namespace qsi {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* k) { return it.key() == k; });
    if (!known)
      throw ConfigError("config: unknown key '" + scope + it.key() + "'");
  }
}

const json& member(const json& obj, const char* key) {
  static const json missing;
  const auto it = obj.find(key);
  return it == obj.end() ? missing : *it;
}

void read_double(const json& obj, const std::string& scope, const char* key,
                 double& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_number())
    throw ConfigError("config: '" + scope + key + "' must be a number");
  target = v.get<double>();
}

void read_int(const json& obj, const std::string& scope, const char* key,
              int& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_number_integer())
    throw ConfigError("config: '" + scope + key + "' must be an integer");
  target = v.get<int>();
}

void read_int64(const json& obj, const std::string& scope, const char* key,
                long long& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_number_integer())
    throw ConfigError("config: '" + scope + key + "' must be an integer");
  target = v.get<long long>();
}

void read_bool(const json& obj, const std::string& scope, const char* key,
               bool& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_boolean())
    throw ConfigError("config: '" + scope + key + "' must be a boolean");
  target = v.get<bool>();
}

void read_string(const json& obj, const std::string& scope, const char* key,
                 std::string& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_string())
    throw ConfigError("config: '" + scope + key + "' must be a string");
  target = v.get<std::string>();
}

void read_double_list(const json& obj, const std::string& scope,
                      const char* key, std::vector<double>& target) {
  const json& v = member(obj, key);
  if (v.is_null()) return;
  if (!v.is_array())
    throw ConfigError("config: '" + scope + key + "' must be an array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number())
      throw ConfigError("config: '" + scope + key +
                        "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  target = std::move(out);
}

void parse_source(const json& v, const std::string& scope, SourceSpec& spec) {
  if (v.is_null()) return;
  if (!v.is_object())
    throw ConfigError("config: '" + scope + "' must be an object");
  if (spec.kind == SourceKind::Wcs) {
    check_keys(v, scope + ".", {"mean_intensity", "repetition_rate"});
  } else {
    check_keys(v, scope + ".",
               {"mean_intensity", "herald_efficiency", "herald_dark",
                "correlation_prob", "repetition_rate"});
    read_double(v, scope + ".", "herald_efficiency", spec.herald_efficiency);
    read_double(v, scope + ".", "herald_dark", spec.herald_dark);
    read_double(v, scope + ".", "correlation_prob", spec.correlation_prob);
  }
  read_double(v, scope + ".", "mean_intensity", spec.mean_intensity);
  read_double(v, scope + ".", "repetition_rate", spec.repetition_rate);
}

EstimationMethod parse_method(const std::string& s, const std::string& scope) {
  if (s == "analytic_vacuum_weak") return EstimationMethod::AnalyticVacuumWeak;
  if (s == "linear_program") return EstimationMethod::LinearProgram;
  throw ConfigError("config: '" + scope +
                    "' must be 'analytic_vacuum_weak' or 'linear_program'");
}

Eavesdropper parse_eavesdropper(const std::string& s,
                                const std::string& scope) {
  if (s == "none") return Eavesdropper::None;
  if (s == "intercept_resend") return Eavesdropper::InterceptResend;
  throw ConfigError("config: '" + scope +
                    "' must be 'none' or 'intercept_resend'");
}

SourceKind parse_kind(const std::string& s, const std::string& scope) {
  if (s == "wcs") return SourceKind::Wcs;
  if (s == "hsps") return SourceKind::Hsps;
  throw ConfigError("config: '" + scope + "' must be 'wcs' or 'hsps'");
}

DecoyScaling parse_scaling(const std::string& s, const std::string& scope) {
  if (s == "fixed") return DecoyScaling::Fixed;
  if (s == "mu_ratio") return DecoyScaling::MuRatio;
  throw ConfigError("config: '" + scope + "' must be 'fixed' or 'mu_ratio'");
}

void parse_regime(const json& v, const std::string& scope, Fig3Regime& regime) {
  if (v.is_null()) return;
  if (!v.is_object())
    throw ConfigError("config: '" + scope + "' must be an object");
  check_keys(v, scope + ".", {"mu_points", "decoys"});
  read_double_list(v, scope + ".", "mu_points", regime.mu_points);
  read_double_list(v, scope + ".", "decoys", regime.decoys);
  if (regime.mu_points.empty())
    throw ConfigError("config: '" + scope + ".mu_points' must be nonempty");
}

}  // namespace

RunConfig::RunConfig() {
  wcs.kind = SourceKind::Wcs;
  wcs.repetition_rate = 1e9;
  hsps.kind = SourceKind::Hsps;
  hsps.repetition_rate = 1e7;
}

Fig3Config::Fig3Config() {
  for (int db = 0; db <= 40; db += 2) loss_points.push_back(db);
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ConfigError("config: document root must be an object");
  check_keys(doc, "",
             {"seed", "output", "channel", "wcs", "hsps", "decoy",
              "decoy_scaling", "fig1", "fig2", "fig3", "imaging", "optimize"});

  RunConfig cfg;

  const json& seed = member(doc, "seed");
  if (!seed.is_null()) {
    if (!seed.is_number_integer() && !seed.is_number_unsigned())
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    if (seed.is_number_integer() && seed.get<long long>() < 0)
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    cfg.seed = seed.get<std::uint64_t>();
    cfg.seed_present = true;
  }

  const json& output = member(doc, "output");
  if (!output.is_null()) {
    if (!output.is_object())
      throw ConfigError("config: 'output' must be an object");
    check_keys(output, "output.", {"csv", "json"});
    read_bool(output, "output.", "csv", cfg.output.csv);
    read_bool(output, "output.", "json", cfg.output.json);
  }

  const json& channel = member(doc, "channel");
  if (!channel.is_null()) {
    if (!channel.is_object())
      throw ConfigError("config: 'channel' must be an object");
    check_keys(channel, "channel.", {"loss_db", "eta_b", "y0", "e_det"});
    read_double(channel, "channel.", "loss_db", cfg.channel.loss_db);
    read_double(channel, "channel.", "eta_b", cfg.channel.eta_b);
    read_double(channel, "channel.", "y0", cfg.channel.y0);
    read_double(channel, "channel.", "e_det", cfg.channel.e_det);
  }

  parse_source(member(doc, "wcs"), "wcs", cfg.wcs);
  parse_source(member(doc, "hsps"), "hsps", cfg.hsps);

  const json& decoy = member(doc, "decoy");
  if (!decoy.is_null()) {
    if (!decoy.is_object())
      throw ConfigError("config: 'decoy' must be an object");
    check_keys(decoy, "decoy.",
               {"signal_intensity", "decoy_intensities", "q_factor", "f_ec",
                "method", "n_cut"});
    read_double(decoy, "decoy.", "signal_intensity",
                cfg.decoy.signal_intensity);
    read_double_list(decoy, "decoy.", "decoy_intensities",
                     cfg.decoy.decoy_intensities);
    read_double(decoy, "decoy.", "q_factor", cfg.decoy.q_factor);
    read_double(decoy, "decoy.", "f_ec", cfg.decoy.f_ec);
    std::string method;
    read_string(decoy, "decoy.", "method", method);
    if (!method.empty()) cfg.decoy.method = parse_method(method, "decoy.method");
    read_int(decoy, "decoy.", "n_cut", cfg.decoy.n_cut);
  }

  const json& scaling = member(doc, "decoy_scaling");
  if (!scaling.is_null()) {
    if (!scaling.is_string())
      throw ConfigError("config: 'decoy_scaling' must be a string");
    cfg.decoy_scaling =
        parse_scaling(scaling.get<std::string>(), "decoy_scaling");
  }

  const json& fig1 = member(doc, "fig1");
  if (!fig1.is_null()) {
    if (!fig1.is_object()) throw ConfigError("config: 'fig1' must be an object");
    check_keys(fig1, "fig1.",
               {"alpha", "fano_min", "fano_max", "mean_min", "mean_max",
                "steps"});
    read_double(fig1, "fig1.", "alpha", cfg.fig1.alpha);
    read_double(fig1, "fig1.", "fano_min", cfg.fig1.fano_min);
    read_double(fig1, "fig1.", "fano_max", cfg.fig1.fano_max);
    read_double(fig1, "fig1.", "mean_min", cfg.fig1.mean_min);
    read_double(fig1, "fig1.", "mean_max", cfg.fig1.mean_max);
    read_int(fig1, "fig1.", "steps", cfg.fig1.steps);
  }

  const json& fig2 = member(doc, "fig2");
  if (!fig2.is_null()) {
    if (!fig2.is_object()) throw ConfigError("config: 'fig2' must be an object");
    check_keys(fig2, "fig2.",
               {"x_min", "x_max", "steps", "n_cut", "bracket_lo",
                "bracket_hi"});
    read_double(fig2, "fig2.", "x_min", cfg.fig2.x_min);
    read_double(fig2, "fig2.", "x_max", cfg.fig2.x_max);
    read_int(fig2, "fig2.", "steps", cfg.fig2.steps);
    read_int(fig2, "fig2.", "n_cut", cfg.fig2.n_cut);
    read_double(fig2, "fig2.", "bracket_lo", cfg.fig2.bracket_lo);
    read_double(fig2, "fig2.", "bracket_hi", cfg.fig2.bracket_hi);
  }

  const json& fig3 = member(doc, "fig3");
  if (!fig3.is_null()) {
    if (!fig3.is_object()) throw ConfigError("config: 'fig3' must be an object");
    check_keys(fig3, "fig3.", {"loss_points", "regime_a", "regime_b"});
    read_double_list(fig3, "fig3.", "loss_points", cfg.fig3.loss_points);
    parse_regime(member(fig3, "regime_a"), "fig3.regime_a",
                 cfg.fig3.regime_a);
    parse_regime(member(fig3, "regime_b"), "fig3.regime_b",
                 cfg.fig3.regime_b);
  }

  const json& imaging = member(doc, "imaging");
  if (!imaging.is_null()) {
    if (!imaging.is_object())
      throw ConfigError("config: 'imaging' must be an object");
    check_keys(imaging, "imaging.",
               {"scene_path", "pulses_per_pixel", "eavesdropper",
                "qber_threshold", "source", "n_cut"});
    read_string(imaging, "imaging.", "scene_path", cfg.imaging.scene_path);
    read_int64(imaging, "imaging.", "pulses_per_pixel",
               cfg.imaging.pulses_per_pixel);
    std::string eve;
    read_string(imaging, "imaging.", "eavesdropper", eve);
    if (!eve.empty())
      cfg.imaging.eavesdropper =
          parse_eavesdropper(eve, "imaging.eavesdropper");
    read_double(imaging, "imaging.", "qber_threshold",
                cfg.imaging.qber_threshold);
    std::string kind;
    read_string(imaging, "imaging.", "source", kind);
    if (!kind.empty()) cfg.imaging.source = parse_kind(kind, "imaging.source");
    read_int(imaging, "imaging.", "n_cut", cfg.imaging.n_cut);
  }

  const json& optimize = member(doc, "optimize");
  if (!optimize.is_null()) {
    if (!optimize.is_object())
      throw ConfigError("config: 'optimize' must be an object");
    check_keys(optimize, "optimize.",
               {"mu_lo", "mu_hi", "tolerance", "rate_floor", "loss_cap_db",
                "decoys"});
    read_double(optimize, "optimize.", "mu_lo", cfg.optimize.mu_lo);
    read_double(optimize, "optimize.", "mu_hi", cfg.optimize.mu_hi);
    read_double(optimize, "optimize.", "tolerance", cfg.optimize.tolerance);
    read_double(optimize, "optimize.", "rate_floor", cfg.optimize.rate_floor);
    read_double(optimize, "optimize.", "loss_cap_db",
                cfg.optimize.loss_cap_db);
    read_double_list(optimize, "optimize.", "decoys", cfg.optimize.decoys);
  }

  // Revalidate the physics specs so a bad value names its field here rather
  // than deep inside a command.
  try {
    cfg.channel.validate();
    cfg.wcs.validate();
    cfg.hsps.validate();
    cfg.decoy.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.fig1.steps < 2)
    throw ConfigError("config: 'fig1.steps' must be >= 2");
  if (!(cfg.fig1.fano_min >= 0.0 && cfg.fig1.fano_max >= cfg.fig1.fano_min))
    throw ConfigError("config: fig1 fano range is empty or negative");
  if (!(cfg.fig1.mean_min > 0.0 && cfg.fig1.mean_max >= cfg.fig1.mean_min))
    throw ConfigError("config: fig1 mean range is empty or nonpositive");
  if (!(cfg.fig1.alpha >= 0.0 && cfg.fig1.alpha <= 1.0))
    throw ConfigError("config: 'fig1.alpha' must lie in [0, 1]");
  if (cfg.fig2.steps < 2)
    throw ConfigError("config: 'fig2.steps' must be >= 2");
  if (cfg.fig2.n_cut < 2)
    throw ConfigError("config: 'fig2.n_cut' must be >= 2");
  if (!(cfg.fig2.x_min >= 0.0 && cfg.fig2.x_max > cfg.fig2.x_min))
    throw ConfigError("config: fig2 x range is empty or negative");
  if (!(cfg.fig2.bracket_lo > 0.0 &&
        cfg.fig2.bracket_hi > cfg.fig2.bracket_lo))
    throw ConfigError("config: fig2 crossover bracket is empty");
  if (cfg.fig3.loss_points.empty())
    throw ConfigError("config: 'fig3.loss_points' must be nonempty");
  for (std::size_t i = 1; i < cfg.fig3.loss_points.size(); ++i)
    if (!(cfg.fig3.loss_points[i] > cfg.fig3.loss_points[i - 1]))
      throw ConfigError(
          "config: 'fig3.loss_points' must be strictly increasing");
  if (cfg.imaging.pulses_per_pixel < 1)
    throw ConfigError("config: 'imaging.pulses_per_pixel' must be >= 1");
  if (!(cfg.imaging.qber_threshold >= 0.0 &&
        cfg.imaging.qber_threshold <= 0.5))
    throw ConfigError("config: 'imaging.qber_threshold' must lie in [0, 0.5]");
  if (cfg.imaging.n_cut < 2)
    throw ConfigError("config: 'imaging.n_cut' must be >= 2");
  if (!(cfg.optimize.mu_lo > 0.0 && cfg.optimize.mu_hi >= cfg.optimize.mu_lo))
    throw ConfigError("config: optimize bracket is empty or nonpositive");
  if (!(cfg.optimize.tolerance > 0.0))
    throw ConfigError("config: 'optimize.tolerance' must be > 0");
  if (!(cfg.optimize.rate_floor > 0.0))
    throw ConfigError("config: 'optimize.rate_floor' must be > 0");
  if (!(cfg.optimize.loss_cap_db > 0.0))
    throw ConfigError("config: 'optimize.loss_cap_db' must be > 0");
  for (double d : cfg.optimize.decoys) {
    if (!(d >= 0.0))
      throw ConfigError("config: 'optimize.decoys' must be >= 0");
    if (!(d < cfg.optimize.mu_hi))
      throw ConfigError(
          "config: every optimize decoy must stay below 'optimize.mu_hi'");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

DecoyScaling RunConfig::scaling_for(SourceKind kind) const {
  if (decoy_scaling) return *decoy_scaling;
  return kind == SourceKind::Hsps ? DecoyScaling::MuRatio
                                  : DecoyScaling::Fixed;
}

nlohmann::json RunConfig::resolved() const {
  nlohmann::json j;
  j["seed"] = seed_present ? nlohmann::json(seed) : nlohmann::json(nullptr);
  j["output"] = {{"csv", output.csv}, {"json", output.json}};
  j["channel"] = {{"loss_db", channel.loss_db},
                  {"eta_b", channel.eta_b},
                  {"y0", channel.y0},
                  {"e_det", channel.e_det}};
  j["wcs"] = {{"mean_intensity", wcs.mean_intensity},
              {"repetition_rate", wcs.repetition_rate}};
  j["hsps"] = {{"mean_intensity", hsps.mean_intensity},
               {"herald_efficiency", hsps.herald_efficiency},
               {"herald_dark", hsps.herald_dark},
               {"correlation_prob", hsps.correlation_prob},
               {"repetition_rate", hsps.repetition_rate}};
  j["decoy"] = {{"signal_intensity", decoy.signal_intensity},
                {"decoy_intensities", decoy.decoy_intensities},
                {"q_factor", decoy.q_factor},
                {"f_ec", decoy.f_ec},
                {"method", to_string(decoy.method)},
                {"n_cut", decoy.n_cut}};
  j["decoy_scaling"] = decoy_scaling ? nlohmann::json(to_string(*decoy_scaling))
                                     : nlohmann::json(nullptr);
  j["fig1"] = {{"alpha", fig1.alpha},     {"fano_min", fig1.fano_min},
               {"fano_max", fig1.fano_max}, {"mean_min", fig1.mean_min},
               {"mean_max", fig1.mean_max}, {"steps", fig1.steps}};
  j["fig2"] = {{"x_min", fig2.x_min},
               {"x_max", fig2.x_max},
               {"steps", fig2.steps},
               {"n_cut", fig2.n_cut},
               {"bracket_lo", fig2.bracket_lo},
               {"bracket_hi", fig2.bracket_hi}};
  j["fig3"] = {{"loss_points", fig3.loss_points},
               {"regime_a",
                {{"mu_points", fig3.regime_a.mu_points},
                 {"decoys", fig3.regime_a.decoys}}},
               {"regime_b",
                {{"mu_points", fig3.regime_b.mu_points},
                 {"decoys", fig3.regime_b.decoys}}}};
  j["imaging"] = {{"scene_path", imaging.scene_path},
                  {"pulses_per_pixel", imaging.pulses_per_pixel},
                  {"eavesdropper", to_string(imaging.eavesdropper)},
                  {"qber_threshold", imaging.qber_threshold},
                  {"source", to_string(imaging.source)},
                  {"n_cut", imaging.n_cut}};
  j["optimize"] = {{"mu_lo", optimize.mu_lo},
                   {"mu_hi", optimize.mu_hi},
                   {"tolerance", optimize.tolerance},
                   {"rate_floor", optimize.rate_floor},
                   {"loss_cap_db", optimize.loss_cap_db},
                   {"decoys", optimize.decoys}};
  return j;
}

}  // namespace qsi
