#pragma once
// Run configuration: one JSON document per run. Unknown keys are hard
// errors; defaults are materialized so the report echo is complete.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsi/channel.hpp"
#include "qsi/decoy.hpp"
#include "qsi/imaging.hpp"
#include "qsi/photon_source.hpp"
#include "qsi/sweep.hpp"

namespace qsi {

struct OutputOptions {
  bool csv = true;
  bool json = true;
};

struct Fig1Config {
  double alpha = 0.5;
  double fano_min = 0.1;
  double fano_max = 1.5;
  double mean_min = 0.5;
  double mean_max = 20.0;
  int steps = 40;
};

struct Fig2Config {
  double x_min = 0.01;
  double x_max = 1.0;
  int steps = 100;
  int n_cut = 20;
  double bracket_lo = 0.1;
  double bracket_hi = 1.0;
};

struct Fig3Regime {
  std::vector<double> mu_points;
  std::vector<double> decoys;
};

struct Fig3Config {
  std::vector<double> loss_points;
  Fig3Regime regime_a{{0.01, 0.05, 0.1}, {0.001, 0.0}};
  Fig3Regime regime_b{{0.2, 0.25, 0.3}, {0.1, 0.0}};

  Fig3Config();
};

struct ImagingConfig {
  std::string scene_path;
  long long pulses_per_pixel = 10000;
  Eavesdropper eavesdropper = Eavesdropper::None;
  double qber_threshold = 0.11;
  SourceKind source = SourceKind::Wcs;
  int n_cut = 20;
};

struct OptimizeConfig {
  double mu_lo = 0.12;
  double mu_hi = 1.2;
  double tolerance = 1e-4;
  double rate_floor = 1e-10;
  double loss_cap_db = 60.0;
  // Decoys pinned during the scan so every bracket point sees the same
  // side information; mu_lo must stay above the strongest decoy.
  std::vector<double> decoys = {0.1, 0.0};
};

struct RunConfig {
  RunConfig();

  std::uint64_t seed = 0;
  bool seed_present = false;
  OutputOptions output;
  ChannelSpec channel;
  SourceSpec wcs;
  SourceSpec hsps;
  DecoyProtocolSpec decoy;
  std::optional<DecoyScaling> decoy_scaling;  // per-source default when unset
  Fig1Config fig1;
  Fig2Config fig2;
  Fig3Config fig3;
  ImagingConfig imaging;
  OptimizeConfig optimize;

  // Parses and validates the document; throws ConfigError naming the
  // offending key on unknown keys, bad types, or out-of-range values.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig from_file(const std::filesystem::path& path);

  // Scaling mode for a source, honoring the per-source default.
  DecoyScaling scaling_for(SourceKind kind) const;

  // Full echo with every default materialized.
  nlohmann::json resolved() const;
};

}  // namespace qsi
