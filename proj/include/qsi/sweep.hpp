#pragma once
// Rate-vs-loss sweeps, curve spread metrics, and scalar optimization of the
// signal intensity and maximum tolerable loss.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qsi/decoy.hpp"

namespace qsi {

enum class DecoyScaling { Fixed, MuRatio };

std::string to_string(DecoyScaling scaling);

struct SweepGrid {
  std::vector<double> loss_points;  // dB, strictly increasing
  std::vector<double> mu_points;
  SourceSpec source;        // mean_intensity overridden per mu
  ChannelSpec channel;      // loss_db overridden per point
  DecoyProtocolSpec decoy;  // signal_intensity overridden per mu
  DecoyScaling scaling = DecoyScaling::Fixed;

  void validate() const;
};

struct CurveRow {
  SourceKind source = SourceKind::Wcs;
  double mu = 0.0;
  double nu = 0.0;
  double loss_db = 0.0;
  double rate = 0.0;
  double throughput_bps = 0.0;
  bool feasible = false;
};

struct CurveTable {
  std::vector<CurveRow> rows;

  static std::string csv_header();
  std::string csv() const;
  void append(const CurveTable& other);
};

// Decoy intensities for signal intensity mu under the grid's scaling mode.
std::vector<double> scaled_decoys(const DecoyProtocolSpec& tmpl,
                                  DecoyScaling scaling, double mu);

// One row per (mu, loss). Per-point failures become infeasible zero-rate
// rows rather than missing rows.
CurveTable rate_vs_loss(const SweepGrid& grid);

// (max - min) / mean of positive rates across mu at the given loss.
// Throws InsufficientDataError with fewer than two positive samples.
double curve_spread(const CurveTable& table, SourceKind source,
                    double loss_db);

// Coarse 50-point grid scan followed by golden-section refinement.
// Returns (argmax, max). The result is never worse than any grid sample.
std::pair<double, double> maximize_scalar(
    const std::function<double(double)>& f, double lo, double hi, double tol);

struct OptimizeResult {
  double mu_star = 0.0;
  double rate_star = 0.0;
};

OptimizeResult optimize_mu(const SourceSpec& source, const ChannelSpec& ch,
                           const DecoyProtocolSpec& decoy_template,
                           DecoyScaling scaling, double mu_lo, double mu_hi,
                           double tol = 1e-4);

struct MaxLossResult {
  double loss_db = 0.0;
  bool exceeded_cap = false;
};

// Largest loss where the rate stays above rate_floor, bisected to tol_db.
// When the rate at cap_db is still above the floor the cap is reported with
// exceeded_cap set. Throws InfeasibleError when already below the floor at
// zero loss.
MaxLossResult max_tolerable_loss(const SourceSpec& source,
                                 const ChannelSpec& ch_template,
                                 const DecoyProtocolSpec& decoy,
                                 double rate_floor = 1e-10,
                                 double tol_db = 0.01, double cap_db = 60.0);

}  // namespace qsi
