#pragma once
// Decoy-state single-photon bounds and the asymptotic secure key rate
// R >= q [ Q1 (1 - H2(e1)) - Q_mu f_ec H2(E_mu) ].

#include <vector>

#include "json.hpp"
#include "qsi/channel.hpp"
#include "qsi/photon_source.hpp"

namespace qsi {

enum class EstimationMethod { AnalyticVacuumWeak, LinearProgram };

std::string to_string(EstimationMethod method);

struct DecoyProtocolSpec {
  double signal_intensity = 0.1;
  std::vector<double> decoy_intensities = {0.001, 0.0};
  double q_factor = 0.5;  // basis-sifting factor
  double f_ec = 1.16;     // error-correction inefficiency
  EstimationMethod method = EstimationMethod::LinearProgram;
  int n_cut = 15;  // truncation order for LP yield estimation

  void validate() const;
  // Largest nonzero decoy intensity, 0.0 when only vacuum is present.
  double weak_decoy() const;
  bool has_vacuum_decoy() const;
};

struct AnalyticBounds {
  double y1_lower = 0.0;
  double q1_lower = 0.0;
  double e1_upper = 0.5;
  bool feasible = false;
};

struct LpBounds {
  double y1_lower = 0.0;
  double e1_upper = 0.5;
  bool feasible = false;
  // Set when the constraints could not improve on the trivial box bounds.
  bool trivial = false;
};

struct KeyRateResult {
  GainQber q_signal;
  double y1_lower = 0.0;
  double q1_lower = 0.0;
  double e1_upper = 0.5;
  double rate = 0.0;
  bool feasible = false;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row(double loss_db, double mu, double nu) const;
};

// Shannon binary entropy, bits. Domain error outside [0, 1].
double binary_entropy(double p);

// Vacuum+weak analytic bounds for Poissonian statistics. y0 is the measured
// vacuum gain. Throws DegenerateIntensitiesError unless 0 < nu < mu.
AnalyticBounds decoy_bounds_analytic_wcs(const GainQber& signal,
                                         const GainQber& weak, double mu,
                                         double nu, double y0);

// LP bounds valid for arbitrary photon statistics: min Y1 / max e1*Y1 over
// the polytope of yields consistent with every measured gain and QBER, with
// truncated tails treated worst-case.
LpBounds decoy_bounds_lp(const std::vector<PhotonNumberDistribution>& dists,
                         const std::vector<GainQber>& gains, int n_cut);

// Key rate from already-established bounds; clamped at zero.
double key_rate_from_bounds(double q1_lower, double e1_upper,
                            const GainQber& signal, double q_factor,
                            double f_ec);

KeyRateResult secure_key_rate(const DecoyProtocolSpec& proto,
                              const SourceSpec& source, const ChannelSpec& ch);

// Secret bits per second at the source's repetition rate.
double throughput_fom(double rate_per_pulse, double repetition_rate);

}  // namespace qsi
