#pragma once
// Photon-number statistics for the two source models used throughout the
// project: attenuated laser pulses (Poissonian) and heralded SPDC pairs
// (thermal statistics post-selected on a herald click).

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qsi {

// Truncated photon-number distribution. The probability mass beyond the
// truncation order is carried explicitly instead of being renormalized
// away, so downstream consumers can treat it worst-case.
struct PhotonNumberDistribution {
  std::vector<double> probs;  // index k = photon number, k = 0..n_cut
  int n_cut = 0;
  double tail_mass = 0.0;
  // Set when the requested truncation leaves more tail mass than the cap.
  bool truncation_warning = false;

  void validate() const;
  nlohmann::json to_json() const;
};

enum class SourceKind { Wcs, Hsps };

std::string to_string(SourceKind kind);

struct SourceSpec {
  SourceKind kind = SourceKind::Wcs;
  double mean_intensity = 0.1;     // mean photon (pair) number per pulse
  double herald_efficiency = 0.5;  // idler-arm detection efficiency
  double herald_dark = 1e-5;       // idler dark-click probability per gate
  double correlation_prob = 0.7;   // probability a herald tags the paired photon
  double repetition_rate = 1e9;    // pulses per second

  void validate() const;
};

struct SourceStatistics {
  double mean = 0.0;
  double variance = 0.0;
  double g2_zero = 0.0;
  double fano = 1.0;
};

// Default cap on acceptable truncated tail mass.
inline constexpr double kDefaultTailCap = 1e-9;

// Poissonian distribution with mean x, truncated at n_cut.
PhotonNumberDistribution wcs_distribution(double x, int n_cut,
                                          double tail_cap = kDefaultTailCap);

// Heralded-pair distribution: thermal weights at mean x, reweighted by the
// herald click probability c*(1-(1-eta_a)^k) + d_a and renormalized by the
// total post-selection probability.
PhotonNumberDistribution hsps_distribution(double x, double eta_a, double d_a,
                                           double c, int n_cut,
                                           double tail_cap = kDefaultTailCap);

PhotonNumberDistribution source_distribution(const SourceSpec& spec, int n_cut);

// probs[1] of the source's per-pulse distribution.
double single_photon_probability(const SourceSpec& spec, int n_cut);

// Probability that a pulse delivers a usable single photon. For heralded
// sources the post-selected single-photon probability is weighted by the
// pair-correlation probability: a herald click announces the photon that is
// actually in the collected mode only that often. Equal to
// single_photon_probability for Poissonian sources.
double effective_single_photon_probability(const SourceSpec& spec, int n_cut);

SourceStatistics source_statistics(const PhotonNumberDistribution& dist);

// Mean photon number where the heralded source's deliverable single-photon
// probability stops exceeding the Poissonian one. Bisection on
// [x_lo, x_hi]; throws BracketError when the difference has no sign change.
double crossover_mean(const SourceSpec& hsps, int n_cut, double x_lo,
                      double x_hi, double tol = 1e-4);

// Bisection root of f on [lo, hi] to absolute tolerance tol.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol);

}  // namespace qsi
