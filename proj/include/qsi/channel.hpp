#pragma once
// Lossy channel plus threshold detector: per-photon-number yields and error
// rates, and gain/QBER expectations over a photon-number distribution.

#include "qsi/photon_source.hpp"

namespace qsi {

struct ChannelSpec {
  double loss_db = 10.0;  // channel attenuation, dB
  double eta_b = 1.0;     // receiver efficiency, folded into transmittance
  double y0 = 1e-6;       // dark/background click probability per gate
  double e_det = 0.01;    // misalignment error probability
  static constexpr double e0 = 0.5;  // error rate of background clicks

  void validate() const;
};

struct GainQber {
  double gain = 0.0;  // overall click probability per pulse
  double qber = 0.0;  // error fraction among clicks
};

// End-to-end transmittance eta = eta_b * 10^(-loss_db/10).
double transmittance(double loss_db, double eta_b);
double transmittance(const ChannelSpec& ch);

// Click probability for an n-photon pulse: 1 - (1-y0)(1-eta)^n.
double yield_n(int n, double eta, double y0);

// Error rate of n-photon clicks; undefined (throws) when the yield is zero.
double error_n(int n, double eta, double y0, double e_det);

// Expectation of yield/error over the distribution. Photon numbers beyond
// the truncation are assigned the yield and error of n_cut.
GainQber gain_and_qber(const PhotonNumberDistribution& dist,
                       const ChannelSpec& ch);

}  // namespace qsi
