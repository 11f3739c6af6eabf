#include "qsi/channel.hpp"

#include <algorithm>
#include <cmath>

#include "qsi/errors.hpp"

namespace qsi {

void ChannelSpec::validate() const {
  if (!(loss_db >= 0.0)) throw DomainError("channel: loss_db must be >= 0");
  if (!(eta_b > 0.0 && eta_b <= 1.0))
    throw DomainError("channel: eta_b must lie in (0, 1]");
  if (!(y0 >= 0.0 && y0 < 1.0))
    throw DomainError("channel: y0 must lie in [0, 1)");
  if (!(e_det >= 0.0 && e_det <= 0.5))
    throw DomainError("channel: e_det must lie in [0, 0.5]");
}

double transmittance(double loss_db, double eta_b) {
  if (!(loss_db >= 0.0)) throw DomainError("transmittance: loss_db must be >= 0");
  if (!(eta_b > 0.0 && eta_b <= 1.0))
    throw DomainError("transmittance: eta_b must lie in (0, 1]");
  return eta_b * std::pow(10.0, -loss_db / 10.0);
}

double transmittance(const ChannelSpec& ch) {
  return transmittance(ch.loss_db, ch.eta_b);
}

double yield_n(int n, double eta, double y0) {
  if (n < 0) throw DomainError("yield_n: photon number must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw DomainError("yield_n: eta must lie in [0, 1]");
  if (!(y0 >= 0.0 && y0 < 1.0))
    throw DomainError("yield_n: y0 must lie in [0, 1)");
  // One minus the probability that neither a dark count nor any of the n
  // photons produces a click. Written as y0 plus the photon contribution so
  // that small dark-count rates survive without cancellation (n = 0 returns
  // y0 exactly).
  return y0 + (1.0 - y0) * (1.0 - std::pow(1.0 - eta, n));
}

double error_n(int n, double eta, double y0, double e_det) {
  const double yn = yield_n(n, eta, y0);
  if (!(yn > 0.0))
    throw NoSignalError("error_n: zero yield leaves the error undefined");
  const double click_p = 1.0 - std::pow(1.0 - eta, n);
  const double e = (ChannelSpec::e0 * y0 + e_det * click_p) / yn;
  return std::clamp(e, 0.0, 0.5);
}

GainQber gain_and_qber(const PhotonNumberDistribution& dist,
                       const ChannelSpec& ch) {
  dist.validate();
  ch.validate();
  const double eta = transmittance(ch);
  double gain = 0.0;
  double err_sum = 0.0;
  for (int n = 0; n <= dist.n_cut; ++n) {
    double p = dist.probs[static_cast<std::size_t>(n)];
    if (n == dist.n_cut) p += dist.tail_mass;
    if (p == 0.0) continue;
    const double yn = yield_n(n, eta, ch.y0);
    gain += p * yn;
    if (yn > 0.0) err_sum += p * yn * error_n(n, eta, ch.y0, ch.e_det);
  }
  GainQber out;
  out.gain = gain;
  if (!(gain > 0.0))
    throw NoSignalError("gain_and_qber: total gain is zero");
  out.qber = std::clamp(err_sum / gain, 0.0, 0.5);
  return out;
}

}  // namespace qsi
