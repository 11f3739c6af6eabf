#include <cmath>

#include "doctest.h"
#include "qsi/channel.hpp"
#include "qsi/errors.hpp"
#include "qsi/photon_source.hpp"

using namespace qsi;

TEST_CASE("transmittance closed forms") {
  CHECK(transmittance(0.0, 1.0) == 1.0);
  CHECK(std::abs(transmittance(10.0, 1.0) - 0.1) < 1e-15);
  CHECK(std::abs(transmittance(30.0, 0.5) - 5e-4) < 1e-18);
  CHECK_THROWS_AS(transmittance(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(transmittance(10.0, 0.0), DomainError);
  CHECK_THROWS_AS(transmittance(10.0, 1.5), DomainError);

  ChannelSpec ch;
  ch.loss_db = 10.0;
  ch.eta_b = 0.5;
  CHECK(std::abs(transmittance(ch) - 0.05) < 1e-15);
}

TEST_CASE("per-photon-number yield") {
  CHECK(yield_n(0, 0.1, 1e-6) == 1e-6);
  CHECK(std::abs(yield_n(1, 0.1, 1e-6) - 0.1000009) < 1e-12);
  CHECK(yield_n(400, 0.1, 0.0) > 1.0 - 1e-15);

  double prev = -1.0;
  for (int n = 0; n <= 40; ++n) {
    const double y = yield_n(n, 0.05, 1e-6);
    CHECK(y >= prev);
    CHECK(y <= 1.0);
    prev = y;
  }
  for (double eta : {0.0, 0.01, 0.1, 0.5, 1.0}) {
    CHECK(yield_n(3, eta, 0.0) <= yield_n(3, std::min(1.0, eta + 0.01), 0.0));
  }
  CHECK_THROWS_AS(yield_n(-1, 0.1, 0.0), DomainError);
  CHECK_THROWS_AS(yield_n(1, 1.5, 0.0), DomainError);
  CHECK_THROWS_AS(yield_n(1, 0.1, -0.1), DomainError);
}

TEST_CASE("per-photon-number error rate") {
  CHECK(error_n(0, 0.1, 1e-6, 0.01) == 0.5);
  CHECK(std::abs(error_n(1, 0.1, 0.0, 0.01) - 0.01) < 1e-15);
  CHECK(std::abs(error_n(1, 0.1, 1e-6, 0.01) - 0.010005) < 1e-6);
  CHECK_THROWS_AS(error_n(0, 0.1, 0.0, 0.01), NoSignalError);

  // Many-photon pulses always click, so the dark contribution washes out.
  CHECK(std::abs(error_n(200, 0.5, 1e-6, 0.02) - 0.02) < 1e-6);
  for (int n = 0; n <= 30; ++n) {
    const double e = error_n(n, 0.05, 1e-6, 0.03);
    CHECK(e >= 0.0);
    CHECK(e <= 0.5);
  }
}

TEST_CASE("gain oracle for an attenuated laser pulse") {
  ChannelSpec ch;  // 10 dB, eta_b 1, y0 1e-6, e_det 0.01
  const auto gq = gain_and_qber(wcs_distribution(0.5, 25), ch);
  CHECK(std::abs(gq.gain - 0.048772) < 1e-6);
  CHECK(gq.qber > 0.0);
  CHECK(gq.qber < 0.5);
}

TEST_CASE("summed gain matches the closed form over a grid") {
  for (double mu : {0.01, 0.1, 0.5, 1.0})
    for (double loss : {0.0, 10.0, 20.0, 40.0})
      for (double y0 : {0.0, 1e-6}) {
        ChannelSpec ch;
        ch.loss_db = loss;
        ch.y0 = y0;
        const auto dist = wcs_distribution(mu, 30);
        const double eta = transmittance(ch);
        const double exact = 1.0 - (1.0 - y0) * std::exp(-eta * mu);
        const auto gq = gain_and_qber(dist, ch);
        CHECK(std::abs(gq.gain - exact) <= 10.0 * dist.tail_mass + 1e-15);
      }
}

TEST_CASE("gain and qber edge cases") {
  ChannelSpec ch;
  const auto vac = gain_and_qber(wcs_distribution(0.0, 10), ch);
  CHECK(vac.gain == yield_n(0, transmittance(ch), ch.y0));
  CHECK(std::abs(vac.gain - ch.y0) < 1e-15);
  CHECK(std::abs(vac.qber - 0.5) < 1e-9);

  ChannelSpec clean = ch;
  clean.e_det = 0.0;
  clean.y0 = 0.0;
  const auto noiseless = gain_and_qber(wcs_distribution(0.3, 20), clean);
  CHECK(noiseless.qber == 0.0);

  ChannelSpec dead = ch;
  dead.y0 = 0.0;
  CHECK_THROWS_AS(gain_and_qber(wcs_distribution(0.0, 10), dead),
                  NoSignalError);

  double prev_gain = 1.0;
  for (double loss : {0.0, 5.0, 10.0, 20.0, 30.0, 40.0}) {
    ChannelSpec c = ch;
    c.loss_db = loss;
    const auto gq = gain_and_qber(wcs_distribution(0.2, 20), c);
    CHECK(gq.gain <= prev_gain + 1e-15);
    prev_gain = gq.gain;
  }

  ChannelSpec dark_dominated = ch;
  dark_dominated.loss_db = 150.0;
  const auto gq = gain_and_qber(wcs_distribution(0.2, 20), dark_dominated);
  CHECK(std::abs(gq.qber - 0.5) < 1e-3);
}

TEST_CASE("channel validation") {
  ChannelSpec ch;
  ch.y0 = 1.5;
  CHECK_THROWS_AS(ch.validate(), DomainError);
  ch.y0 = 1e-6;
  ch.e_det = 0.6;
  CHECK_THROWS_AS(ch.validate(), DomainError);
  ch.e_det = 0.01;
  ch.loss_db = -2.0;
  CHECK_THROWS_AS(ch.validate(), DomainError);
}
