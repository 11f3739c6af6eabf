#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "qsi/channel.hpp"
#include "qsi/errors.hpp"
#include "qsi/imaging.hpp"
#include "qsi/photon_source.hpp"

using namespace qsi;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  out.close();
  return path;
}

ImagingScene uniform_scene(int w, int h, double alpha) {
  ImagingScene s;
  s.width = w;
  s.height = h;
  s.alpha.assign(static_cast<std::size_t>(w) * h, alpha);
  return s;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<double> collect_alpha_est(const ImagingRunReport& rep) {
  std::vector<double> out;
  for (const auto& p : rep.pixels)
    if (p.alpha_est) out.push_back(*p.alpha_est);
  return out;
}

}  // namespace

TEST_CASE("fano factor reproduces the published table") {
  CHECK(std::abs(fano_factor(0.3, 0.005) - 0.7015) < 5e-5);
  CHECK(std::abs(fano_factor(0.3, 0.5) - 0.85) < 5e-5);
  CHECK(std::abs(fano_factor(0.05, 0.005) - 0.95025) < 5e-5);
  CHECK(std::abs(fano_factor(0.05, 0.05) - 0.9525) < 5e-5);
  CHECK(std::abs(fano_factor(0.05, 0.5) - 0.975) < 5e-5);
  // The remaining tabulated entry evaluates to 0.7150 from the identity.
  CHECK(std::abs(fano_factor(0.3, 0.05) - 0.7150) < 1e-12);
  CHECK(fano_factor(0.42, 1.0) == 1.0);
  CHECK(fano_factor(0.0, 0.3) == 1.0);
  CHECK_THROWS_AS(fano_factor(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(fano_factor(0.1, -0.5), DomainError);
}

TEST_CASE("absorption uncertainty closed forms") {
  CHECK(absorption_uncertainty(1.0, 0.7, 5.0) == 0.0);
  CHECK(std::abs(absorption_uncertainty(0.5, 1.0, 10.0) - std::sqrt(0.05)) <
        1e-15);
  CHECK(std::abs(absorption_uncertainty(0.5, 1.0, 10.0) - 0.22360) < 1e-5);
  CHECK(absorption_uncertainty(0.5, 0.7015, 1.0) <
        absorption_uncertainty(0.5, 1.0, 1.0));
  for (double alpha : {0.0, 0.3, 0.7})
    for (double fano : {0.7, 1.0, 1.3})
      for (double nbar : {0.5, 2.0, 50.0}) {
        const double base = absorption_uncertainty(alpha, fano, nbar);
        const double quad = absorption_uncertainty(alpha, fano, 4.0 * nbar);
        CHECK(std::abs(quad - base / 2.0) <= 1e-12);
      }
  CHECK_THROWS_AS(absorption_uncertainty(0.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(absorption_uncertainty(-0.1, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(absorption_uncertainty(0.5, -1.0, 1.0), DomainError);
}

TEST_CASE("uncertainty surface layout and monotonicity") {
  const int steps = 7;
  const auto grid =
      uncertainty_surface(0.5, {0.7, 1.3}, {0.1, 1.5}, steps);
  REQUIRE(grid.size() == static_cast<std::size_t>(steps) * steps);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j + 1 < steps; ++j)
      CHECK(grid[static_cast<std::size_t>(i) * steps + j] >
            grid[static_cast<std::size_t>(i) * steps + j + 1]);
  for (int j = 0; j < steps; ++j)
    for (int i = 0; i + 1 < steps; ++i)
      CHECK(grid[static_cast<std::size_t>(i) * steps + j] <
            grid[static_cast<std::size_t>(i + 1) * steps + j]);

  const auto cell = uncertainty_surface(0.5, {1.0, 1.0}, {10.0, 10.0}, 2);
  REQUIRE(cell.size() == 4);
  for (double v : cell)
    CHECK(std::abs(v - absorption_uncertainty(0.5, 1.0, 10.0)) < 1e-15);

  CHECK_THROWS_AS(uncertainty_surface(0.5, {0.7, 1.3}, {0.1, 1.5}, 1),
                  DomainError);
  CHECK_THROWS_AS(uncertainty_surface(0.5, {0.7, 1.3}, {0.0, 1.5}, 4),
                  DomainError);
}

TEST_CASE("scene files parse with comments and mixed separators") {
  const auto path = write_temp("qsi_scene_ok.txt",
                               "# absorption map\n"
                               "0.0, 0.25\t0.5\n"
                               "0.75 1.0 0.1 # trailing note\n");
  const auto scene = ImagingScene::from_file(path);
  CHECK(scene.width == 3);
  CHECK(scene.height == 2);
  REQUIRE(scene.alpha.size() == 6);
  CHECK(scene.alpha[1] == 0.25);
  CHECK(scene.alpha[4] == 1.0);

  const auto ragged = write_temp("qsi_scene_ragged.txt", "0.1 0.2\n0.3\n");
  CHECK_THROWS_AS(ImagingScene::from_file(ragged), ConfigError);
  const auto junk = write_temp("qsi_scene_junk.txt", "0.1 zebra\n");
  CHECK_THROWS_AS(ImagingScene::from_file(junk), ConfigError);
  const auto range = write_temp("qsi_scene_range.txt", "0.1 1.5\n");
  CHECK_THROWS_AS(ImagingScene::from_file(range), DomainError);
  CHECK_THROWS_AS(ImagingScene::from_file("/nonexistent/scene.txt"), IoError);

  ImagingScene empty;
  CHECK_THROWS_AS(empty.validate(), DomainError);
}

TEST_CASE("raster scan is reproducible and schedule independent") {
  const auto scene = uniform_scene(3, 2, 0.4);
  SourceSpec src;
  src.kind = SourceKind::Wcs;
  src.mean_intensity = 0.2;
  ChannelSpec ch;
  ch.loss_db = 3.0;

  const auto a = simulate_raster_scan(scene, src, ch, 2000,
                                      Eavesdropper::None, 42, 0.11, 1);
  const auto b = simulate_raster_scan(scene, src, ch, 2000,
                                      Eavesdropper::None, 42, 0.11, 1);
  const auto c = simulate_raster_scan(scene, src, ch, 2000,
                                      Eavesdropper::None, 42, 0.11, 4);
  CHECK(a.csv() == b.csv());
  CHECK(a.csv() == c.csv());
  CHECK(a.summary().dump() == c.summary().dump());

  const auto d = simulate_raster_scan(scene, src, ch, 2000,
                                      Eavesdropper::None, 43, 0.11, 1);
  CHECK(a.csv() != d.csv());

  for (const auto& p : a.pixels) {
    CHECK(p.detections <= p.pulses_sent);
    if (p.alpha_est) {
      CHECK(*p.alpha_est >= -0.1);
      CHECK(*p.alpha_est <= 1.1);
    }
  }
  CHECK(a.qber_measured >= 0.0);
  CHECK(a.qber_measured <= 0.5);
}

TEST_CASE("clear pixel estimates zero absorption") {
  const auto scene = uniform_scene(1, 1, 0.0);
  SourceSpec src;
  src.kind = SourceKind::Wcs;
  src.mean_intensity = 0.2;
  ChannelSpec ch;
  ch.loss_db = 3.0;
  ch.y0 = 0.0;
  const auto rep = simulate_raster_scan(scene, src, ch, 20000,
                                        Eavesdropper::None, 7, 0.11, 1);
  REQUIRE(rep.pixels.size() == 1);
  const auto& p = rep.pixels[0];
  REQUIRE(p.alpha_est.has_value());
  REQUIRE(p.delta_alpha_empirical.has_value());
  CHECK(std::abs(*p.alpha_est) <= 3.0 * *p.delta_alpha_empirical);
}

TEST_CASE("opaque pixels report missing estimates instead of inventing one") {
  const auto scene = uniform_scene(2, 1, 1.0);
  SourceSpec src;
  src.kind = SourceKind::Wcs;
  src.mean_intensity = 0.1;
  ChannelSpec ch;
  ch.y0 = 0.0;
  const auto rep = simulate_raster_scan(scene, src, ch, 500,
                                        Eavesdropper::None, 11, 0.11, 1);
  for (const auto& p : rep.pixels) {
    CHECK(p.detections == 0);
    CHECK_FALSE(p.alpha_est.has_value());
    CHECK_FALSE(p.delta_alpha_predicted.has_value());
    CHECK_FALSE(p.delta_alpha_empirical.has_value());
  }
  // Empty estimate cells survive the CSV round trip.
  const auto csv = rep.csv();
  CHECK(csv.find(",,") != std::string::npos);
}

TEST_CASE("absorption estimator is unbiased") {
  SourceSpec src;
  src.kind = SourceKind::Wcs;
  src.mean_intensity = 0.2;
  ChannelSpec ch;  // 10 dB defaults
  std::uint64_t seed = 100;
  for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
    const auto scene = uniform_scene(40, 25, alpha);  // 1000 repetitions
    const auto rep = simulate_raster_scan(scene, src, ch, 3000,
                                          Eavesdropper::None, seed++, 0.11, 4);
    const auto est = collect_alpha_est(rep);
    REQUIRE(est.size() == 1000);
    const double m = mean_of(est);
    const double se = std_of(est) / std::sqrt(static_cast<double>(est.size()));
    CHECK(std::abs(m - alpha) <= 3.0 * se);
  }
}

TEST_CASE("intercept-resend attack raises the sifted error rate") {
  const auto scene = uniform_scene(5, 5, 0.0);
  SourceSpec src;
  src.kind = SourceKind::Wcs;
  src.mean_intensity = 0.1;
  ChannelSpec ch;
  ch.loss_db = 0.0;
  ch.e_det = 0.0;  // isolate the attack signature

  const auto quiet = simulate_raster_scan(scene, src, ch, 20000,
                                          Eavesdropper::None, 5, 0.11, 4);
  const auto attacked = simulate_raster_scan(
      scene, src, ch, 20000, Eavesdropper::InterceptResend, 5, 0.11, 4);
  REQUIRE(quiet.sifted_bits > 10000);
  REQUIRE(attacked.sifted_bits > 10000);
  CHECK(quiet.qber_measured < 0.01);
  CHECK_FALSE(quiet.eavesdrop_flag);
  CHECK(std::abs(attacked.qber_measured - 0.25) <= 0.02);
  CHECK(attacked.eavesdrop_flag);

  // Visibility margin holds for realistic misalignment too.
  ChannelSpec noisy = ch;
  noisy.e_det = 0.03;
  const auto q2 = simulate_raster_scan(scene, src, noisy, 20000,
                                       Eavesdropper::None, 6, 0.11, 4);
  const auto a2 = simulate_raster_scan(
      scene, src, noisy, 20000, Eavesdropper::InterceptResend, 6, 0.11, 4);
  CHECK(a2.qber_measured - q2.qber_measured >= 0.15);
}

TEST_CASE("sub-poissonian source does not degrade the estimate spread") {
  SourceSpec hsps;
  hsps.kind = SourceKind::Hsps;
  hsps.mean_intensity = 0.1;
  const auto hsps_stats = source_statistics(source_distribution(hsps, 25));
  REQUIRE(hsps_stats.fano < 1.0);

  SourceSpec wcs;
  wcs.kind = SourceKind::Wcs;
  wcs.mean_intensity = hsps_stats.mean;  // equal mean delivered photons

  ChannelSpec ch;
  ch.loss_db = 3.0;
  const auto scene = uniform_scene(40, 25, 0.5);  // 1000 repetitions
  const auto rh = simulate_raster_scan(scene, hsps, ch, 2000,
                                       Eavesdropper::None, 21, 0.11, 4);
  const auto rw = simulate_raster_scan(scene, wcs, ch, 2000,
                                       Eavesdropper::None, 22, 0.11, 4);
  const auto eh = collect_alpha_est(rh);
  const auto ew = collect_alpha_est(rw);
  REQUIRE(eh.size() == 1000);
  REQUIRE(ew.size() == 1000);
  const double sh = std_of(eh);
  const double sw = std_of(ew);
  // Two-sigma tolerance on the difference of two sample standard deviations.
  const double sigma = std::sqrt(
      (sh * sh + sw * sw) / (2.0 * static_cast<double>(eh.size() - 1)));
  CHECK(sh <= sw + 2.0 * sigma);

  for (const auto& p : rh.pixels) CHECK(p.heralds == p.pulses_sent);
  for (const auto& p : rw.pixels) CHECK(p.heralds == 0);
}

TEST_CASE("raster scan validates its inputs") {
  const auto scene = uniform_scene(2, 2, 0.5);
  SourceSpec src;
  ChannelSpec ch;
  CHECK_THROWS_AS(simulate_raster_scan(scene, src, ch, 0,
                                       Eavesdropper::None, 1),
                  DomainError);
  CHECK_THROWS_AS(simulate_raster_scan(scene, src, ch, 100,
                                       Eavesdropper::None, 1, 0.7),
                  DomainError);
  // Nonpositive thread counts clamp to one worker rather than erroring.
  const auto clamped = simulate_raster_scan(scene, src, ch, 100,
                                            Eavesdropper::None, 1, 0.11, 0);
  const auto single = simulate_raster_scan(scene, src, ch, 100,
                                           Eavesdropper::None, 1, 0.11, 1);
  CHECK(clamped.csv() == single.csv());
}
