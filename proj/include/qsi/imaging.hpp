#pragma once
// Absorption-imaging uncertainty model and the Monte Carlo raster scan with
// BB84-style sifting and an optional intercept-resend eavesdropper.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qsi/channel.hpp"
#include "qsi/photon_source.hpp"

namespace qsi {

struct ImagingScene {
  int width = 0;
  int height = 0;
  std::vector<double> alpha;  // row-major, values in [0, 1]

  void validate() const;
  static ImagingScene from_file(const std::filesystem::path& path);
};

enum class Eavesdropper { None, InterceptResend };

std::string to_string(Eavesdropper e);

struct PixelResult {
  int x = 0;
  int y = 0;
  double alpha_true = 0.0;
  long long pulses_sent = 0;
  long long heralds = 0;
  long long detections = 0;
  // Missing when the pixel recorded no detections.
  std::optional<double> alpha_est;
  std::optional<double> delta_alpha_predicted;
  std::optional<double> delta_alpha_empirical;  // plug-in standard error
};

struct ImagingRunReport {
  int width = 0;
  int height = 0;
  std::vector<PixelResult> pixels;
  long long sifted_bits = 0;
  long long sifted_errors = 0;
  double qber_measured = 0.0;
  double qber_threshold = 0.11;
  bool eavesdrop_flag = false;
  std::uint64_t seed = 0;

  std::string csv() const;
  nlohmann::json summary() const;
};

// Fano factor from the identity F = <n>(g2(0) - 1) + 1.
double fano_factor(double mean_n, double g2_zero);

// Absorption uncertainty dalpha = sqrt((a(1-a) + F(1-a)^2) / nbar).
double absorption_uncertainty(double alpha, double fano, double mean_n);

// Row-major grid of absorption uncertainties: rows sweep the Fano factor,
// columns sweep the mean photon number, `steps` samples per axis.
std::vector<double> uncertainty_surface(double alpha,
                                        std::pair<double, double> fano_range,
                                        std::pair<double, double> mean_range,
                                        int steps);

// Threshold-detector raster scan over the scene. Per-pixel RNG substreams
// depend only on (seed, pixel index), so results are independent of the
// thread count. All clicks feed the absorption estimate; the basis-matched
// subset feeds the QBER.
ImagingRunReport simulate_raster_scan(const ImagingScene& scene,
                                      const SourceSpec& source,
                                      const ChannelSpec& ch,
                                      long long pulses_per_pixel,
                                      Eavesdropper eve, std::uint64_t seed,
                                      double qber_threshold = 0.11,
                                      int threads = 1, int n_cut = 20);

}  // namespace qsi
