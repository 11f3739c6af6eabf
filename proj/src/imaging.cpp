#include "qsi/imaging.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "qsi/errors.hpp"
#include "qsi/rng.hpp"

namespace qsi {

void ImagingScene::validate() const {
  if (width < 1 || height < 1)
    throw DomainError("scene: width and height must be >= 1");
  if (alpha.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw DomainError("scene: alpha must hold width*height values");
  for (double a : alpha)
    if (!(a >= 0.0 && a <= 1.0))
      throw DomainError("scene: absorption values must lie in [0, 1]");
}

ImagingScene ImagingScene::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("scene: cannot open " + path.string());
  ImagingScene scene;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream row(line);
    std::vector<double> values;
    double v = 0.0;
    while (row >> v) values.push_back(v);
    if (!row.eof())
      throw ConfigError("scene: non-numeric entry in " + path.string());
    if (values.empty()) continue;
    if (scene.width == 0) {
      scene.width = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != scene.width) {
      throw ConfigError("scene: ragged rows in " + path.string());
    }
    scene.alpha.insert(scene.alpha.end(), values.begin(), values.end());
    ++scene.height;
  }
  scene.validate();
  return scene;
}

std::string to_string(Eavesdropper e) {
  return e == Eavesdropper::None ? "none" : "intercept_resend";
}

double fano_factor(double mean_n, double g2_zero) {
  if (!(mean_n >= 0.0)) throw DomainError("fano_factor: mean_n must be >= 0");
  if (!(g2_zero >= 0.0)) throw DomainError("fano_factor: g2_zero must be >= 0");
  return mean_n * (g2_zero - 1.0) + 1.0;
}

double absorption_uncertainty(double alpha, double fano, double mean_n) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("absorption_uncertainty: alpha must lie in [0, 1]");
  if (!(fano >= 0.0))
    throw DomainError("absorption_uncertainty: fano must be >= 0");
  if (!(mean_n > 0.0))
    throw DomainError("absorption_uncertainty: mean_n must be > 0");
  const double rem = 1.0 - alpha;
  return std::sqrt((alpha * rem + fano * rem * rem) / mean_n);
}

std::vector<double> uncertainty_surface(double alpha,
                                        std::pair<double, double> fano_range,
                                        std::pair<double, double> mean_range,
                                        int steps) {
  if (steps < 2) throw DomainError("uncertainty_surface: steps must be >= 2");
  if (!(fano_range.first >= 0.0 && fano_range.second >= fano_range.first))
    throw DomainError("uncertainty_surface: bad fano range");
  if (!(mean_range.first > 0.0 && mean_range.second >= mean_range.first))
    throw DomainError("uncertainty_surface: bad mean range");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) * static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double f = fano_range.first +
                     (fano_range.second - fano_range.first) * i / (steps - 1);
    for (int j = 0; j < steps; ++j) {
      const double n = mean_range.first +
                       (mean_range.second - mean_range.first) * j / (steps - 1);
      grid.push_back(absorption_uncertainty(alpha, f, n));
    }
  }
  return grid;
}

namespace {

int sample_photon_number(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform01();
  for (std::size_t k = 0; k < cdf.size(); ++k)
    if (u < cdf[k]) return static_cast<int>(k);
  return static_cast<int>(cdf.size()) - 1;
}

std::string opt_field(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return std::string(buf);
}

}  // namespace

ImagingRunReport simulate_raster_scan(const ImagingScene& scene,
                                      const SourceSpec& source,
                                      const ChannelSpec& ch,
                                      long long pulses_per_pixel,
                                      Eavesdropper eve, std::uint64_t seed,
                                      double qber_threshold, int threads,
                                      int n_cut) {
  scene.validate();
  source.validate();
  ch.validate();
  if (pulses_per_pixel < 1)
    throw DomainError("simulate_raster_scan: pulses_per_pixel must be >= 1");
  if (!(qber_threshold >= 0.0 && qber_threshold <= 0.5))
    throw DomainError("simulate_raster_scan: qber_threshold must lie in [0, 0.5]");
  if (threads < 1) threads = 1;

  const PhotonNumberDistribution dist = source_distribution(source, n_cut);
  const SourceStatistics stats = source_statistics(dist);
  const double eta = transmittance(ch);

  std::vector<double> cdf(dist.probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.probs.size(); ++k) {
    acc += dist.probs[k];
    if (k + 1 == dist.probs.size()) acc += dist.tail_mass;
    cdf[k] = acc;
  }
  cdf.back() = std::max(cdf.back(), 1.0);

  // Analytic unobstructed click rate anchors the absorption estimator.
  const double ref_rate = gain_and_qber(dist, ch).gain;
  const double denom = ref_rate - ch.y0;
  if (!(denom > 0.0))
    throw NoSignalError(
        "simulate_raster_scan: reference click rate does not rise above the "
        "dark rate");

  ImagingRunReport report;
  report.width = scene.width;
  report.height = scene.height;
  report.qber_threshold = qber_threshold;
  report.seed = seed;
  const std::size_t total =
      static_cast<std::size_t>(scene.width) * static_cast<std::size_t>(scene.height);
  report.pixels.resize(total);

  std::atomic<std::size_t> cursor{0};
  std::atomic<long long> sifted_total{0};
  std::atomic<long long> errors_total{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= total) return;
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
      const double alpha = scene.alpha[i];
      const double survive = eta * (1.0 - alpha);
      long long clicks = 0;
      long long sifted = 0;
      long long errors = 0;
      for (long long p = 0; p < pulses_per_pixel; ++p) {
        const int k = sample_photon_number(cdf, rng);
        bool photon_click = false;
        if (k > 0 && survive > 0.0)
          photon_click = rng.bernoulli(1.0 - std::pow(1.0 - survive, k));
        const bool dark_click = rng.bernoulli(ch.y0);
        if (!photon_click && !dark_click) continue;
        ++clicks;
        const auto alice_basis = rng.bit();
        const auto bob_basis = rng.bit();
        bool eve_mismatch = false;
        if (eve == Eavesdropper::InterceptResend)
          eve_mismatch = rng.bit() != alice_basis;
        if (alice_basis != bob_basis) continue;
        ++sifted;
        double p_err = ch.e_det;
        if (!photon_click || eve_mismatch) p_err = 0.5;
        if (rng.bernoulli(p_err)) ++errors;
      }

      PixelResult& res = report.pixels[i];
      res.x = static_cast<int>(i) % scene.width;
      res.y = static_cast<int>(i) / scene.width;
      res.alpha_true = alpha;
      res.pulses_sent = pulses_per_pixel;
      res.heralds = source.kind == SourceKind::Hsps ? pulses_per_pixel : 0;
      res.detections = clicks;
      if (clicks > 0) {
        const double rate =
            static_cast<double>(clicks) / static_cast<double>(pulses_per_pixel);
        res.alpha_est = 1.0 - (rate - ch.y0) / denom;
        res.delta_alpha_empirical =
            std::sqrt(rate * (1.0 - rate) /
                      static_cast<double>(pulses_per_pixel)) /
            denom;
        const double nbar =
            static_cast<double>(pulses_per_pixel) * stats.mean * eta;
        if (nbar > 0.0)
          res.delta_alpha_predicted =
              absorption_uncertainty(alpha, stats.fano, nbar);
      }
      sifted_total.fetch_add(sifted);
      errors_total.fetch_add(errors);
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  report.sifted_bits = sifted_total.load();
  report.sifted_errors = errors_total.load();
  report.qber_measured =
      report.sifted_bits > 0
          ? static_cast<double>(report.sifted_errors) /
                static_cast<double>(report.sifted_bits)
          : 0.0;
  report.eavesdrop_flag = report.qber_measured > qber_threshold;
  return report;
}

std::string ImagingRunReport::csv() const {
  std::string out =
      "x,y,alpha_true,pulses_sent,heralds,detections,alpha_est,"
      "delta_alpha_predicted,delta_alpha_empirical\n";
  char buf[256];
  for (const PixelResult& p : pixels) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%lld,%lld,%lld,", p.x, p.y,
                  p.alpha_true, p.pulses_sent, p.heralds, p.detections);
    out += buf;
    out += opt_field(p.alpha_est);
    out += ',';
    out += opt_field(p.delta_alpha_predicted);
    out += ',';
    out += opt_field(p.delta_alpha_empirical);
    out += '\n';
  }
  return out;
}

nlohmann::json ImagingRunReport::summary() const {
  return nlohmann::json{{"width", width},
                        {"height", height},
                        {"pixel_count", pixels.size()},
                        {"sifted_bits", sifted_bits},
                        {"sifted_errors", sifted_errors},
                        {"qber_measured", qber_measured},
                        {"qber_threshold", qber_threshold},
                        {"eavesdrop_flag", eavesdrop_flag},
                        {"seed", seed}};
}

}  // namespace qsi
