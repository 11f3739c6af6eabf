#include "qsi/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "qsi/errors.hpp"
#include "qsi/imaging.hpp"
#include "qsi/sweep.hpp"

namespace qsi {

namespace {

ReportBundle start_bundle(const RunConfig& cfg) {
  ReportBundle b;
  b.config_echo = cfg.resolved();
  b.timestamp = current_timestamp_utc();
  return b;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void finish(ReportBundle& b, const OutputOptions& opts,
            const std::filesystem::path& out) {
  std::vector<ReportFile> kept;
  for (ReportFile& f : b.files) {
    const bool is_json = ends_with(f.name, ".json");
    if (is_json && !opts.json) continue;
    if (!is_json && !opts.csv) continue;
    kept.push_back(std::move(f));
  }
  b.files = std::move(kept);
  b.write(out);
}

int threads_from_env() {
  const unsigned hw = std::thread::hardware_concurrency();
  const int def = hw > 0 ? static_cast<int>(hw) : 1;
  const char* env = std::getenv("QSI_THREADS");
  if (env == nullptr || *env == '\0') return def;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1)
    throw ConfigError("QSI_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(v, def));
}

double linspace_at(double lo, double hi, int steps, int i) {
  return lo + (hi - lo) * i / (steps - 1);
}

}  // namespace

ReportBundle cmd_fig1(const RunConfig& cfg, const std::filesystem::path& out) {
  ReportBundle b = start_bundle(cfg);
  const Fig1Config& f = cfg.fig1;
  const std::vector<double> grid =
      uncertainty_surface(f.alpha, {f.fano_min, f.fano_max},
                          {f.mean_min, f.mean_max}, f.steps);
  CsvBuilder csv("fano,mean_n,delta_alpha");
  for (int i = 0; i < f.steps; ++i) {
    const double fano = linspace_at(f.fano_min, f.fano_max, f.steps, i);
    for (int j = 0; j < f.steps; ++j) {
      const double mean = linspace_at(f.mean_min, f.mean_max, f.steps, j);
      csv.row({format_double(fano), format_double(mean),
               format_double(grid[static_cast<std::size_t>(i) *
                                      static_cast<std::size_t>(f.steps) +
                                  static_cast<std::size_t>(j)])});
    }
  }
  b.add("fig1.csv", csv.str());
  finish(b, cfg.output, out);
  return b;
}

ReportBundle cmd_fig2(const RunConfig& cfg, const std::filesystem::path& out) {
  ReportBundle b = start_bundle(cfg);
  const Fig2Config& f = cfg.fig2;
  CsvBuilder csv("x,p1_wcs,p1_hsps");
  for (int i = 0; i < f.steps; ++i) {
    const double x = linspace_at(f.x_min, f.x_max, f.steps, i);
    SourceSpec w = cfg.wcs;
    w.mean_intensity = x;
    const double p1_wcs = effective_single_photon_probability(w, f.n_cut);
    SourceSpec h = cfg.hsps;
    h.mean_intensity = x;
    std::string p1_hsps;
    try {
      p1_hsps =
          format_double(effective_single_photon_probability(h, f.n_cut));
    } catch (const HeraldingImpossibleError&) {
      // The herald never fires at this x; the cell stays empty.
    }
    csv.row({format_double(x), format_double(p1_wcs), p1_hsps});
  }
  b.add("fig2.csv", csv.str());

  nlohmann::json summary;
  try {
    const double x_star =
        crossover_mean(cfg.hsps, f.n_cut, f.bracket_lo, f.bracket_hi);
    summary["crossover_x"] = x_star;
  } catch (const BracketError&) {
    summary["crossover_x"] = nullptr;
  }
  summary["bracket_lo"] = f.bracket_lo;
  summary["bracket_hi"] = f.bracket_hi;
  summary["correlation_prob"] = cfg.hsps.correlation_prob;
  summary["herald_efficiency"] = cfg.hsps.herald_efficiency;
  summary["herald_dark"] = cfg.hsps.herald_dark;
  b.add("fig2_summary.json", summary.dump(2) + "\n");
  finish(b, cfg.output, out);
  return b;
}

ReportBundle cmd_fig3(const RunConfig& cfg, const std::filesystem::path& out) {
  ReportBundle b = start_bundle(cfg);
  const struct {
    const char* curve_name;
    const char* spread_name;
    const Fig3Regime* regime;
  } regimes[] = {
      {"fig3a.csv", "fig3a_spread.csv", &cfg.fig3.regime_a},
      {"fig3b.csv", "fig3b_spread.csv", &cfg.fig3.regime_b},
  };
  for (const auto& r : regimes) {
    CurveTable combined;
    for (const SourceSpec* src : {&cfg.wcs, &cfg.hsps}) {
      SweepGrid grid;
      grid.loss_points = cfg.fig3.loss_points;
      grid.mu_points = r.regime->mu_points;
      grid.source = *src;
      grid.channel = cfg.channel;
      grid.decoy = cfg.decoy;
      grid.decoy.decoy_intensities = r.regime->decoys;
      grid.scaling = DecoyScaling::Fixed;
      combined.append(rate_vs_loss(grid));
    }
    b.add(r.curve_name, combined.csv());

    CsvBuilder spread("loss_db,spread_wcs,spread_hsps");
    for (double loss : cfg.fig3.loss_points) {
      std::string w, h;
      try {
        w = format_double(curve_spread(combined, SourceKind::Wcs, loss));
      } catch (const InsufficientDataError&) {
      }
      try {
        h = format_double(curve_spread(combined, SourceKind::Hsps, loss));
      } catch (const InsufficientDataError&) {
      }
      spread.row({format_double(loss), w, h});
    }
    b.add(r.spread_name, spread.str());
  }
  finish(b, cfg.output, out);
  return b;
}

ReportBundle cmd_simulate(const RunConfig& cfg,
                          const std::filesystem::path& out) {
  if (!cfg.seed_present)
    throw ConfigError("simulate: 'seed' is required (config key or --seed)");
  if (cfg.imaging.scene_path.empty())
    throw ConfigError("simulate: 'imaging.scene_path' is required");
  ReportBundle b = start_bundle(cfg);
  const ImagingScene scene = ImagingScene::from_file(cfg.imaging.scene_path);
  const SourceSpec& src =
      cfg.imaging.source == SourceKind::Wcs ? cfg.wcs : cfg.hsps;
  const ImagingRunReport report = simulate_raster_scan(
      scene, src, cfg.channel, cfg.imaging.pulses_per_pixel,
      cfg.imaging.eavesdropper, cfg.seed, cfg.imaging.qber_threshold,
      threads_from_env(), cfg.imaging.n_cut);
  b.add("pixels.csv", report.csv());
  b.add("summary.json", report.summary().dump(2) + "\n");
  finish(b, cfg.output, out);
  return b;
}

ReportBundle cmd_optimize(const RunConfig& cfg,
                          const std::filesystem::path& out) {
  ReportBundle b = start_bundle(cfg);
  const OptimizeConfig& oc = cfg.optimize;
  nlohmann::json doc;
  bool any_feasible = false;
  const struct {
    const char* name;
    const SourceSpec* src;
  } sources[] = {{"wcs", &cfg.wcs}, {"hsps", &cfg.hsps}};
  for (const auto& s : sources) {
    DecoyProtocolSpec tmpl = cfg.decoy;
    tmpl.decoy_intensities = oc.decoys;
    nlohmann::json entry;
    try {
      const OptimizeResult r =
          optimize_mu(*s.src, cfg.channel, tmpl, DecoyScaling::Fixed, oc.mu_lo,
                      oc.mu_hi, oc.tolerance);
      DecoyProtocolSpec at_star = tmpl;
      at_star.signal_intensity = r.mu_star;
      const MaxLossResult ml =
          max_tolerable_loss(*s.src, cfg.channel, at_star, oc.rate_floor,
                             0.01, oc.loss_cap_db);
      entry["feasible"] = true;
      entry["mu_star"] = r.mu_star;
      entry["rate_star"] = r.rate_star;
      entry["max_loss_db"] = ml.loss_db;
      entry["max_loss_at_cap"] = ml.exceeded_cap;
      entry["throughput_bps"] =
          throughput_fom(r.rate_star, s.src->repetition_rate);
      any_feasible = true;
    } catch (const InfeasibleError& e) {
      entry["feasible"] = false;
      entry["reason"] = e.what();
    }
    doc[s.name] = entry;
  }
  b.add("optimum.json", doc.dump(2) + "\n");
  if (!any_feasible) b.exit_code = kExitInfeasible;
  finish(b, cfg.output, out);
  return b;
}

}  // namespace qsi
