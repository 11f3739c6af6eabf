#pragma once
// The five report-producing commands behind the CLI. Each returns the full
// bundle it wrote so callers (and tests) can inspect exact bytes.

#include <filesystem>

#include "qsi/config.hpp"
#include "qsi/report.hpp"

namespace qsi {

// Exit codes shared by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInfeasible = 4;

// Absorption-uncertainty surface at fixed alpha: fig1.csv.
ReportBundle cmd_fig1(const RunConfig& cfg, const std::filesystem::path& out);

// Single-photon probability curves and crossover: fig2.csv, fig2_summary.json.
ReportBundle cmd_fig2(const RunConfig& cfg, const std::filesystem::path& out);

// Rate vs loss for both sources in two intensity regimes:
// fig3a.csv, fig3b.csv, fig3a_spread.csv, fig3b_spread.csv.
ReportBundle cmd_fig3(const RunConfig& cfg, const std::filesystem::path& out);

// Raster-scan Monte Carlo: pixels.csv, summary.json.
ReportBundle cmd_simulate(const RunConfig& cfg,
                          const std::filesystem::path& out);

// Optimal signal intensity, rate, max tolerable loss, throughput per
// source: optimum.json. exit_code is kExitInfeasible when every source is
// infeasible over the bracket.
ReportBundle cmd_optimize(const RunConfig& cfg,
                          const std::filesystem::path& out);

}  // namespace qsi
