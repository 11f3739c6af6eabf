#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "qsi/commands.hpp"
#include "qsi/errors.hpp"

namespace {

struct CommandSpec {
  const char* name;
  const char* description;
  qsi::ReportBundle (*run)(const qsi::RunConfig&,
                           const std::filesystem::path&);
};

constexpr CommandSpec kCommands[] = {
    {"fig1", "Absorption-uncertainty surface over Fano factor and mean "
             "photon number",
     qsi::cmd_fig1},
    {"fig2", "Single-photon probability curves and their crossover",
     qsi::cmd_fig2},
    {"fig3", "Secure key rate versus channel loss for both sources",
     qsi::cmd_fig3},
    {"simulate", "Monte Carlo raster scan with BB84 sifting", qsi::cmd_simulate},
    {"optimize", "Optimal signal intensity, max tolerable loss, throughput",
     qsi::cmd_optimize},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoy-state key rates and quantum-secured imaging tables"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  const CommandSpec* chosen = nullptr;

  for (const CommandSpec& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory (default: out)");
    sub->add_option("--seed", seed, "64-bit RNG seed; overrides the config");
    sub->callback([&chosen, &cmd]() { chosen = &cmd; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    qsi::RunConfig cfg;
    if (!config_path.empty())
      cfg = qsi::RunConfig::from_file(config_path);
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) {
      cfg.seed = seed;
      cfg.seed_present = true;
    }
    const qsi::ReportBundle bundle = chosen->run(cfg, out_dir);
    std::printf("%s: wrote %zu files and manifest.json to %s\n", chosen->name,
                bundle.files.size(), out_dir.c_str());
    return bundle.exit_code;
  } catch (const qsi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return qsi::kExitConfig;
  } catch (const qsi::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return qsi::kExitIo;
  } catch (const qsi::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return qsi::kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qsi::kExitInternal;
  }
}
