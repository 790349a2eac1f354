// Command-line runner: mqc run <config> | validate <config> | version
#include <CLI11.hpp>

#include <iostream>

#include "mqc/errors.hpp"
#include "mqc/runner/config.hpp"
#include "mqc/runner/pipelines.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kRunFailure = 1;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-quantum coherence simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "mqc_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "Execute the pipelines of a config (or manifest)");
  run->add_option("config", config_path, "JSON config or manifest.json")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "JSON config")->required();

  app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("version")) {
    std::cout << "mqc " << MQC_VERSION << "\n";
    return 0;
  }

  mqc::runner::RunConfig cfg;
  try {
    cfg = mqc::runner::load_config(config_path);
  } catch (const mqc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  }

  if (app.got_subcommand("validate")) {
    std::cout << config_path << ": ok, " << cfg.pipelines.size() << " pipeline(s), run_id "
              << cfg.run_id() << "\n";
    return 0;
  }

  if (seed) {
    cfg.seed = *seed;
    cfg.resolved["seed"] = *seed;
  }
  if (threads) cfg.threads = *threads;
  try {
    const auto result = mqc::runner::run(cfg, out_dir);
    for (const auto& f : result.files) std::cout << f << "\n";
    std::cout << "manifest.json run_id=" << cfg.run_id() << "\n";
    for (const auto& p : result.manifest["pipelines"]) {
      for (const auto& w : p["warnings"]) {
        std::cerr << "warning: " << p["type"].get<std::string>() << ": " << w.get<std::string>() << "\n";
      }
    }
    if (result.oracle_failures) {
      std::cerr << "error: oracle validation failed, see oracle_report.json\n";
      return kRunFailure;
    }
  } catch (const mqc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
  return 0;
}
