// Command-line front end: `desparse infer` runs one data set, `desparse campaign` repeats simulations.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "desparse/errors.hpp"
#include "desparse/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> method;
};

void add_common(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config, "Configuration file (sectioned key = value)");
  cmd.add_option("--out-dir", o.out_dir, "Directory receiving the outputs")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Override experiment.seed");
  cmd.add_option("--threads", o.threads, "Worker threads; 0 uses every core");
  cmd.add_option("--method", o.method, "d-mtlasso, cd-mtlasso, ecd-mtlasso, d-lasso, sloreta or dspm");
}

desparse::ExperimentConfig resolve(const Overrides& o) {
  desparse::ExperimentConfig cfg = o.config.empty() ? desparse::parse_config("") : desparse::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.method) cfg.method = desparse::parse_method(*o.method);
  if (o.threads) {
    cfg.threads = *o.threads;
  } else if (const char* env = std::getenv("DESPARSE_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw desparse::ConfigError("DESPARSE_THREADS must be an integer");
    }
  }
  if (cfg.threads < 0) throw desparse::ConfigError("thread count must be >= 0");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desparsified multi-task Lasso inference for source imaging"};
  app.require_subcommand(1);
  Overrides infer_opts, campaign_opts;
  auto* infer = app.add_subcommand("infer", "Run one method on one (simulated or loaded) data set");
  auto* campaign = app.add_subcommand("campaign", "Repeat simulation and inference, then score the runs");
  add_common(*infer, infer_opts);
  add_common(*campaign, campaign_opts);
  CLI11_PARSE(app, argc, argv);

  try {
    if (infer->parsed()) {
      desparse::run_infer(resolve(infer_opts), infer_opts.out_dir);
    } else {
      desparse::run_campaign(resolve(campaign_opts), campaign_opts.out_dir);
    }
  } catch (const desparse::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
