#include <CLI11.hpp>
#include <iostream>

#include "weyllab/cli.hpp"
#include "weyllab/errors.hpp"

// Exit codes: 0 all verdicts pass, 2 a verdict failed, 1 execution error.
int main(int argc, char** argv) {
  CLI::App app{"weyl-lab: desk-scale numerical experiments on spectral asymptotics of "
               "Schrodinger operators"};
  app.require_subcommand(0, 1);

  bool list = false;
  app.add_flag("--list", list, "List experiments and the claim each one tests");

  struct SubState {
    std::string config_path;
    std::string output_dir;
    std::string seed;
    std::string samples;
    std::string threads;
    bool strict = false;
  };
  std::vector<std::pair<CLI::App*, std::shared_ptr<SubState>>> subs;
  for (const auto& info : weyllab::cli::experiment_list()) {
    auto state = std::make_shared<SubState>();
    CLI::App* sub = app.add_subcommand(info.name, info.claim);
    sub->add_option("--config", state->config_path, "key=value or JSON config file");
    sub->add_option("--output-dir", state->output_dir, "directory for CSV/verdict files");
    sub->add_option("--seed", state->seed, "Monte-Carlo base seed (mc.seed)");
    sub->add_option("--samples", state->samples, "Monte-Carlo samples per cell (mc.samples)");
    sub->add_option("--threads", state->threads, "worker thread cap");
    sub->add_flag("--strict", state->strict, "treat adequacy warnings as errors");
    subs.emplace_back(sub, state);
  }

  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& info : weyllab::cli::experiment_list())
      std::cout << info.name << "\n    " << info.claim << "\n";
    return 0;
  }

  for (const auto& [sub, state] : subs) {
    if (!sub->parsed()) continue;
    try {
      weyllab::cli::RunConfig cfg;
      if (!state->config_path.empty())
        cfg = weyllab::cli::RunConfig::from_file(state->config_path);
      cfg.experiment = sub->get_name();
      if (!state->output_dir.empty()) cfg.set("output_dir", state->output_dir);
      if (!state->seed.empty()) cfg.set("mc.seed", state->seed);
      if (!state->samples.empty()) cfg.set("mc.samples", state->samples);
      if (!state->threads.empty()) cfg.set("threads", state->threads);
      if (state->strict) cfg.set("strict", "true");
      return weyllab::cli::run(cfg);
    } catch (const weyllab::Error& err) {
      std::cerr << "weyl-lab: " << err.what() << "\n";
      return 1;
    } catch (const std::exception& err) {
      std::cerr << "weyl-lab: unexpected error: " << err.what() << "\n";
      return 1;
    }
  }

  std::cout << app.help();
  return 0;
}
