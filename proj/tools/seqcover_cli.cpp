#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "seqcover/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic sequential cover experiments"};
  app.require_subcommand(1);

  std::string config_path, out, clamp_eps, claim;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::size_t trials = 0;
  std::vector<std::int64_t> horizons;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--clamp-eps", clamp_eps, "log-loss clamp, e.g. 1/T or 0.001");
  app.add_option("--T", horizons, "horizon list, overrides the config");
  auto* trials_opt = app.add_option("--trials", trials, "trials per horizon");

  for (const char* name : {"game", "sweep", "cover-build", "cover-verify", "complexity"})
    app.add_subcommand(name)->fallthrough();
  auto* oracle = app.add_subcommand("oracle")->fallthrough();
  oracle->add_option("--claim", claim, "oracle to run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      j = nlohmann::json::parse(in, nullptr, true, true);
    }
    auto cfg = seqcover::ExperimentConfig::from_json(j);
    cfg.command = app.get_subcommands().front()->get_name();
    if (!claim.empty()) cfg.claim = claim;
    if (*seed_opt) cfg.seed = seed;
    if (!out.empty()) cfg.out = out;
    if (threads) cfg.threads = threads;
    if (!clamp_eps.empty()) cfg.clamp_eps = clamp_eps;
    if (!horizons.empty()) cfg.T_list = horizons;
    if (*trials_opt) cfg.trials = trials;

    const auto result = seqcover::run_experiment(cfg, &std::cerr);
    seqcover::write_outputs(cfg, result);
    std::size_t failed = 0;
    for (const auto& r : result.rows) failed += r.status != "ok" && r.status != "summary";
    if (cfg.command == "oracle")
      for (const auto& r : result.rows)
        std::cout << nlohmann::json{{"claim", r.claim}, {"T", r.T}, {"measured", r.measured.value_or(NAN)},
                                    {"bound", r.bound.value_or(NAN)}, {"pass", r.pass.value_or(false)},
                                    {"status", r.status}}
                         .dump()
                  << '\n';
    std::cout << "wrote " << result.rows.size() << " rows to " << cfg.out << "/results.csv";
    if (failed) std::cout << " (" << failed << " errored)";
    std::cout << '\n';
    return failed ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
