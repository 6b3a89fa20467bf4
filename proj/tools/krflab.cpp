#include <cstdio>

#include "CLI11.hpp"
#include "krf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conformal flow laboratory on the unit torus"};
  app.require_subcommand(1);

  std::string config_path;
  krf::CommandOptions opt;
  long long seed_arg = -1;
  app.add_option("--config", config_path, "scenario config file");
  app.add_option("--out", opt.out_dir_override, "output directory override");
  app.add_option("--seed", seed_arg, "sampling seed override");
  app.add_option("--threads", opt.threads, "worker thread count")
      ->check(CLI::Range(1, 64));
  app.add_flag("--strict", opt.strict, "optional checks become mandatory");

  auto* run = app.add_subcommand("run", "integrate the configured flows");
  auto* dist = app.add_subcommand("dist", "distance fields at a time or the limit");
  std::string at = "limit";
  dist->add_option("--at", at, "ladder time, or 'limit'");
  auto* verify = app.add_subcommand("verify", "run the check battery");
  auto* cex = app.add_subcommand("counterexample", "weak-vs-metric convergence probe");
  int level = 2;
  cex->add_option("--level", level, "net level (2..7)")->check(CLI::Range(2, 7));
  auto* report = app.add_subcommand("report", "render checkpoints, show report");
  for (auto* sub : {run, dist, verify, cex, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (seed_arg >= 0) {
    opt.has_seed = true;
    opt.seed_override = static_cast<std::uint64_t>(seed_arg);
  }

  try {
    if (cex->parsed()) return krf::cmd_counterexample(level, opt);
    if (config_path.empty()) {
      std::fprintf(stderr, "error: --config is required for this subcommand\n");
      return 2;
    }
    const krf::ScenarioConfig cfg = krf::load_config(config_path);
    if (run->parsed()) return krf::cmd_run(cfg, opt);
    if (dist->parsed()) return krf::cmd_dist(cfg, opt, at);
    if (verify->parsed()) return krf::cmd_verify(cfg, opt);
    if (report->parsed()) return krf::cmd_report(cfg, opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
