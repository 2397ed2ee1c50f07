#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "turnpike/cli.hpp"
#include "turnpike/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Turnpike analysis of set-valued dynamical systems under ideal convergence"};
  app.require_subcommand(1);

  turnpike::RunConfig flags;
  std::string config_path;
  std::string scenario;

  struct Opt {
    CLI::Option* ideal;
    CLI::Option* horizon;
    CLI::Option* beam;
    CLI::Option* trim;
    CLI::Option* grid;
    CLI::Option* theta;
    CLI::Option* eps;
    CLI::Option* seed;
    CLI::Option* output;
    CLI::Option* out_dir;
    CLI::Option* input;
    CLI::Option* k_max;
    CLI::Option* dim;
    CLI::Option* branches;
  };
  std::size_t horizon = 0, beam = 0, dim = 0;
  double trim = 0, grid = 0, theta = 0, eps = 0;
  int k_max = 0;
  std::vector<std::pair<CLI::App*, Opt>> subs;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "cluster points, liminf/limsup and limit of a sequence window"},
      {"optimize", "maxmin beam search and turnpike verdict"},
      {"verify", "conditions A1..A6 and separation variants"},
      {"reproduce", "check the documented behaviour of a scenario"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", scenario,
                    "counterexample, blocks, ifs, l2 or separation");
    sub->add_option("--config", config_path, "ini or JSON config file");
    Opt o{};
    o.ideal = sub->add_option("--ideal", flags.ideal,
                              "fin | density[:theta] | finite-trace:{evens,odds,auto}");
    o.horizon = sub->add_option("--horizon", horizon, "path length N");
    o.beam = sub->add_option("--beam", beam, "beam width");
    o.trim = sub->add_option("--trim", trim, "trim fraction of the density surrogate");
    o.grid = sub->add_option("--grid", grid, "dedup grid (optimize) or cluster grid (analyze)");
    o.theta = sub->add_option("--theta", theta, "cluster occupancy threshold");
    o.eps = sub->add_option("--eps", eps, "limit tolerance");
    o.seed = sub->add_option("--seed", flags.seed, "random seed");
    o.output = sub->add_option("--output", flags.output, "json, csv or both");
    o.out_dir = sub->add_option("--out-dir", flags.out_dir, "report directory");
    o.input = sub->add_option("--input", flags.input, "sequence window file");
    o.k_max = sub->add_option("--k-max", k_max, "block count of the blocks sequence");
    o.dim = sub->add_option("--dim", dim, "truncation dimension of the l2 example");
    o.branches = sub->add_option("--branches", flags.branches, "slope:offset,... for ifs");
    subs.emplace_back(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : turnpike::kExitConfig;
  }

  for (auto& [sub, o] : subs) {
    if (!sub->parsed()) continue;
    turnpike::RunConfig cfg;
    try {
      if (!config_path.empty()) turnpike::load_config_file(config_path, cfg);
    } catch (const turnpike::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return turnpike::kExitConfig;
    }
    cfg.command = sub->get_name();
    if (!scenario.empty()) cfg.scenario = scenario;
    if (o.ideal->count()) cfg.ideal = flags.ideal;
    if (o.horizon->count()) cfg.horizon = horizon;
    if (o.beam->count()) cfg.beam = beam;
    if (o.trim->count()) cfg.trim = trim;
    if (o.grid->count()) cfg.grid = grid;
    if (o.theta->count()) cfg.theta = theta;
    if (o.eps->count()) cfg.eps = eps;
    if (o.seed->count()) cfg.seed = flags.seed;
    if (o.output->count()) cfg.output = flags.output;
    if (o.out_dir->count()) cfg.out_dir = flags.out_dir;
    if (o.input->count()) cfg.input = flags.input;
    if (o.k_max->count()) cfg.k_max = k_max;
    if (o.dim->count()) cfg.dim = dim;
    if (o.branches->count()) cfg.branches = flags.branches;
    try {
      return turnpike::run(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << '\n';
      return 3;
    }
  }
  return turnpike::kExitConfig;
}
