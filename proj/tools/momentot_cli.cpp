#include <CLI11.hpp>

#include <iostream>

#include "momentot/app.hpp"

using namespace momentot;

int main(int argc, char** argv)
{
  CLI::App app{"Optimal transport by moment-SoS relaxations"};
  app.require_subcommand(1, 1);

  std::string config, out, orders, grid;
  int order = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  for (const char* name : {"solve", "sweep", "support", "gw", "barycenter", "export-sdpa"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    auto* o1 = sub->add_option("--order", order, "relaxation order")->check(CLI::PositiveNumber);
    auto* o2 = sub->add_option("--orders", orders, "order range a..b");
    o1->excludes(o2);
    sub->add_option("--eta", eta, "support threshold parameter in (0, 1)");
    sub->add_option("--grid", grid, "evaluation grid NxM");
    sub->add_option("--seed", seed, "seed for generated samples");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? app::Ok : app::ConfigFailure;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config);
    cfg.command = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommands().front();
    if (sub->count("--out")) cfg.out = out;
    if (sub->count("--order")) {
      cfg.order = order;
      cfg.order_max = 0;
    }
    if (sub->count("--orders")) std::tie(cfg.order, cfg.order_max) = parse_order_range(orders);
    if (sub->count("--eta")) cfg.postprocess.eta = eta;
    if (sub->count("--grid")) cfg.postprocess.grid = parse_grid(grid);
    if (sub->count("--seed")) cfg.seed = seed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::ConfigFailure;
  }
  return app::run(cfg, std::cerr);
}
