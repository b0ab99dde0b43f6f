#include <iostream>

#include "CLI11.hpp"
#include "rlq/cli.hpp"

int main(int argc, char** argv) {
  rlq::RunConfig cfg;
  try {
    cfg.seed = rlq::default_seed();
  } catch (const rlq::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{
      "Robust Λ-quantiles over moment, transport and aggregation uncertainty "
      "sets"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "write to this file instead of stdout");
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "rng seed (overrides RLQ_SEED)");
    sub->add_option("--tol", cfg.tol, "numerical tolerance");
  };

  auto* quant = app.add_subcommand(
      "quantile", "Λ-quantiles of a single distribution");
  quant->add_option("--dist", cfg.dist, "distribution spec, e.g. norm:1,1")
      ->required();
  quant->add_option("--lambda", cfg.lambda, "level function, e.g. step:0.8,2,0.95")
      ->required();
  quant->add_option("--kind", cfg.kind,
                    "qminus|qplus|qtildeminus|qtildeplus|all (default qminus)");
  add_common(quant);

  auto* env = app.add_subcommand(
      "envelope", "tabulate the lower/upper envelopes of an uncertainty set");
  env->add_option("--set", cfg.set, "set spec, e.g. moment:p=2,m=1,v=1")
      ->required();
  env->add_option("--grid", cfg.grid, "evaluation window lo:hi:step")->required();
  add_common(env);

  auto* rob = app.add_subcommand(
      "robust", "robust Λ-quantile over a set, with exactness tag");
  rob->add_option("--set", cfg.set, "set spec")->required();
  rob->add_option("--lambda", cfg.lambda, "level function")->required();
  rob->add_option("--kind", cfg.kind, "quantile kind or all (default qminus)");
  rob->add_option("--dir", cfg.dir, "sup|inf (default sup)");
  add_common(rob);

  auto* port = app.add_subcommand(
      "portfolio", "worst-case weight profile and optimal weights");
  port->add_option("--set", cfg.set,
                   "market spec: moment:p=2 | wass:p=1,a=2,eps=0.1,base=t:3 | "
                   "agg:<marginal>")
      ->required();
  port->add_option("--lambda", cfg.lambda, "level function")->required();
  port->add_option("--kind", cfg.kind, "objective kind (default qtildeminus)");
  port->add_option("--dir", cfg.dir, "must be sup");
  port->add_option("--mu", cfg.mu, "mean vector, e.g. 0.5,1");
  port->add_option("--sigma", cfg.sigma, "covariance rows, e.g. 1,0.5;0.5,1");
  port->add_option("--assets", cfg.assets, "aggregation portfolio size");
  port->add_option("--points", cfg.points, "profile resolution (default 201)");
  add_common(port);

  auto* ver = app.add_subcommand(
      "verify", "sample feasible members and audit the envelope bounds");
  ver->add_option("--set", cfg.set, "set spec")->required();
  ver->add_option("--lambda", cfg.lambda, "level function")->required();
  ver->add_option("--samples", cfg.samples, "sample budget (default 200)");
  add_common(ver);

  auto* rep = app.add_subcommand(
      "reproduce", "recompute a reference table or figure, with divergence report");
  rep->add_option("--table", cfg.table, "table id")->check(CLI::Range(1, 4));
  rep->add_option("--figure", cfg.figure, "figure id")->check(CLI::Range(1, 4));
  rep->add_option("--points", cfg.points, "figure grid resolution (default 201)");
  add_common(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (CLI::App* sub : {quant, env, rob, port, ver, rep})
    if (sub->parsed()) cfg.command = sub->get_name();
  return rlq::run_cli(cfg, std::cout, std::cerr);
}
