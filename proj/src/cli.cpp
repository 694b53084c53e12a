#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "greente/harness.hpp"
#include "greente/heuristic.hpp"
#include "greente/io.hpp"
#include "greente/optimal.hpp"
#include "greente/simcoord.hpp"

namespace greente::harness {

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write '" + path + "'");
  out << content;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  return out;
}

void add_gen_flags(CLI::App* cmd, GenParams& params) {
  cmd->add_option("--seed", params.seed, "generator seed");
  cmd->add_option("--n-ingress", params.n_ingress, "ingress node count");
  cmd->add_option("--n-egress", params.n_egress, "egress node count");
  cmd->add_option("--n-core", params.n_core, "core node count");
  cmd->add_option("--avg-degree", params.core_avg_degree, "average core degree");
  cmd->add_option("--k-paths", params.k_paths, "offline paths per pair");
  cmd->add_option("--demand-total", params.demand_total, "total traffic demand");
  cmd->add_option("--attach", params.attach_count, "cores per edge node");
  cmd->add_option("--idle-fraction", params.idle_fraction, "idle share of base power");
  cmd->add_flag_callback(
      "--keep-unused-links", [&params] { params.prune_unused_links = false; },
      "keep lines no offline path touches");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"greente: energy-aware traffic engineering toolkit"};
  app.require_subcommand(1);

  GenParams gen_params;
  std::string out_path = "-";
  std::string instance_path = "-";

  auto* generate = app.add_subcommand("generate", "generate a random instance");
  add_gen_flags(generate, gen_params);
  generate->add_option("--out", out_path, "output file, - for stdout");

  auto* solve_lb = app.add_subcommand("solve-lb", "exact min-max load balancing");
  solve_lb->add_option("--instance", instance_path, "instance file, - for stdin");
  solve_lb->add_option("--out", out_path, "output file, - for stdout");

  std::size_t es_max_links = 20;
  bool es_force = false;
  std::string es_method = "bnb";
  auto* solve_es = app.add_subcommand("solve-es", "exact minimum-energy sleeping set");
  solve_es->add_option("--instance", instance_path, "instance file, - for stdin");
  solve_es->add_option("--max-links", es_max_links, "size guard for the exact search");
  solve_es->add_flag("--force", es_force, "override the size guard");
  solve_es->add_option("--method", es_method, "bnb or exhaustive")
      ->check(CLI::IsMember({"bnb", "exhaustive"}));
  solve_es->add_option("--out", out_path, "output file, - for stdout");

  double target = 0.0;
  heuristic::LbConfig lb_config;
  std::string trace_csv;
  auto* ete = app.add_subcommand("ete", "run the heuristic energy-aware TE loop");
  ete->add_option("--instance", instance_path, "instance file, - for stdin");
  ete->add_option("--target", target, "operator energy-saving target E in [0,100)")
      ->required();
  ete->add_option("--delta", lb_config.delta_fraction, "split portion moved per step");
  ete->add_option("--tolerance", lb_config.tolerance, "round-improvement stop threshold");
  ete->add_option("--max-rounds", lb_config.max_rounds, "balancing round cap");
  ete->add_option("--trace-csv", trace_csv, "also write the iteration trace as CSV");
  ete->add_option("--out", out_path, "output file, - for stdout");

  simcoord::SimConfig sim_config;
  double claim_ttl = -1.0;
  std::string state_out;
  auto* simulate = app.add_subcommand("simulate", "distributed execution on an event clock");
  simulate->add_option("--instance", instance_path, "instance file, - for stdin");
  simulate->add_option("--target", target, "operator energy-saving target")->required();
  simulate->add_option("--seed", sim_config.seed, "simulation seed");
  simulate->add_option("--interval-min", sim_config.interval_min, "min wake interval");
  simulate->add_option("--interval-max", sim_config.interval_max, "max wake interval");
  simulate->add_option("--horizon", sim_config.horizon, "simulated end time");
  simulate->add_option("--claim-ttl", claim_ttl, "claim lifetime (default: interval max)");
  simulate->add_option("--delta", sim_config.lb.delta_fraction, "split portion per step");
  simulate->add_option("--tolerance", sim_config.lb.tolerance, "convergence threshold");
  simulate->add_option("--out", state_out, "also write the final state JSON");
  simulate->add_option("--trace", out_path, "trace file (JSON lines), - for stdout");

  std::string demands_csv;
  std::string e_levels_csv = "10,20,30,40,50";
  std::string out_dir = ".";
  std::size_t sweep_es_max_links = 20;
  auto* sweep_cmd = app.add_subcommand("sweep", "demand sweep reproducing the evaluation");
  add_gen_flags(sweep_cmd, gen_params);
  sweep_cmd->add_option("--demands", demands_csv, "comma list of total demands")->required();
  sweep_cmd->add_option("--e-levels", e_levels_csv, "comma list of E targets");
  sweep_cmd->add_option("--out-dir", out_dir, "directory for results.csv and .dat files");
  sweep_cmd->add_option("--opt-es-max-links", sweep_es_max_links,
                        "exact ES benchmark size limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      NetworkInstance instance = generate_instance(gen_params);
      write_output(out_path, io::instance_to_json(instance));
      return 0;
    }
    if (solve_lb->parsed()) {
      NetworkInstance instance = io::parse_instance(read_input(instance_path));
      optimal::OptLbResult res = optimal::solve_opt_lb(instance);
      TeState state = make_state(instance, res.splits,
                                 SleepMask::all_active(instance.links().size()));
      write_output(out_path,
                   io::solution_to_json(instance, res.splits, state.mask,
                                        res.max_utilization,
                                        energy_consumption(instance, state)));
      return 0;
    }
    if (solve_es->parsed()) {
      NetworkInstance instance = io::parse_instance(read_input(instance_path));
      optimal::OptEsOptions opts;
      opts.max_links = es_max_links;
      opts.force = es_force;
      opts.method = es_method == "exhaustive" ? optimal::OptEsOptions::Method::Exhaustive
                                              : optimal::OptEsOptions::Method::BranchAndBound;
      optimal::OptEsResult res = optimal::solve_opt_es(instance, opts);
      write_output(out_path, io::solution_to_json(instance, res.splits, res.mask,
                                                  res.max_utilization, res.energy));
      return 0;
    }
    if (ete->parsed()) {
      NetworkInstance instance = io::parse_instance(read_input(instance_path));
      heuristic::EteResult res =
          heuristic::ete_run(instance, OperatorRequest{target}, lb_config);
      if (!trace_csv.empty()) write_output(trace_csv, heuristic::ete_trace_to_csv(res));
      write_output(out_path, heuristic::ete_result_to_json(instance, res) + "\n");
      return 0;
    }
    if (simulate->parsed()) {
      NetworkInstance instance = io::parse_instance(read_input(instance_path));
      if (claim_ttl >= 0.0) sim_config.claim_ttl = claim_ttl;
      simcoord::SimResult res =
          simcoord::simulate(instance, OperatorRequest{target}, sim_config);
      write_output(out_path, simcoord::trace_to_jsonl(res.trace));
      if (!state_out.empty()) {
        write_output(state_out, io::state_to_json(instance, res.final_state) + "\n");
      }
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const std::vector<double> demands = parse_list(demands_csv);
      const std::vector<double> e_levels = parse_list(e_levels_csv);
      SweepResult res = sweep(gen_params, demands, e_levels, sweep_es_max_links);
      namespace fs = std::filesystem;
      fs::create_directories(out_dir);
      const fs::path dir(out_dir);
      write_output((dir / "results.csv").string(), sweep_to_csv(res));
      write_output((dir / "optes.csv").string(), opt_es_to_csv(res));
      write_output((dir / "fig2.dat").string(), fig2_dat(res, e_levels));
      write_output((dir / "fig3.dat").string(), fig3_dat(res, e_levels));
      std::cerr << "wrote results.csv, optes.csv, fig2.dat, fig3.dat to " << out_dir << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace greente::harness
