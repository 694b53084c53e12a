#pragma once

#include <optional>
#include <string>
#include <vector>

#include "greente/model.hpp"

namespace greente::harness {

struct CapacityClass {
  double capacity = 0.0;
  double base_power = 0.0;
  double probability = 0.0;
};

// Defaults follow the evaluation setup: four ingress and four egress nodes
// around a 15-node random core mesh, three offline paths per pair, capacity
// classes 1/10/40 drawing 5/10/20 W.
struct GenParams {
  int n_ingress = 4;
  int n_egress = 4;
  int n_core = 15;
  double core_avg_degree = 4.0;
  std::vector<CapacityClass> capacity_classes = {
      {1.0, 5.0, 0.15}, {10.0, 10.0, 0.55}, {40.0, 20.0, 0.30}};
  int k_paths = 3;
  double demand_total = 40.0;
  std::uint64_t seed = 0;
  int attach_count = 2;       // cores each edge node connects to
  bool prune_unused_links = true;  // drop lines no offline path ever touches
  double idle_fraction = 0.9;

  void check() const;
};

// Random mesh + attachments + uniform demands + k loopless shortest paths
// per pair. Deterministic in (params, seed); identical params give a
// byte-identical instance file. Throws GenerationError when a connected mesh
// cannot be drawn in bounded retries.
NetworkInstance generate_instance(const GenParams& params);

struct GraphEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

// Up to k loopless paths from src to dst ordered by hop count, ties broken
// by the lexicographic node-id sequence. Returns edge-index sequences; empty
// when dst is unreachable. (Yen's algorithm over an undirected multigraph.)
std::vector<std::vector<std::uint32_t>> k_shortest_paths(
    const std::vector<std::string>& node_ids, const std::vector<GraphEdge>& edges,
    std::uint32_t src, std::uint32_t dst, int k);

// Same over an instance's topology; src/dst are node ids, output paths are
// link-index sequences.
std::vector<std::vector<std::uint32_t>> k_shortest_paths(const NetworkInstance& instance,
                                                         const std::string& src,
                                                         const std::string& dst, int k);

// One sweep cell; empty optionals mean the cell failed and was recorded NA.
struct SweepCell {
  double demand_total = 0.0;
  double e_level = 0.0;
  std::optional<double> opt_lb_util;
  std::optional<double> ete_util;
  std::optional<double> ete_saving;
  std::optional<int> iterations;
  std::optional<double> sleeping_pct;
  std::optional<double> excluded_pct;
  std::optional<bool> target_met;

  bool operator==(const SweepCell&) const = default;
};

struct OptEsCell {
  double demand_total = 0.0;
  std::optional<double> saving;
  std::optional<double> util;

  bool operator==(const OptEsCell&) const = default;
};

struct SweepResult {
  std::vector<SweepCell> rows;
  std::vector<OptEsCell> opt_es;

  bool operator==(const SweepResult&) const = default;
};

// Per demand level: the exact LB benchmark, the exact ES benchmark when the
// instance is small enough, and one ETE run per requested E level. Cell
// failures are recorded NA and the sweep continues.
SweepResult sweep(const GenParams& params, const std::vector<double>& demand_grid,
                  const std::vector<double>& e_levels, std::size_t opt_es_max_links = 20);

// results.csv contract:
// demand_total,e_level,opt_lb_util,ete_util,ete_saving,iterations,sleeping_pct,excluded_pct,target_met
std::string sweep_to_csv(const SweepResult& result);
std::string opt_es_to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& rows_csv, const std::string& opt_es_csv = {});

// Gnuplot-ready columns (missing values as NA): max utilization and saving
// versus total demand.
std::string fig2_dat(const SweepResult& result, const std::vector<double>& e_levels);
std::string fig3_dat(const SweepResult& result, const std::vector<double>& e_levels);

// Entry point behind the greente binary; exits 0 on success, 1 on domain
// errors, 2 on usage errors.
int cli_main(int argc, const char* const* argv);

}  // namespace greente::harness
