#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "greente/model.hpp"

namespace greente::heuristic {

struct LbConfig {
  double delta_fraction = 0.01;  // portion of x_ip moved per step
  double tolerance = 1e-4;       // a round below this improvement counts as quiet
  int max_rounds = 10000;
  // Rounds can go quiet while pairs shuffle traffic sideways before the max
  // drops again, so convergence needs this many quiet rounds in a row.
  int patience = 25;

  void check() const {
    if (!(delta_fraction > 0.0 && delta_fraction <= 0.5)) {
      throw StructuralError("delta_fraction must be in (0, 0.5]");
    }
    if (!(tolerance > 0.0)) throw StructuralError("tolerance must be positive");
    if (patience < 1) throw StructuralError("patience must be at least 1");
  }
};

// Raised when load balancing hits max_rounds; carries the best state seen.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, TeState best)
      : Error(what), best_state(std::move(best)) {}
  TeState best_state;
};

struct LbRoundOutcome {
  double util_before = 0.0;
  double util_after = 0.0;
  // Links whose load grew during the round; the distributed coordinator
  // turns these into claims.
  std::vector<std::uint32_t> increased_links;

  double improvement() const { return util_before - util_after; }
};

// One load-balancing pass: each listed pair (in the given order) picks the
// most utilized link its active paths cross, drains delta_fraction of each
// crossing path's split, and hands the drained traffic to its other paths in
// proportion to their bottleneck spare capacity. A pair's move is rolled
// back if it would raise the pair's local max utilization or break a
// capacity.
LbRoundOutcome lb_round(const NetworkInstance& instance, TeState& state,
                        const LbConfig& config, const std::vector<std::uint32_t>& pair_order);

// Rounds over all pairs (ascending pair order) until a full round improves
// the max utilization by less than config.tolerance. Never worsens the max
// utilization. Throws NonConvergenceError past config.max_rounds.
TeState lb_converge(const NetworkInstance& instance, TeState state, const LbConfig& config = {});

// Sleep every link with zero load; loaded links stay awake. Splits are
// untouched, so the pass is idempotent.
TeState energy_saving_sleep(const NetworkInstance& instance, TeState state);

struct ExcludedPath {
  std::string pair_id;
  std::string path_id;

  bool operator==(const ExcludedPath&) const = default;
};

// Remove the globally lightest active path (minimum x_ip * T_i) among pairs
// that still have two or more active paths, then renormalize that pair.
// Ties break toward the lowest pair id, then the lowest path id. Returns
// nullopt when no pair can give up a path (the exhaustion signal).
std::optional<ExcludedPath> exclude_lightest_path(const NetworkInstance& instance,
                                                  TeState& state);
// Same, restricted to a subset of pairs (the distributed per-node variant).
std::optional<ExcludedPath> exclude_lightest_path(const NetworkInstance& instance,
                                                  TeState& state,
                                                  const std::vector<std::uint32_t>& pairs);

// Drop one specific path from the active set and renormalize its pair.
void apply_exclusion(const NetworkInstance& instance, TeState& state, std::uint32_t pair,
                     std::uint32_t path);

struct IterationStats {
  int iteration = 0;
  double max_util = 0.0;
  double saving_percent = 0.0;
  std::optional<ExcludedPath> excluded;  // path dropped after this pass, if any
};

struct EteResult {
  TeState final_state;
  int iterations = 0;
  std::vector<ExcludedPath> excluded_paths;
  double achieved_saving_percent = 0.0;
  bool target_met = false;
  std::vector<IterationStats> trace;
};

using IterationObserver = std::function<void(const TeState&, const IterationStats&)>;

// The full loop: balance, sleep unused links, compare the saving against the
// operator's target; while short of the target, exclude the lightest path
// and go again. target_met=false means the exclusion supply ran out first.
EteResult ete_run(const NetworkInstance& instance, const OperatorRequest& request,
                  const LbConfig& config = {}, const IterationObserver& observer = {});

std::string ete_result_to_json(const NetworkInstance& instance, const EteResult& result,
                               int indent = 2);
std::string ete_trace_to_csv(const EteResult& result);

}  // namespace greente::heuristic
