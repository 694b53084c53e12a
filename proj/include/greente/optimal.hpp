#pragma once

#include "greente/lp.hpp"
#include "greente/model.hpp"

namespace greente::optimal {

struct OptLbResult {
  SplitVector splits;
  double max_utilization = 0.0;
};

// Exact min-max load balancing under a fixed sleep mask. Paths crossing a
// sleeping link are pinned to zero; an epigraph variable U turns the min-max
// objective into a plain LP. Throws InfeasibleError when some pair has no
// fully-awake path or the demands do not fit the awake capacities.
OptLbResult solve_opt_lb(const NetworkInstance& instance, const SleepMask& mask);

inline OptLbResult solve_opt_lb(const NetworkInstance& instance) {
  return solve_opt_lb(instance, SleepMask::all_active(instance.links().size()));
}

struct OptEsOptions {
  enum class Method { BranchAndBound, Exhaustive };
  Method method = Method::BranchAndBound;
  std::size_t max_links = 20;  // refuse larger instances unless forced
  bool force = false;
};

struct OptEsResult {
  SleepMask mask;
  SplitVector splits;
  double energy = 0.0;
  double max_utilization = 0.0;
};

// Minimum-energy sleeping set. The objective of a candidate mask is the
// energy of the OptLB split under that mask; ties are broken by lower OptLB
// utilization, then by the lexicographically smallest mask (sleeping sorts
// before active, in link order). The exhaustive method scans all 2^|L| masks
// and doubles as the oracle for the branch-and-bound.
OptEsResult solve_opt_es(const NetworkInstance& instance, const OptEsOptions& options = {});

// Energy of the mask's OptLB split (0 when nothing is awake). The value
// branch-and-bound minimizes.
double energy_objective(const NetworkInstance& instance, const SleepMask& mask);

}  // namespace greente::optimal
