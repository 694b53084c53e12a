#include "greente/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

namespace greente::optimal {

namespace {

bool path_fully_awake(const Path& path, const SleepMask& mask) {
  for (std::uint32_t l : path.links) {
    if (!mask.is_active(l)) return false;
  }
  return true;
}

struct Candidate {
  SleepMask mask;
  SplitVector splits;
  double energy = 0.0;
  double util = 0.0;
};

// Strict preference order shared by enumeration and branch-and-bound so both
// land on the identical winner: energy, then utilization, then the
// lexicographically smallest mask.
bool better(const Candidate& a, const Candidate& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.util != b.util) return a.util < b.util;
  return a.mask.active < b.mask.active;
}

std::optional<Candidate> evaluate_mask(const NetworkInstance& instance, const SleepMask& mask) {
  for (const IePair& pair : instance.pairs()) {
    bool any = false;
    for (const Path& path : pair.paths) {
      if (path_fully_awake(path, mask)) {
        any = true;
        break;
      }
    }
    if (!any) return std::nullopt;
  }
  try {
    OptLbResult lb = solve_opt_lb(instance, mask);
    TeState state = make_state(instance, lb.splits, mask);
    Candidate c;
    c.mask = mask;
    c.splits = std::move(lb.splits);
    c.energy = energy_consumption(instance, state);
    c.util = lb.max_utilization;
    return c;
  } catch (const InfeasibleError&) {
    return std::nullopt;
  }
}

}  // namespace

OptLbResult solve_opt_lb(const NetworkInstance& instance, const SleepMask& mask) {
  const auto& pairs = instance.pairs();
  const auto& links = instance.links();
  if (mask.active.size() != links.size()) {
    throw StructuralError("sleep mask does not match the instance's links");
  }

  // Variable layout: U first, then x_ip for every fully-awake path.
  std::vector<std::vector<int>> var_of(pairs.size());
  int n_vars = 1;
  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    var_of[i].assign(pairs[i].paths.size(), -1);
    bool any = false;
    for (std::uint32_t p = 0; p < pairs[i].paths.size(); ++p) {
      if (path_fully_awake(pairs[i].paths[p], mask)) {
        var_of[i][p] = n_vars++;
        any = true;
      }
    }
    if (!any) {
      throw InfeasibleError("pair '" + pairs[i].id + "' has no path over awake links",
                            pairs[i].id);
    }
  }

  lp::LpProblem prob;
  prob.objective.assign(n_vars, 0.0);
  prob.objective[0] = 1.0;
  prob.bounds.assign(n_vars, lp::Bounds{});
  for (int v = 1; v < n_vars; ++v) prob.bounds[v].hi = 1.0;

  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    lp::Row row;
    row.coeffs.assign(n_vars, 0.0);
    for (std::uint32_t p = 0; p < pairs[i].paths.size(); ++p) {
      if (var_of[i][p] >= 0) row.coeffs[var_of[i][p]] = 1.0;
    }
    row.rel = lp::Relation::Equal;
    row.rhs = 1.0;
    prob.rows.push_back(std::move(row));
  }
  for (std::uint32_t l = 0; l < links.size(); ++l) {
    if (!mask.is_active(l)) continue;
    lp::Row util_row;   // sum x_ip T_i - c_l U <= 0
    lp::Row cap_row;    // sum x_ip T_i <= c_l
    util_row.coeffs.assign(n_vars, 0.0);
    cap_row.coeffs.assign(n_vars, 0.0);
    bool touched = false;
    for (const auto& [i, p] : instance.paths_through(l)) {
      if (var_of[i][p] < 0) continue;
      util_row.coeffs[var_of[i][p]] += pairs[i].demand;
      cap_row.coeffs[var_of[i][p]] += pairs[i].demand;
      touched = true;
    }
    if (!touched) continue;
    util_row.coeffs[0] = -links[l].capacity;
    util_row.rel = lp::Relation::LessEqual;
    util_row.rhs = 0.0;
    cap_row.rel = lp::Relation::LessEqual;
    cap_row.rhs = links[l].capacity;
    prob.rows.push_back(std::move(util_row));
    prob.rows.push_back(std::move(cap_row));
  }

  lp::LpSolution sol = lp::solve(prob);
  if (sol.status == lp::LpStatus::Infeasible) {
    // Find a pair whose demand alone cannot fit to name the binding pair;
    // fall back to a generic report.
    for (std::uint32_t i = 0; i < pairs.size(); ++i) {
      double best_bottleneck = 0.0;
      for (std::uint32_t p = 0; p < pairs[i].paths.size(); ++p) {
        if (var_of[i][p] < 0) continue;
        double bottleneck = std::numeric_limits<double>::infinity();
        for (std::uint32_t l : pairs[i].paths[p].links) {
          bottleneck = std::min(bottleneck, links[l].capacity);
        }
        best_bottleneck += bottleneck;
      }
      if (pairs[i].demand > best_bottleneck) {
        throw InfeasibleError("demand of pair '" + pairs[i].id +
                                  "' exceeds the awake capacity of its paths",
                              pairs[i].id);
      }
    }
    throw InfeasibleError("no feasible split under the given sleep mask");
  }
  if (sol.status == lp::LpStatus::Unbounded) {
    throw SolverFailureError("load-balancing LP reported unbounded; formulation bug");
  }

  OptLbResult out;
  out.max_utilization = sol.values[0];
  out.splits.fractions.resize(pairs.size());
  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    out.splits.fractions[i].assign(pairs[i].paths.size(), 0.0);
    for (std::uint32_t p = 0; p < pairs[i].paths.size(); ++p) {
      if (var_of[i][p] >= 0) {
        out.splits.fractions[i][p] = std::max(0.0, sol.values[var_of[i][p]]);
      }
    }
  }
  return out;
}

OptEsResult solve_opt_es(const NetworkInstance& instance, const OptEsOptions& options) {
  const std::size_t n_links = instance.links().size();
  if (n_links > options.max_links && !options.force) {
    throw SizeLimitError("instance has " + std::to_string(n_links) +
                         " links; exact energy search is limited to " +
                         std::to_string(options.max_links) + " (use force to override)");
  }

  std::optional<Candidate> best;

  if (options.method == OptEsOptions::Method::Exhaustive) {
    if (n_links > 24) {
      throw SizeLimitError("exhaustive mask enumeration is not sensible beyond 24 links");
    }
    const std::uint64_t total = std::uint64_t{1} << n_links;
    for (std::uint64_t m = 0; m < total; ++m) {
      SleepMask mask;
      mask.active.resize(n_links);
      for (std::size_t l = 0; l < n_links; ++l) {
        mask.active[l] = (m >> l) & 1 ? 1 : 0;
      }
      auto cand = evaluate_mask(instance, mask);
      if (cand && (!best || better(*cand, *best))) best = std::move(cand);
    }
  } else {
    // Branch over links in descending base-power order, sleeping branch
    // first; prune when a pair loses all paths or when the idle-power lower
    // bound of the links already fixed awake cannot beat the incumbent.
    std::vector<std::uint32_t> order(n_links);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return instance.links()[a].base_power > instance.links()[b].base_power;
    });
    const double idle = instance.power_model().idle_fraction;

    SleepMask mask = SleepMask::all_active(n_links);
    // alive_paths[i] counts paths of pair i with no link fixed asleep yet.
    std::vector<int> alive_paths;
    alive_paths.reserve(instance.pairs().size());
    for (const IePair& pair : instance.pairs()) {
      alive_paths.push_back(static_cast<int>(pair.paths.size()));
    }
    // For the sleeping branch: how many not-yet-dead paths cross each link.
    std::vector<std::vector<std::uint8_t>> path_dead(instance.pairs().size());
    for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
      path_dead[i].assign(instance.pairs()[i].paths.size(), 0);
    }

    const auto bound_slop = [](double incumbent) {
      return 1e-9 + 1e-12 * std::abs(incumbent);
    };

    std::function<void(std::size_t, double)> walk = [&](std::size_t depth, double awake_idle) {
      if (best && awake_idle > best->energy + bound_slop(best->energy)) return;
      if (depth == n_links) {
        auto cand = evaluate_mask(instance, mask);
        if (cand && (!best || better(*cand, *best))) best = std::move(cand);
        return;
      }
      const std::uint32_t link = order[depth];

      // Sleeping branch: kill paths through this link, bail if a pair dies.
      mask.active[link] = 0;
      std::vector<std::pair<std::uint32_t, std::uint32_t>> killed;
      bool pair_died = false;
      for (const auto& [i, p] : instance.paths_through(link)) {
        if (path_dead[i][p]) continue;
        path_dead[i][p] = 1;
        killed.emplace_back(i, p);
        if (--alive_paths[i] == 0) {
          pair_died = true;
          break;
        }
      }
      if (!pair_died) walk(depth + 1, awake_idle);
      for (const auto& [i, p] : killed) {
        path_dead[i][p] = 0;
        ++alive_paths[i];
      }
      mask.active[link] = 1;

      // Awake branch.
      walk(depth + 1, awake_idle + instance.links()[link].base_power * idle);
    };
    walk(0, 0.0);
  }

  if (!best) {
    throw InfeasibleError("no sleep mask admits a feasible split (even all-awake fails)");
  }
  OptEsResult out;
  out.mask = std::move(best->mask);
  out.splits = std::move(best->splits);
  out.energy = best->energy;
  out.max_utilization = best->util;
  return out;
}

double energy_objective(const NetworkInstance& instance, const SleepMask& mask) {
  bool any_awake = false;
  for (std::uint8_t a : mask.active) {
    if (a) {
      any_awake = true;
      break;
    }
  }
  if (!any_awake) return 0.0;
  OptLbResult lb = solve_opt_lb(instance, mask);
  TeState state = make_state(instance, lb.splits, mask);
  return energy_consumption(instance, state);
}

}  // namespace greente::optimal
