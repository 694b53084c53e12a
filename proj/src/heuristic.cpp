#include "greente/heuristic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace greente::heuristic {

namespace {

constexpr double kMoveGuard = 1e-12;

double format_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
  return v;
}

// Max utilization over a set of links, looking at current loads.
double local_max_util(const NetworkInstance& instance, const TeState& state,
                      const std::vector<std::uint32_t>& links) {
  double best = 0.0;
  for (std::uint32_t l : links) {
    best = std::max(best, state.loads[l] / instance.links()[l].capacity);
  }
  return best;
}

}  // namespace

LbRoundOutcome lb_round(const NetworkInstance& instance, TeState& state,
                        const LbConfig& config, const std::vector<std::uint32_t>& pair_order) {
  config.check();
  LbRoundOutcome outcome;
  outcome.util_before = max_link_utilization(instance, state);
  const std::vector<double> loads_at_start = state.loads;

  for (std::uint32_t i : pair_order) {
    const IePair& pair = instance.pairs()[i];
    if (pair.demand <= 0.0) continue;

    // Active paths and the links they cross (L_i).
    std::vector<std::uint32_t> actives;
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      if (state.path_active(i, p)) actives.push_back(p);
    }
    if (actives.size() < 2) continue;

    std::vector<std::uint32_t> pair_links;
    for (std::uint32_t p : actives) {
      for (std::uint32_t l : pair.paths[p].links) pair_links.push_back(l);
    }
    std::sort(pair_links.begin(), pair_links.end());
    pair_links.erase(std::unique(pair_links.begin(), pair_links.end()), pair_links.end());

    // The most utilized link among L_i; lowest index wins ties.
    std::uint32_t hot = pair_links.front();
    double hot_util = -1.0;
    for (std::uint32_t l : pair_links) {
      const double u = state.loads[l] / instance.links()[l].capacity;
      if (u > hot_util) {
        hot_util = u;
        hot = l;
      }
    }

    std::vector<std::uint32_t> donors;
    std::vector<std::uint32_t> receivers;
    for (std::uint32_t p : actives) {
      const auto& lks = pair.paths[p].links;
      const bool crosses = std::find(lks.begin(), lks.end(), hot) != lks.end();
      if (crosses && state.splits.fractions[i][p] > kMoveGuard) {
        donors.push_back(p);
      } else if (!crosses) {
        // A path over a sleeping link must stay empty.
        bool awake = true;
        for (std::uint32_t l : lks) awake = awake && state.mask.is_active(l);
        if (awake) receivers.push_back(p);
      }
    }
    if (donors.empty() || receivers.empty()) continue;

    // Receivers weighted by how much traffic they can absorb before any of
    // their links climbs to the hot link's utilization (the waterline).
    // That is the inverse of progressive filling: the coldest path takes
    // the largest share, and a thin link never soaks up traffic just
    // because its absolute spare looks roomy. When no receiver has room
    // below the waterline the weights degenerate; fall back to an even
    // spread and let the acceptance check decide.
    std::vector<double> weights(receivers.size(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t r = 0; r < receivers.size(); ++r) {
      double room = std::numeric_limits<double>::infinity();
      for (std::uint32_t l : pair.paths[receivers[r]].links) {
        room = std::min(room, hot_util * instance.links()[l].capacity - state.loads[l]);
      }
      weights[r] = std::max(0.0, room);
      weight_sum += weights[r];
    }
    const bool room_limited = weight_sum > 0.0;
    if (!room_limited) {
      weights.assign(receivers.size(), 1.0);
      weight_sum = static_cast<double>(receivers.size());
    }

    const double before = local_max_util(instance, state, pair_links);
    std::vector<double> saved_fracs = state.splits.fractions[i];
    std::vector<double> saved_loads;
    saved_loads.reserve(pair_links.size());
    for (std::uint32_t l : pair_links) saved_loads.push_back(state.loads[l]);

    // Donors offer delta_fraction of their split; the executed move is
    // scaled down so no receiver is poured past the waterline, which keeps
    // steps fine-grained near balance instead of overshooting and bouncing
    // off the acceptance check.
    double offered = 0.0;
    for (std::uint32_t p : donors) {
      offered += config.delta_fraction * state.splits.fractions[i][p];
    }
    double moved = offered;
    if (room_limited) moved = std::min(moved, weight_sum / pair.demand);
    if (moved <= kMoveGuard) continue;
    const double donor_scale = moved / offered;

    for (std::uint32_t p : donors) {
      const double dx = config.delta_fraction * state.splits.fractions[i][p] * donor_scale;
      state.splits.fractions[i][p] -= dx;
      for (std::uint32_t l : pair.paths[p].links) state.loads[l] -= dx * pair.demand;
    }
    for (std::size_t r = 0; r < receivers.size(); ++r) {
      const double dx = moved * weights[r] / weight_sum;
      state.splits.fractions[i][receivers[r]] += dx;
      for (std::uint32_t l : pair.paths[receivers[r]].links) {
        state.loads[l] += dx * pair.demand;
      }
    }

    // Accept only moves that do not raise the pair's local max utilization.
    // That alone keeps capacities safe: accepted moves never push any link
    // above the previous local max, so a feasible state stays feasible and
    // an overloaded start can only drain.
    const bool ok = local_max_util(instance, state, pair_links) <= before + kMoveGuard;
    if (!ok) {
      state.splits.fractions[i] = std::move(saved_fracs);
      for (std::size_t k = 0; k < pair_links.size(); ++k) {
        state.loads[pair_links[k]] = saved_loads[k];
      }
    }
  }

  outcome.util_after = max_link_utilization(instance, state);
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    if (state.loads[l] > loads_at_start[l] + kMoveGuard) {
      outcome.increased_links.push_back(l);
    }
  }
  return outcome;
}

TeState lb_converge(const NetworkInstance& instance, TeState state, const LbConfig& config) {
  config.check();
  std::vector<std::uint32_t> order(instance.pairs().size());
  std::iota(order.begin(), order.end(), 0);

  // Converged once a whole window of rounds improves the max utilization by
  // less than the tolerance; single rounds routinely go quiet while traffic
  // shuffles sideways.
  std::vector<double> window;
  for (int round = 0; round < config.max_rounds; ++round) {
    const LbRoundOutcome outcome = lb_round(instance, state, config, order);
    window.push_back(outcome.util_before);
    if (round + 1 >= config.patience) {
      const double window_start = window[round + 1 - config.patience];
      if (window_start - outcome.util_after < config.tolerance) return state;
    }
  }
  throw NonConvergenceError(
      "load balancing did not converge within " + std::to_string(config.max_rounds) + " rounds",
      std::move(state));
}

TeState energy_saving_sleep(const NetworkInstance& instance, TeState state) {
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    state.mask.active[l] = state.loads[l] > kLoadEps ? 1 : 0;
  }
  return state;
}

void apply_exclusion(const NetworkInstance& instance, TeState& state, std::uint32_t pair,
                     std::uint32_t path) {
  const IePair& p = instance.pairs()[pair];
  state.active_paths[pair][path] = 0;
  state.splits.fractions[pair][path] = 0.0;

  std::vector<std::uint32_t> remaining;
  double remaining_sum = 0.0;
  for (std::uint32_t q = 0; q < p.paths.size(); ++q) {
    if (!state.path_active(pair, q)) continue;
    remaining.push_back(q);
    remaining_sum += state.splits.fractions[pair][q];
  }
  if (remaining.empty()) {
    throw InfeasibleError("excluding the last active path of pair '" + p.id + "'", p.id);
  }
  if (remaining_sum > kLoadEps) {
    const double scale = 1.0 / remaining_sum;
    for (std::uint32_t q : remaining) state.splits.fractions[pair][q] *= scale;
  } else {
    // Whole split sat on the excluded path; spread it evenly instead.
    const double share = 1.0 / static_cast<double>(remaining.size());
    for (std::uint32_t q : remaining) state.splits.fractions[pair][q] = share;
  }
  state.recompute_loads(instance);
}

namespace {

std::optional<std::pair<std::uint32_t, std::uint32_t>> find_lightest(
    const NetworkInstance& instance, const TeState& state,
    const std::vector<std::uint32_t>& pairs) {
  std::optional<std::pair<std::uint32_t, std::uint32_t>> pick;
  double pick_weight = 0.0;
  for (std::uint32_t i : pairs) {
    const IePair& pair = instance.pairs()[i];
    int active_count = 0;
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      if (state.path_active(i, p)) ++active_count;
    }
    if (active_count < 2) continue;
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      if (!state.path_active(i, p)) continue;
      const double w = state.splits.fractions[i][p] * pair.demand;
      bool take = false;
      if (!pick || w < pick_weight) {
        take = true;
      } else if (w == pick_weight) {
        const IePair& cur = instance.pairs()[pick->first];
        if (pair.id < cur.id ||
            (pair.id == cur.id && pair.paths[p].id < cur.paths[pick->second].id)) {
          take = true;
        }
      }
      if (take) {
        pick = {i, p};
        pick_weight = w;
      }
    }
  }
  return pick;
}

}  // namespace

std::optional<ExcludedPath> exclude_lightest_path(const NetworkInstance& instance,
                                                  TeState& state,
                                                  const std::vector<std::uint32_t>& pairs) {
  auto pick = find_lightest(instance, state, pairs);
  if (!pick) return std::nullopt;
  apply_exclusion(instance, state, pick->first, pick->second);
  return ExcludedPath{instance.pairs()[pick->first].id,
                      instance.pairs()[pick->first].paths[pick->second].id};
}

std::optional<ExcludedPath> exclude_lightest_path(const NetworkInstance& instance,
                                                  TeState& state) {
  std::vector<std::uint32_t> all(instance.pairs().size());
  std::iota(all.begin(), all.end(), 0);
  return exclude_lightest_path(instance, state, all);
}

EteResult ete_run(const NetworkInstance& instance, const OperatorRequest& request,
                  const LbConfig& config, const IterationObserver& observer) {
  if (!(request.target_saving_percent >= 0.0 && request.target_saving_percent < 100.0)) {
    throw StructuralError("operator target must lie in [0, 100)");
  }
  EteResult result;
  TeState state = initial_state(instance);

  for (;;) {
    state = lb_converge(instance, std::move(state), config);
    state = energy_saving_sleep(instance, std::move(state));
    ++result.iterations;

    IterationStats stats;
    stats.iteration = result.iterations;
    stats.max_util = max_link_utilization(instance, state);
    stats.saving_percent = saved_energy_percent(instance, state);

    if (stats.saving_percent >= request.target_saving_percent) {
      result.target_met = true;
      result.trace.push_back(stats);
      if (observer) observer(state, stats);
      break;
    }
    std::optional<ExcludedPath> excluded = exclude_lightest_path(instance, state);
    if (!excluded) {
      // Exhausted: every pair is down to a single path, E is unreachable.
      result.trace.push_back(stats);
      if (observer) observer(state, stats);
      break;
    }
    stats.excluded = *excluded;
    result.excluded_paths.push_back(*excluded);
    result.trace.push_back(stats);
    if (observer) observer(state, stats);
  }

  result.achieved_saving_percent = saved_energy_percent(instance, state);
  result.final_state = std::move(state);
  return result;
}

std::string ete_result_to_json(const NetworkInstance& instance, const EteResult& result,
                               int indent) {
  using nlohmann::json;
  json doc;
  doc["target_met"] = result.target_met;
  doc["iterations"] = result.iterations;
  doc["achieved_saving_percent"] = result.achieved_saving_percent;
  json excluded = json::array();
  for (const ExcludedPath& e : result.excluded_paths) {
    excluded.push_back({{"pair", e.pair_id}, {"path", e.path_id}});
  }
  doc["excluded_paths"] = std::move(excluded);
  json trace = json::array();
  for (const IterationStats& s : result.trace) {
    json row = {{"iteration", s.iteration},
                {"max_util", s.max_util},
                {"saving_percent", s.saving_percent}};
    if (s.excluded) {
      row["excluded"] = {{"pair", s.excluded->pair_id}, {"path", s.excluded->path_id}};
    } else {
      row["excluded"] = nullptr;
    }
    trace.push_back(std::move(row));
  }
  doc["trace"] = std::move(trace);
  json final_state;
  final_state["max_utilization"] = max_link_utilization(instance, result.final_state);
  final_state["energy_watts"] = energy_consumption(instance, result.final_state);
  json jsplits = json::object();
  for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
    const IePair& pair = instance.pairs()[i];
    json per = json::object();
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      per[pair.paths[p].id] = result.final_state.splits.fractions[i][p];
    }
    jsplits[pair.id] = std::move(per);
  }
  final_state["splits"] = std::move(jsplits);
  json jmask = json::object();
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    jmask[instance.links()[l].id] = result.final_state.mask.is_active(l);
  }
  final_state["mask"] = std::move(jmask);
  doc["final"] = std::move(final_state);
  return doc.dump(indent);
}

std::string ete_trace_to_csv(const EteResult& result) {
  std::string out = "iteration,max_util,saving_percent,excluded\n";
  for (const IterationStats& s : result.trace) {
    out += std::to_string(s.iteration);
    out += ',';
    format_double(out, s.max_util);
    out += ',';
    format_double(out, s.saving_percent);
    out += ',';
    if (s.excluded) {
      out += s.excluded->pair_id + "/" + s.excluded->path_id;
    }
    out += '\n';
  }
  return out;
}

}  // namespace greente::heuristic
