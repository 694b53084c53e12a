#include "greente/simcoord.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "greente/rng.hpp"

namespace greente::simcoord {

using nlohmann::json;

std::string sim_action_name(SimAction a) {
  switch (a) {
    case SimAction::LbStep: return "lb-step";
    case SimAction::Sleep: return "sleep";
    case SimAction::Exclusion: return "exclusion";
    case SimAction::Claim: return "claim";
  }
  return "?";
}

SimAction sim_action_from(const std::string& name) {
  if (name == "lb-step") return SimAction::LbStep;
  if (name == "sleep") return SimAction::Sleep;
  if (name == "exclusion") return SimAction::Exclusion;
  if (name == "claim") return SimAction::Claim;
  throw CorruptTraceError("unknown trace action '" + name + "'");
}

namespace {

struct Claim {
  std::size_t owner;  // ingress index
  double expiry;
};

// Links an ingress node may manage: every link on any of its pairs' paths,
// excluded ones included (those are exactly the lines that empty out).
std::vector<std::uint32_t> node_link_scope(const NetworkInstance& instance,
                                           const std::vector<std::uint32_t>& pairs) {
  std::vector<std::uint32_t> links;
  for (std::uint32_t i : pairs) {
    for (const Path& path : instance.pairs()[i].paths) {
      links.insert(links.end(), path.links.begin(), path.links.end());
    }
  }
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
  return links;
}

bool foreign_claim_live(const std::vector<Claim>& claims, std::size_t node, double now) {
  for (const Claim& c : claims) {
    if (c.owner != node && c.expiry > now) return true;
  }
  return false;
}

}  // namespace

SimResult simulate(const NetworkInstance& instance, const OperatorRequest& request,
                   const SimConfig& config) {
  config.check();
  if (!(request.target_saving_percent >= 0.0 && request.target_saving_percent < 100.0)) {
    throw StructuralError("operator target must lie in [0, 100)");
  }
  const double ttl = config.effective_claim_ttl();

  struct NodeRt {
    std::string id;
    std::vector<std::uint32_t> pairs;
    std::vector<std::uint32_t> scope;
    Rng rng;
    double next_wake = 0.0;
    std::vector<double> util_window;  // util_before per wake since last exclusion
    bool done = false;
  };

  std::vector<NodeRt> nodes;
  for (const std::string& id : instance.ingress_nodes()) {
    NodeRt rt{id, instance.pairs_of_ingress(id), {}, Rng(config.seed, id)};
    rt.scope = node_link_scope(instance, rt.pairs);
    rt.next_wake = rt.rng.uniform(config.interval_min, config.interval_max);
    rt.done = rt.pairs.empty();
    nodes.push_back(std::move(rt));
  }

  SimResult result;
  result.trace.config = config;
  result.trace.target_saving_percent = request.target_saving_percent;
  TeState state = initial_state(instance);
  std::vector<std::vector<Claim>> claims(instance.links().size());

  auto emit = [&](double time, const std::string& node, SimAction action,
                  const std::string& entity) {
    result.trace.events.push_back(SimEvent{time, node, action, entity,
                                           max_link_utilization(instance, state),
                                           saved_energy_percent(instance, state)});
  };

  for (;;) {
    std::size_t who = nodes.size();
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (nodes[n].done || nodes[n].next_wake > config.horizon) continue;
      if (who == nodes.size() || nodes[n].next_wake < nodes[who].next_wake) who = n;
    }
    if (who == nodes.size()) break;
    NodeRt& node = nodes[who];
    const double now = node.next_wake;

    // One balancing round over this node's pairs; links it loaded up get
    // claimed so nobody powers them down underneath it.
    const heuristic::LbRoundOutcome round =
        heuristic::lb_round(instance, state, config.lb, node.pairs);
    emit(now, node.id, SimAction::LbStep, node.id);
    for (std::uint32_t l : round.increased_links) {
      auto& cs = claims[l];
      bool merged = false;
      for (Claim& c : cs) {
        if (c.owner == who) {
          c.expiry = std::max(c.expiry, now + ttl);
          merged = true;
          break;
        }
      }
      if (!merged) cs.push_back(Claim{who, now + ttl});
      emit(now, node.id, SimAction::Claim, instance.links()[l].id);
    }

    // Power down this node's unused lines, honoring live foreign claims.
    for (std::uint32_t l : node.scope) {
      if (!state.mask.is_active(l)) continue;
      if (state.loads[l] > kLoadEps) continue;
      if (foreign_claim_live(claims[l], who, now)) continue;
      state.mask.active[l] = 0;
      emit(now, node.id, SimAction::Sleep, instance.links()[l].id);
    }

    // Only a locally converged view (the same window rule lb_converge uses)
    // triggers the target check and, when the target is still unmet, the
    // next exclusion.
    node.util_window.push_back(round.util_before);
    const std::size_t patience = static_cast<std::size_t>(config.lb.patience);
    if (node.util_window.size() >= patience &&
        node.util_window[node.util_window.size() - patience] - round.util_after <
            config.lb.tolerance) {
      const double saving = saved_energy_percent(instance, state);
      if (saving >= request.target_saving_percent) {
        node.done = true;
      } else {
        std::optional<heuristic::ExcludedPath> excluded =
            heuristic::exclude_lightest_path(instance, state, node.pairs);
        if (excluded) {
          emit(now, node.id, SimAction::Exclusion,
               excluded->pair_id + "/" + excluded->path_id);
          node.util_window.clear();
        } else {
          node.done = true;  // nothing left to give up
        }
      }
    }
    if (!node.done) {
      node.next_wake = now + node.rng.uniform(config.interval_min, config.interval_max);
    }
  }

  result.final_state = std::move(state);
  return result;
}

TeState replay(const NetworkInstance& instance, const SimTrace& trace) {
  TeState state = initial_state(instance);
  for (const SimEvent& ev : trace.events) {
    switch (ev.action) {
      case SimAction::LbStep: {
        const std::vector<std::uint32_t> pairs = instance.pairs_of_ingress(ev.node);
        if (pairs.empty()) {
          bool known = false;
          for (const Node& n : instance.nodes()) known |= (n.id == ev.node);
          if (!known) throw CorruptTraceError("trace references unknown node '" + ev.node + "'");
        }
        heuristic::lb_round(instance, state, trace.config.lb, pairs);
        break;
      }
      case SimAction::Sleep: {
        auto l = instance.find_link(ev.entity);
        if (!l) throw CorruptTraceError("trace references unknown link '" + ev.entity + "'");
        state.mask.active[*l] = 0;
        break;
      }
      case SimAction::Exclusion: {
        const auto slash = ev.entity.find('/');
        if (slash == std::string::npos) {
          throw CorruptTraceError("malformed exclusion entity '" + ev.entity + "'");
        }
        auto pair = instance.find_pair(ev.entity.substr(0, slash));
        if (!pair) {
          throw CorruptTraceError("trace references unknown pair in '" + ev.entity + "'");
        }
        auto path = instance.find_path(*pair, ev.entity.substr(slash + 1));
        if (!path) {
          throw CorruptTraceError("trace references unknown path in '" + ev.entity + "'");
        }
        heuristic::apply_exclusion(instance, state, *pair, *path);
        break;
      }
      case SimAction::Claim:
        break;  // claims carry no state
    }
  }
  return state;
}

std::vector<std::string> claim_safety_violations(const NetworkInstance& instance,
                                                 const SimTrace& trace) {
  std::vector<std::string> out;
  const double ttl = trace.config.effective_claim_ttl();
  TeState state = initial_state(instance);
  std::vector<std::vector<std::pair<std::string, double>>> claims(instance.links().size());

  for (const SimEvent& ev : trace.events) {
    switch (ev.action) {
      case SimAction::LbStep:
        heuristic::lb_round(instance, state, trace.config.lb,
                            instance.pairs_of_ingress(ev.node));
        break;
      case SimAction::Claim: {
        auto l = instance.find_link(ev.entity);
        if (!l) throw CorruptTraceError("trace references unknown link '" + ev.entity + "'");
        claims[*l].emplace_back(ev.node, ev.time + ttl);
        break;
      }
      case SimAction::Sleep: {
        auto l = instance.find_link(ev.entity);
        if (!l) throw CorruptTraceError("trace references unknown link '" + ev.entity + "'");
        if (state.loads[*l] > kEqualityTol) {
          std::ostringstream msg;
          msg << "sleep of loaded link '" << ev.entity << "' at t=" << ev.time
              << " (load " << state.loads[*l] << ")";
          out.push_back(msg.str());
        }
        for (const auto& [owner, expiry] : claims[*l]) {
          if (owner != ev.node && expiry > ev.time) {
            std::ostringstream msg;
            msg << "sleep of link '" << ev.entity << "' at t=" << ev.time
                << " despite live claim by '" << owner << "' until t=" << expiry;
            out.push_back(msg.str());
          }
        }
        state.mask.active[*l] = 0;
        break;
      }
      case SimAction::Exclusion: {
        const auto slash = ev.entity.find('/');
        std::optional<std::uint32_t> pair;
        if (slash != std::string::npos) pair = instance.find_pair(ev.entity.substr(0, slash));
        if (!pair) throw CorruptTraceError("malformed exclusion entity '" + ev.entity + "'");
        auto path = instance.find_path(*pair, ev.entity.substr(slash + 1));
        if (!path) throw CorruptTraceError("malformed exclusion entity '" + ev.entity + "'");
        heuristic::apply_exclusion(instance, state, *pair, *path);
        break;
      }
    }
    // No sleeping link may carry load at any event time.
    for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
      if (!state.mask.is_active(l) && state.loads[l] > kEqualityTol) {
        std::ostringstream msg;
        msg << "sleeping link '" << instance.links()[l].id << "' carries load "
            << state.loads[l] << " after event at t=" << ev.time;
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

std::string trace_to_jsonl(const SimTrace& trace) {
  std::string out;
  json header;
  header["type"] = "config";
  header["seed"] = trace.config.seed;
  header["interval_min"] = trace.config.interval_min;
  header["interval_max"] = trace.config.interval_max;
  header["horizon"] = trace.config.horizon;
  header["claim_ttl"] = trace.config.effective_claim_ttl();
  header["delta_fraction"] = trace.config.lb.delta_fraction;
  header["tolerance"] = trace.config.lb.tolerance;
  header["max_rounds"] = trace.config.lb.max_rounds;
  header["target"] = trace.target_saving_percent;
  out += header.dump();
  out += '\n';
  for (const SimEvent& ev : trace.events) {
    json line;
    line["time"] = ev.time;
    line["node"] = ev.node;
    line["action"] = sim_action_name(ev.action);
    line["entity"] = ev.entity;
    line["max_util"] = ev.max_util;
    line["saving"] = ev.saving;
    out += line.dump();
    out += '\n';
  }
  return out;
}

SimTrace trace_from_jsonl(const std::string& text) {
  SimTrace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorruptTraceError(std::string("trace line is not valid JSON: ") + e.what());
    }
    try {
      if (!saw_header && doc.contains("type") && doc.at("type") == "config") {
        trace.config.seed = doc.at("seed").get<std::uint64_t>();
        trace.config.interval_min = doc.at("interval_min").get<double>();
        trace.config.interval_max = doc.at("interval_max").get<double>();
        trace.config.horizon = doc.at("horizon").get<double>();
        trace.config.claim_ttl = doc.at("claim_ttl").get<double>();
        trace.config.lb.delta_fraction = doc.at("delta_fraction").get<double>();
        trace.config.lb.tolerance = doc.at("tolerance").get<double>();
        trace.config.lb.max_rounds = doc.at("max_rounds").get<int>();
        trace.target_saving_percent = doc.at("target").get<double>();
        saw_header = true;
        continue;
      }
      saw_header = true;
      SimEvent ev;
      ev.time = doc.at("time").get<double>();
      ev.node = doc.at("node").get<std::string>();
      ev.action = sim_action_from(doc.at("action").get<std::string>());
      ev.entity = doc.at("entity").get<std::string>();
      ev.max_util = doc.at("max_util").get<double>();
      ev.saving = doc.at("saving").get<double>();
      trace.events.push_back(std::move(ev));
    } catch (const json::exception& e) {
      throw CorruptTraceError(std::string("malformed trace line: ") + e.what());
    }
  }
  return trace;
}

}  // namespace greente::simcoord
