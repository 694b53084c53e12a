#include "greente/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace greente {

std::string node_role_name(NodeRole role) {
  switch (role) {
    case NodeRole::Ingress: return "ingress";
    case NodeRole::Egress: return "egress";
    case NodeRole::Core: return "core";
  }
  return "?";
}

NodeRole node_role_from(const std::string& name) {
  if (name == "ingress") return NodeRole::Ingress;
  if (name == "egress") return NodeRole::Egress;
  if (name == "core") return NodeRole::Core;
  throw StructuralError("unknown node role '" + name + "'");
}

NetworkInstance::NetworkInstance(std::vector<Node> nodes, std::vector<Link> links,
                                 std::vector<IePair> pairs, PowerModel power_model)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      pairs_(std::move(pairs)),
      power_model_(std::move(power_model)) {
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i].id, i).second) {
      throw StructuralError("duplicate node id '" + nodes_[i].id + "'");
    }
  }
  for (std::uint32_t i = 0; i < links_.size(); ++i) {
    if (!link_index_.emplace(links_[i].id, i).second) {
      throw StructuralError("duplicate link id '" + links_[i].id + "'");
    }
  }
  for (std::uint32_t i = 0; i < pairs_.size(); ++i) {
    if (!pair_index_.emplace(pairs_[i].id, i).second) {
      throw StructuralError("duplicate pair id '" + pairs_[i].id + "'");
    }
  }
  validate_structure();

  paths_through_.resize(links_.size());
  for (std::uint32_t i = 0; i < pairs_.size(); ++i) {
    for (std::uint32_t p = 0; p < pairs_[i].paths.size(); ++p) {
      for (std::uint32_t l : pairs_[i].paths[p].links) {
        paths_through_[l].emplace_back(i, p);
      }
    }
  }
}

void NetworkInstance::validate_structure() const {
  for (const Link& l : links_) {
    if (!node_index_.count(l.src) || !node_index_.count(l.dst)) {
      throw StructuralError("link '" + l.id + "' references unknown node");
    }
    if (l.src == l.dst) {
      throw StructuralError("link '" + l.id + "' is a self loop");
    }
    if (!(l.capacity > 0.0)) {
      throw StructuralError("link '" + l.id + "' has non-positive capacity");
    }
    if (l.base_power < 0.0) {
      throw StructuralError("link '" + l.id + "' has negative base power");
    }
  }

  std::set<std::string> path_nodes;
  for (const IePair& pair : pairs_) {
    if (pair.demand < 0.0) {
      throw StructuralError("pair '" + pair.id + "' has negative demand");
    }
    if (pair.paths.empty()) {
      throw StructuralError("pair '" + pair.id + "' has no paths");
    }
    auto in = node_index_.find(pair.ingress);
    auto eg = node_index_.find(pair.egress);
    if (in == node_index_.end() || eg == node_index_.end()) {
      throw StructuralError("pair '" + pair.id + "' references unknown node");
    }
    std::set<std::string> path_ids;
    for (const Path& path : pair.paths) {
      if (!path_ids.insert(path.id).second) {
        throw StructuralError("pair '" + pair.id + "' has duplicate path id '" + path.id + "'");
      }
      if (path.links.empty()) {
        throw StructuralError("path '" + pair.id + "/" + path.id + "' is empty");
      }
      // Walk the chain from the ingress; links are undirected so each hop
      // continues from whichever endpoint matches. Simplicity means no node
      // appears twice.
      std::set<std::uint32_t> seen_links;
      std::vector<std::string> node_seq;
      std::string at = pair.ingress;
      node_seq.push_back(at);
      for (std::uint32_t li : path.links) {
        if (li >= links_.size()) {
          throw StructuralError("path '" + pair.id + "/" + path.id +
                                "' references unknown link index");
        }
        if (!seen_links.insert(li).second) {
          throw StructuralError("path '" + pair.id + "/" + path.id + "' repeats link '" +
                                links_[li].id + "'");
        }
        const Link& l = links_[li];
        if (l.src == at) {
          at = l.dst;
        } else if (l.dst == at) {
          at = l.src;
        } else {
          throw StructuralError("path '" + pair.id + "/" + path.id +
                                "' breaks at link '" + l.id + "'");
        }
        node_seq.push_back(at);
      }
      if (at != pair.egress) {
        throw StructuralError("path '" + pair.id + "/" + path.id +
                              "' does not end at egress '" + pair.egress + "'");
      }
      std::set<std::string> uniq(node_seq.begin(), node_seq.end());
      if (uniq.size() != node_seq.size()) {
        throw StructuralError("path '" + pair.id + "/" + path.id + "' is not simple");
      }
      path_nodes.insert(node_seq.begin(), node_seq.end());
    }
  }

  // The subgraph induced by the links must connect every node that appears
  // in any path.
  if (path_nodes.size() > 1) {
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const Link& l : links_) {
      adj[l.src].push_back(l.dst);
      adj[l.dst].push_back(l.src);
    }
    std::set<std::string> visited;
    std::vector<std::string> stack{*path_nodes.begin()};
    visited.insert(stack.back());
    while (!stack.empty()) {
      std::string u = stack.back();
      stack.pop_back();
      for (const std::string& v : adj[u]) {
        if (visited.insert(v).second) stack.push_back(v);
      }
    }
    for (const std::string& n : path_nodes) {
      if (!visited.count(n)) {
        throw StructuralError("node '" + n + "' on a path is disconnected from the topology");
      }
    }
  }
}

std::uint32_t NetworkInstance::link_index(const std::string& id) const {
  auto it = link_index_.find(id);
  if (it == link_index_.end()) throw StructuralError("unknown link id '" + id + "'");
  return it->second;
}

std::uint32_t NetworkInstance::pair_index(const std::string& id) const {
  auto it = pair_index_.find(id);
  if (it == pair_index_.end()) throw StructuralError("unknown pair id '" + id + "'");
  return it->second;
}

std::optional<std::uint32_t> NetworkInstance::find_link(const std::string& id) const {
  auto it = link_index_.find(id);
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> NetworkInstance::find_pair(const std::string& id) const {
  auto it = pair_index_.find(id);
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> NetworkInstance::find_path(std::uint32_t pair,
                                                        const std::string& path_id) const {
  const auto& paths = pairs_[pair].paths;
  for (std::uint32_t p = 0; p < paths.size(); ++p) {
    if (paths[p].id == path_id) return p;
  }
  return std::nullopt;
}

std::vector<std::string> NetworkInstance::ingress_nodes() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_) {
    if (n.role == NodeRole::Ingress) out.push_back(n.id);
  }
  return out;
}

std::vector<std::uint32_t> NetworkInstance::pairs_of_ingress(const std::string& node_id) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].ingress == node_id) out.push_back(i);
  }
  return out;
}

void TeState::recompute_loads(const NetworkInstance& instance) {
  loads = link_loads(instance, *this);
}

TeState initial_state(const NetworkInstance& instance) {
  TeState state;
  state.splits.fractions.reserve(instance.pairs().size());
  state.active_paths.reserve(instance.pairs().size());
  for (const IePair& pair : instance.pairs()) {
    const double share = 1.0 / static_cast<double>(pair.paths.size());
    state.splits.fractions.emplace_back(pair.paths.size(), share);
    state.active_paths.emplace_back(pair.paths.size(), 1);
  }
  state.mask = SleepMask::all_active(instance.links().size());
  state.recompute_loads(instance);
  return state;
}

TeState make_state(const NetworkInstance& instance, SplitVector splits, SleepMask mask) {
  TeState state;
  state.splits = std::move(splits);
  state.mask = std::move(mask);
  for (const IePair& pair : instance.pairs()) {
    state.active_paths.emplace_back(pair.paths.size(), 1);
  }
  state.recompute_loads(instance);
  return state;
}

std::vector<double> link_loads(const NetworkInstance& instance, const TeState& state) {
  const auto& pairs = instance.pairs();
  if (state.splits.fractions.size() != pairs.size()) {
    throw StructuralError("split vector does not match the instance's pairs");
  }
  std::vector<double> loads(instance.links().size(), 0.0);
  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    const IePair& pair = pairs[i];
    if (state.splits.fractions[i].size() != pair.paths.size()) {
      throw StructuralError("split vector does not match paths of pair '" + pair.id + "'");
    }
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      const double carried = state.splits.fractions[i][p] * pair.demand;
      if (carried == 0.0) continue;
      for (std::uint32_t l : pair.paths[p].links) {
        loads[l] += carried;
      }
    }
  }
  return loads;
}

double max_link_utilization(const NetworkInstance& instance, const TeState& state) {
  double best = 0.0;
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    if (!state.mask.is_active(l)) continue;
    best = std::max(best, state.loads[l] / instance.links()[l].capacity);
  }
  return best;
}

double energy_consumption(const NetworkInstance& instance, const TeState& state) {
  const PowerModel& pm = instance.power_model();
  double total = 0.0;
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    if (!state.mask.is_active(l)) continue;
    const double u = state.loads[l] / instance.links()[l].capacity;
    total += instance.links()[l].base_power * pm.utilization_factor(u);
  }
  return total;
}

double saved_energy_percent(const NetworkInstance& instance, const TeState& state) {
  const PowerModel& pm = instance.power_model();
  double baseline = 0.0;
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    const double u = state.loads[l] / instance.links()[l].capacity;
    baseline += instance.links()[l].base_power * pm.utilization_factor(u);
  }
  if (!(baseline > 0.0)) {
    throw DegenerateInstanceError("baseline energy is zero; saved-energy percent undefined");
  }
  return 100.0 * (1.0 - energy_consumption(instance, state) / baseline);
}

std::vector<Violation> validate(const NetworkInstance& instance, const TeState& state) {
  std::vector<Violation> out;
  const auto& pairs = instance.pairs();
  const auto& links = instance.links();

  if (state.splits.fractions.size() != pairs.size() ||
      state.active_paths.size() != pairs.size() ||
      state.mask.active.size() != links.size()) {
    out.push_back({"shape", "", "state dimensions do not match the instance"});
    return out;
  }

  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    const IePair& pair = pairs[i];
    if (state.splits.fractions[i].size() != pair.paths.size() ||
        state.active_paths[i].size() != pair.paths.size()) {
      out.push_back({"shape", pair.id, "per-pair dimensions do not match"});
      continue;
    }
    double active_sum = 0.0;
    bool any_active = false;
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      const double x = state.splits.fractions[i][p];
      if (x < -kLoadEps) {
        out.push_back({"non-negative-split", pair.id + "/" + pair.paths[p].id,
                       "x = " + std::to_string(x)});
      }
      if (state.path_active(i, p)) {
        any_active = true;
        active_sum += x;
      } else if (std::abs(x) > kLoadEps) {
        out.push_back({"excluded-path-split", pair.id + "/" + pair.paths[p].id,
                       "excluded path carries x = " + std::to_string(x)});
      }
    }
    if (any_active && std::abs(active_sum - 1.0) > kEqualityTol) {
      out.push_back({"simplex-constraint", pair.id,
                     "active fractions sum to " + std::to_string(active_sum)});
    }
  }

  const std::vector<double> loads = link_loads(instance, state);
  for (std::uint32_t l = 0; l < links.size(); ++l) {
    if (loads[l] > links[l].capacity + kCapacitySlack) {
      out.push_back({"capacity", links[l].id,
                     "load " + std::to_string(loads[l]) + " exceeds capacity " +
                         std::to_string(links[l].capacity)});
    }
    if (!state.mask.is_active(l) && loads[l] > kEqualityTol) {
      out.push_back({"sleeping-link-load", links[l].id,
                     "sleeping link carries load " + std::to_string(loads[l])});
    }
    if (std::abs(loads[l] - state.loads[l]) > kEqualityTol) {
      out.push_back({"derived-loads", links[l].id,
                     "cached load " + std::to_string(state.loads[l]) +
                         " differs from recomputed " + std::to_string(loads[l])});
    }
  }
  return out;
}

}  // namespace greente
