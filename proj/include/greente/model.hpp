#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "greente/errors.hpp"

namespace greente {

enum class NodeRole { Ingress, Egress, Core };

std::string node_role_name(NodeRole role);
NodeRole node_role_from(const std::string& name);

struct Node {
  std::string id;
  NodeRole role = NodeRole::Core;
};

// An undirected line between two routers. Traffic may traverse it in either
// direction; `capacity` bounds the total carried load and `base_power` is the
// draw of the port driving it.
struct Link {
  std::string id;
  std::string src;
  std::string dst;
  double capacity = 0.0;
  double base_power = 0.0;
};

// A loopless chain of links. `links` holds indices into
// NetworkInstance::links(); consecutive links share an endpoint.
struct Path {
  std::string id;
  std::vector<std::uint32_t> links;
};

struct IePair {
  std::string id;
  std::string ingress;
  std::string egress;
  double demand = 0.0;
  std::vector<Path> paths;
};

// Power model: UF(u) = idle_fraction + (1 - idle_fraction) * u. An idle port
// draws idle_fraction of base power; a saturated one draws full base power.
struct PowerModel {
  double idle_fraction = 0.9;

  double utilization_factor(double u) const {
    return idle_fraction + (1.0 - idle_fraction) * u;
  }
};

// Immutable problem data: topology, capacities, power model, ingress-egress
// demands and their offline path sets. Construction validates every
// structural invariant and resolves the id-based cross references.
class NetworkInstance {
 public:
  NetworkInstance(std::vector<Node> nodes, std::vector<Link> links,
                  std::vector<IePair> pairs, PowerModel power_model = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<IePair>& pairs() const { return pairs_; }
  const PowerModel& power_model() const { return power_model_; }

  std::uint32_t link_index(const std::string& id) const;
  std::uint32_t pair_index(const std::string& id) const;
  std::optional<std::uint32_t> find_link(const std::string& id) const;
  std::optional<std::uint32_t> find_pair(const std::string& id) const;
  // Index of a path within its pair, looked up by id.
  std::optional<std::uint32_t> find_path(std::uint32_t pair, const std::string& path_id) const;

  // P_l: (pair, path) indices of every path crossing link l.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& paths_through(
      std::uint32_t link) const {
    return paths_through_[link];
  }

  // Ingress node ids in node order (the actors of the distributed scheme).
  std::vector<std::string> ingress_nodes() const;
  // Pair indices whose ingress is the given node, in instance order.
  std::vector<std::uint32_t> pairs_of_ingress(const std::string& node_id) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<IePair> pairs_;
  PowerModel power_model_;

  std::unordered_map<std::string, std::uint32_t> node_index_;
  std::unordered_map<std::string, std::uint32_t> link_index_;
  std::unordered_map<std::string, std::uint32_t> pair_index_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> paths_through_;

  void validate_structure() const;
};

// The x_ip variables: fractions[pair][path], aligned with the instance's pair
// and path ordering. For every pair with an active path the fractions over
// active paths sum to 1.
struct SplitVector {
  std::vector<std::vector<double>> fractions;
};

// The a_l variables: active[link] is 1 while the link is powered, 0 asleep.
struct SleepMask {
  std::vector<std::uint8_t> active;

  bool is_active(std::uint32_t link) const { return active[link] != 0; }
  static SleepMask all_active(std::size_t n) { return SleepMask{std::vector<std::uint8_t>(n, 1)}; }
};

// Mutable traffic-engineering state: splits, sleep mask, the per-pair subset
// of paths not yet excluded, and the derived per-link loads. Single writer;
// share read-only across threads.
struct TeState {
  SplitVector splits;
  SleepMask mask;
  std::vector<std::vector<std::uint8_t>> active_paths;  // [pair][path]
  std::vector<double> loads;                            // [link], derived

  bool path_active(std::uint32_t pair, std::uint32_t path) const {
    return active_paths[pair][path] != 0;
  }
  void recompute_loads(const NetworkInstance& instance);
};

// The operator's energy-saving demand E, in percent of baseline consumption.
struct OperatorRequest {
  double target_saving_percent = 0.0;
};

struct Violation {
  std::string constraint;
  std::string entity;
  std::string detail;
};

// Tolerances shared by the metric and validation code.
inline constexpr double kEqualityTol = 1e-9;
inline constexpr double kCapacitySlack = 1e-9;
inline constexpr double kLoadEps = 1e-12;

// Uniform splits over each pair's paths, everything active and awake.
TeState initial_state(const NetworkInstance& instance);

// State assembled from solver outputs: all paths active, loads derived.
TeState make_state(const NetworkInstance& instance, SplitVector splits, SleepMask mask);

// load(l) = sum over paths through l of x_ip * T_i, by link index.
std::vector<double> link_loads(const NetworkInstance& instance, const TeState& state);

// Max over awake links of load/capacity; 0 when no awake link carries traffic.
// Sleeping links are excluded from the max.
double max_link_utilization(const NetworkInstance& instance, const TeState& state);

// Sum over awake links of base_power * UF(u); sleeping links contribute 0.
double energy_consumption(const NetworkInstance& instance, const TeState& state);

// 100 * (1 - energy / baseline) where the baseline powers every link at the
// utilizations induced by the current splits. Throws DegenerateInstanceError
// when the baseline is zero.
double saved_energy_percent(const NetworkInstance& instance, const TeState& state);

// Empty iff the state satisfies every model constraint within tolerances.
std::vector<Violation> validate(const NetworkInstance& instance, const TeState& state);

}  // namespace greente
