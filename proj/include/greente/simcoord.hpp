#pragma once

#include <optional>
#include <string>
#include <vector>

#include "greente/heuristic.hpp"
#include "greente/model.hpp"

namespace greente::simcoord {

struct SimConfig {
  std::uint64_t seed = 0;
  double interval_min = 1.0;
  double interval_max = 10.0;
  double horizon = 1000.0;
  // How long a traffic-increase claim pins a link awake; defaults to
  // interval_max when unset.
  std::optional<double> claim_ttl;
  heuristic::LbConfig lb;

  double effective_claim_ttl() const { return claim_ttl.value_or(interval_max); }
  void check() const {
    if (!(interval_min < interval_max)) {
      throw StructuralError("interval_min must be below interval_max");
    }
    if (!(horizon > 0.0)) throw StructuralError("horizon must be positive");
    lb.check();
  }
};

enum class SimAction { LbStep, Sleep, Exclusion, Claim };

std::string sim_action_name(SimAction a);
SimAction sim_action_from(const std::string& name);

struct SimEvent {
  double time = 0.0;
  std::string node;       // acting ingress node
  SimAction action = SimAction::LbStep;
  std::string entity;     // link id, "pair/path", or the node itself
  double max_util = 0.0;  // network-wide, after the event
  double saving = 0.0;    // saved-energy percent, after the event

  bool operator==(const SimEvent&) const = default;
};

// The config echo makes a trace self-contained for replay.
struct SimTrace {
  SimConfig config;
  double target_saving_percent = 0.0;
  std::vector<SimEvent> events;
};

struct SimResult {
  TeState final_state;
  SimTrace trace;
};

// Discrete-event simulation of the distributed scheme: every ingress node
// wakes on its own seeded random intervals and runs one balancing round over
// its pairs, sleeps unused links of its paths, and, once its view has
// converged, excludes its lightest path while the operator target is unmet.
// Links whose load a node just raised are claimed and may not be put to
// sleep by other nodes until the claim expires. Pure function of
// (instance, request, config).
SimResult simulate(const NetworkInstance& instance, const OperatorRequest& request,
                   const SimConfig& config);

// Reapply a trace: balancing steps are recomputed (they are deterministic),
// sleeps and exclusions are taken from the recorded events. Returns the same
// final state simulate() produced. Throws CorruptTraceError on unknown ids.
TeState replay(const NetworkInstance& instance, const SimTrace& trace);

// Walk a trace checking the coordination rules: a sleep event must hit a
// zero-load link with no live foreign claim, and no sleeping link may ever
// carry load. Returns human-readable violations; empty means safe.
std::vector<std::string> claim_safety_violations(const NetworkInstance& instance,
                                                 const SimTrace& trace);

std::string trace_to_jsonl(const SimTrace& trace);
SimTrace trace_from_jsonl(const std::string& text);

}  // namespace greente::simcoord
