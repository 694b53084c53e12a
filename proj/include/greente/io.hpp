#pragma once

#include <iosfwd>
#include <string>

#include "greente/model.hpp"

namespace greente::io {

// Instance file contract: top-level keys nodes, links, pairs, power_model.
//   link = {id, src, dst, capacity, base_power}
//   pair = {id, ingress, egress, demand, paths: [[link-id, ...], ...]}
// All ids are strings. Paths have no ids on disk; they are named p0, p1, ...
// in file order (zero-padded when a pair has ten or more).
NetworkInstance parse_instance(const std::string& json_text);
NetworkInstance read_instance(std::istream& in);
std::string instance_to_json(const NetworkInstance& instance, int indent = 2);

// State fragments used by the CLI result documents.
std::string splits_to_json(const NetworkInstance& instance, const SplitVector& splits,
                           int indent = 2);
std::string state_to_json(const NetworkInstance& instance, const TeState& state,
                          int indent = 2);
// Solver output document: utilization, energy, mask and splits keyed by id.
std::string solution_to_json(const NetworkInstance& instance, const SplitVector& splits,
                             const SleepMask& mask, double max_utilization, double energy,
                             int indent = 2);

}  // namespace greente::io
