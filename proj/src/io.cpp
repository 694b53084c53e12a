#include "greente/io.hpp"

#include <istream>
#include <sstream>

#include <json.hpp>

namespace greente::io {

using nlohmann::json;

namespace {

std::string path_name(std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index);
  std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  while (digits.size() < width) digits.insert(digits.begin(), '0');
  return "p" + digits;
}

json parse_or_rethrow(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the offset of the offending character.
    throw StructuralError("instance JSON parse error at byte " + std::to_string(e.byte) +
                          ": " + e.what());
  }
}

NetworkInstance from_json(const json& doc) {
  try {
    std::vector<Node> nodes;
    for (const json& jn : doc.at("nodes")) {
      nodes.push_back({jn.at("id").get<std::string>(),
                       node_role_from(jn.at("role").get<std::string>())});
    }
    std::vector<Link> links;
    std::unordered_map<std::string, std::uint32_t> link_index;
    for (const json& jl : doc.at("links")) {
      Link l;
      l.id = jl.at("id").get<std::string>();
      l.src = jl.at("src").get<std::string>();
      l.dst = jl.at("dst").get<std::string>();
      l.capacity = jl.at("capacity").get<double>();
      l.base_power = jl.at("base_power").get<double>();
      link_index.emplace(l.id, static_cast<std::uint32_t>(links.size()));
      links.push_back(std::move(l));
    }
    std::vector<IePair> pairs;
    for (const json& jp : doc.at("pairs")) {
      IePair pair;
      pair.id = jp.at("id").get<std::string>();
      pair.ingress = jp.at("ingress").get<std::string>();
      pair.egress = jp.at("egress").get<std::string>();
      pair.demand = jp.at("demand").get<double>();
      const json& jpaths = jp.at("paths");
      std::size_t count = jpaths.size();
      for (std::size_t p = 0; p < count; ++p) {
        Path path;
        path.id = path_name(p, count);
        for (const json& jl : jpaths.at(p)) {
          const std::string lid = jl.get<std::string>();
          auto it = link_index.find(lid);
          if (it == link_index.end()) {
            throw StructuralError("path in pair '" + pair.id + "' references unknown link '" +
                                  lid + "'");
          }
          path.links.push_back(it->second);
        }
        pair.paths.push_back(std::move(path));
      }
      pairs.push_back(std::move(pair));
    }
    PowerModel pm;
    if (doc.contains("power_model")) {
      const json& jpm = doc.at("power_model");
      if (jpm.contains("idle_fraction")) pm.idle_fraction = jpm.at("idle_fraction").get<double>();
    }
    return NetworkInstance(std::move(nodes), std::move(links), std::move(pairs), pm);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed instance document: ") + e.what());
  }
}

}  // namespace

NetworkInstance parse_instance(const std::string& json_text) {
  return from_json(parse_or_rethrow(json_text));
}

NetworkInstance read_instance(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string instance_to_json(const NetworkInstance& instance, int indent) {
  json doc;
  doc["nodes"] = json::array();
  for (const Node& n : instance.nodes()) {
    doc["nodes"].push_back({{"id", n.id}, {"role", node_role_name(n.role)}});
  }
  doc["links"] = json::array();
  for (const Link& l : instance.links()) {
    doc["links"].push_back({{"id", l.id},
                            {"src", l.src},
                            {"dst", l.dst},
                            {"capacity", l.capacity},
                            {"base_power", l.base_power}});
  }
  doc["pairs"] = json::array();
  for (const IePair& pair : instance.pairs()) {
    json jpaths = json::array();
    for (const Path& path : pair.paths) {
      json jlinks = json::array();
      for (std::uint32_t l : path.links) jlinks.push_back(instance.links()[l].id);
      jpaths.push_back(std::move(jlinks));
    }
    doc["pairs"].push_back({{"id", pair.id},
                            {"ingress", pair.ingress},
                            {"egress", pair.egress},
                            {"demand", pair.demand},
                            {"paths", std::move(jpaths)}});
  }
  doc["power_model"] = {{"idle_fraction", instance.power_model().idle_fraction}};
  return doc.dump(indent) + "\n";
}

std::string splits_to_json(const NetworkInstance& instance, const SplitVector& splits,
                           int indent) {
  json doc = json::object();
  for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
    const IePair& pair = instance.pairs()[i];
    json per = json::object();
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      per[pair.paths[p].id] = splits.fractions[i][p];
    }
    doc[pair.id] = std::move(per);
  }
  return doc.dump(indent);
}

std::string solution_to_json(const NetworkInstance& instance, const SplitVector& splits,
                             const SleepMask& mask, double max_utilization, double energy,
                             int indent) {
  json doc;
  doc["max_utilization"] = max_utilization;
  doc["energy_watts"] = energy;
  json jmask = json::object();
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    jmask[instance.links()[l].id] = mask.is_active(l);
  }
  doc["mask"] = std::move(jmask);
  json jsplits = json::object();
  for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
    const IePair& pair = instance.pairs()[i];
    json per = json::object();
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      per[pair.paths[p].id] = splits.fractions[i][p];
    }
    jsplits[pair.id] = std::move(per);
  }
  doc["splits"] = std::move(jsplits);
  return doc.dump(indent) + "\n";
}

std::string state_to_json(const NetworkInstance& instance, const TeState& state, int indent) {
  json doc;
  json jsplits = json::object();
  json jactive = json::object();
  for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
    const IePair& pair = instance.pairs()[i];
    json per = json::object();
    json act = json::array();
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      per[pair.paths[p].id] = state.splits.fractions[i][p];
      if (state.path_active(i, p)) act.push_back(pair.paths[p].id);
    }
    jsplits[pair.id] = std::move(per);
    jactive[pair.id] = std::move(act);
  }
  json jmask = json::object();
  json jloads = json::object();
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    jmask[instance.links()[l].id] = state.mask.is_active(l);
    jloads[instance.links()[l].id] = state.loads[l];
  }
  doc["splits"] = std::move(jsplits);
  doc["active_paths"] = std::move(jactive);
  doc["mask"] = std::move(jmask);
  doc["loads"] = std::move(jloads);
  doc["max_utilization"] = max_link_utilization(instance, state);
  doc["energy_watts"] = energy_consumption(instance, state);
  doc["saving_percent"] = saved_energy_percent(instance, state);
  return doc.dump(indent);
}

}  // namespace greente::io
