#include "greente/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "greente/heuristic.hpp"
#include "greente/optimal.hpp"
#include "greente/rng.hpp"

namespace greente::harness {

namespace {

std::string padded(const std::string& prefix, std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  while (digits.size() < width) digits.insert(digits.begin(), '0');
  return prefix + digits;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw StructuralError("bad number '" + s + "' in CSV");
  }
  return v;
}

// ---- k shortest loopless paths -------------------------------------------

struct SearchPath {
  int hops = 0;
  std::vector<std::uint32_t> nodes;  // node indices, src first
  std::vector<std::uint32_t> edges;  // edge indices
};

// Order: hop count, then node-id sequence (via precomputed ranks), then edge
// sequence to split parallel-edge ties.
struct PathOrder {
  const std::vector<std::uint32_t>* rank;

  bool less(const SearchPath& a, const SearchPath& b) const {
    if (a.hops != b.hops) return a.hops < b.hops;
    const std::size_t n = std::min(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t ra = (*rank)[a.nodes[i]];
      const std::uint32_t rb = (*rank)[b.nodes[i]];
      if (ra != rb) return ra < rb;
    }
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.edges < b.edges;
  }
};

struct Adjacency {
  // per node: (neighbor, edge index), sorted by (neighbor rank, edge index)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;
};

Adjacency build_adjacency(std::size_t n_nodes, const std::vector<GraphEdge>& edges,
                          const std::vector<std::uint32_t>& rank) {
  Adjacency adj;
  adj.out.resize(n_nodes);
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    adj.out[edges[e].a].emplace_back(edges[e].b, e);
    adj.out[edges[e].b].emplace_back(edges[e].a, e);
  }
  for (auto& neighbors : adj.out) {
    std::sort(neighbors.begin(), neighbors.end(),
              [&](const auto& x, const auto& y) {
                if (rank[x.first] != rank[y.first]) return rank[x.first] < rank[y.first];
                return x.second < y.second;
              });
  }
  return adj;
}

// Lexicographic Dijkstra: the composite key (hops, node-rank sequence, edge
// sequence) is preserved under extension, so the usual label-setting
// argument applies.
std::optional<SearchPath> best_path(const Adjacency& adj, const PathOrder& order,
                                    std::uint32_t src, std::uint32_t dst,
                                    const std::set<std::uint32_t>& banned_edges,
                                    const std::set<std::uint32_t>& banned_nodes) {
  const std::size_t n = adj.out.size();
  std::vector<std::optional<SearchPath>> label(n);
  std::vector<char> closed(n, 0);
  label[src] = SearchPath{0, {src}, {}};

  for (;;) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (closed[v] || !label[v]) continue;
      if (u == n || order.less(*label[v], *label[u])) u = v;
    }
    if (u == n) return std::nullopt;
    if (u == dst) return label[u];
    closed[u] = 1;
    for (const auto& [nbr, edge] : adj.out[u]) {
      if (closed[nbr] || banned_edges.count(edge) || banned_nodes.count(nbr)) continue;
      SearchPath cand = *label[u];
      ++cand.hops;
      cand.nodes.push_back(nbr);
      cand.edges.push_back(edge);
      if (!label[nbr] || order.less(cand, *label[nbr])) label[nbr] = std::move(cand);
    }
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> k_shortest_paths(
    const std::vector<std::string>& node_ids, const std::vector<GraphEdge>& edges,
    std::uint32_t src, std::uint32_t dst, int k) {
  if (src >= node_ids.size() || dst >= node_ids.size()) {
    throw StructuralError("k_shortest_paths: node index out of range");
  }
  if (src == dst || k <= 0) return {};

  // rank[v] = position of v's id in sorted order, so comparing ranks equals
  // comparing id strings.
  std::vector<std::uint32_t> by_id(node_ids.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::uint32_t a, std::uint32_t b) { return node_ids[a] < node_ids[b]; });
  std::vector<std::uint32_t> rank(node_ids.size());
  for (std::uint32_t i = 0; i < by_id.size(); ++i) rank[by_id[i]] = i;

  const Adjacency adj = build_adjacency(node_ids.size(), edges, rank);
  const PathOrder order{&rank};

  std::vector<SearchPath> found;
  auto first = best_path(adj, order, src, dst, {}, {});
  if (!first) return {};
  found.push_back(std::move(*first));

  std::vector<SearchPath> candidates;
  auto known = [&](const SearchPath& p) {
    for (const SearchPath& q : found) {
      if (q.edges == p.edges) return true;
    }
    for (const SearchPath& q : candidates) {
      if (q.edges == p.edges) return true;
    }
    return false;
  };

  while (static_cast<int>(found.size()) < k) {
    const SearchPath& prev = found.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const std::uint32_t spur = prev.nodes[i];
      std::set<std::uint32_t> banned_edges;
      for (const SearchPath& p : found) {
        if (p.edges.size() > i &&
            std::equal(p.edges.begin(), p.edges.begin() + i, prev.edges.begin())) {
          banned_edges.insert(p.edges[i]);
        }
      }
      std::set<std::uint32_t> banned_nodes(prev.nodes.begin(), prev.nodes.begin() + i);

      auto tail = best_path(adj, order, spur, dst, banned_edges, banned_nodes);
      if (!tail) continue;
      SearchPath total;
      total.hops = static_cast<int>(i) + tail->hops;
      total.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + i);
      total.nodes.insert(total.nodes.end(), tail->nodes.begin(), tail->nodes.end());
      total.edges.assign(prev.edges.begin(), prev.edges.begin() + i);
      total.edges.insert(total.edges.end(), tail->edges.begin(), tail->edges.end());
      if (!known(total)) candidates.push_back(std::move(total));
    }
    if (candidates.empty()) break;
    auto next = std::min_element(candidates.begin(), candidates.end(),
                                 [&](const SearchPath& a, const SearchPath& b) {
                                   return order.less(a, b);
                                 });
    found.push_back(std::move(*next));
    candidates.erase(next);
  }

  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(found.size());
  for (const SearchPath& p : found) out.push_back(p.edges);
  return out;
}

std::vector<std::vector<std::uint32_t>> k_shortest_paths(const NetworkInstance& instance,
                                                         const std::string& src,
                                                         const std::string& dst, int k) {
  std::vector<std::string> ids;
  ids.reserve(instance.nodes().size());
  std::unordered_map<std::string, std::uint32_t> index;
  for (const Node& n : instance.nodes()) {
    index.emplace(n.id, static_cast<std::uint32_t>(ids.size()));
    ids.push_back(n.id);
  }
  auto s = index.find(src);
  auto d = index.find(dst);
  if (s == index.end() || d == index.end()) {
    throw StructuralError("k_shortest_paths: unknown node id");
  }
  std::vector<GraphEdge> edges;
  edges.reserve(instance.links().size());
  for (const Link& l : instance.links()) {
    edges.push_back({index.at(l.src), index.at(l.dst)});
  }
  return k_shortest_paths(ids, edges, s->second, d->second, k);
}

// ---- instance generation ---------------------------------------------------

void GenParams::check() const {
  if (n_ingress < 1 || n_egress < 1 || n_core < 1) {
    throw StructuralError("node counts must be at least 1");
  }
  if (core_avg_degree < 2.0) throw StructuralError("core_avg_degree must be at least 2");
  if (k_paths < 1) throw StructuralError("k_paths must be at least 1");
  if (demand_total < 0.0) throw StructuralError("demand_total must be non-negative");
  if (attach_count < 2) throw StructuralError("attach_count must be at least 2");
  if (attach_count > n_core) throw StructuralError("attach_count exceeds core size");
  if (capacity_classes.empty()) throw StructuralError("capacity_classes must be non-empty");
  double psum = 0.0;
  for (const CapacityClass& c : capacity_classes) {
    if (!(c.capacity > 0.0) || c.base_power < 0.0 || c.probability < 0.0) {
      throw StructuralError("bad capacity class");
    }
    psum += c.probability;
  }
  if (std::abs(psum - 1.0) > 1e-9) {
    throw StructuralError("capacity class probabilities must sum to 1");
  }
  if (!(idle_fraction >= 0.0 && idle_fraction <= 1.0)) {
    throw StructuralError("idle_fraction must lie in [0, 1]");
  }
}

NetworkInstance generate_instance(const GenParams& params) {
  params.check();
  Rng rng(params.seed, "topology");

  std::vector<Node> nodes;
  for (int i = 0; i < params.n_ingress; ++i) {
    nodes.push_back({padded("in", i, params.n_ingress), NodeRole::Ingress});
  }
  for (int e = 0; e < params.n_egress; ++e) {
    nodes.push_back({padded("eg", e, params.n_egress), NodeRole::Egress});
  }
  const std::uint32_t core_base = static_cast<std::uint32_t>(nodes.size());
  for (int c = 0; c < params.n_core; ++c) {
    nodes.push_back({padded("c", c, params.n_core), NodeRole::Core});
  }

  // Random core edges until the average degree is reached; retry the draw
  // when the mesh comes out disconnected.
  const std::size_t target_edges = static_cast<std::size_t>(
      std::ceil(params.core_avg_degree * params.n_core / 2.0));
  const std::size_t max_core_edges =
      static_cast<std::size_t>(params.n_core) * (params.n_core - 1) / 2;
  if (target_edges > max_core_edges) {
    throw GenerationError("core_avg_degree asks for more edges than the core can hold");
  }

  std::vector<GraphEdge> core_edges;
  bool connected = false;
  for (int attempt = 0; attempt < 100 && !connected; ++attempt) {
    core_edges.clear();
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    while (core_edges.size() < target_edges) {
      std::uint32_t a = core_base + static_cast<std::uint32_t>(rng.below(params.n_core));
      std::uint32_t b = core_base + static_cast<std::uint32_t>(rng.below(params.n_core));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (!used.emplace(a, b).second) continue;
      core_edges.push_back({a, b});
    }
    // connectivity over core nodes only
    std::vector<std::vector<std::uint32_t>> adj(nodes.size());
    for (const GraphEdge& e : core_edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::uint32_t> stack{core_base};
    seen[core_base] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      std::uint32_t u = stack.back();
      stack.pop_back();
      for (std::uint32_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    connected = reached == static_cast<std::size_t>(params.n_core);
  }
  if (!connected) {
    throw GenerationError("could not draw a connected core mesh in 100 attempts");
  }

  // Attach every ingress/egress node to attach_count distinct cores.
  std::vector<GraphEdge> edges = core_edges;
  const std::size_t core_edge_count = edges.size();
  for (std::uint32_t v = 0; v < core_base; ++v) {
    std::set<std::uint32_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(params.attach_count)) {
      chosen.insert(core_base + static_cast<std::uint32_t>(rng.below(params.n_core)));
    }
    for (std::uint32_t c : chosen) edges.push_back({v, c});
  }

  // Capacity classes: core links sample the configured distribution;
  // attachment links take the largest class so access never beats the core
  // to the bottleneck.
  std::size_t largest = 0;
  for (std::size_t k = 1; k < params.capacity_classes.size(); ++k) {
    if (params.capacity_classes[k].capacity >
        params.capacity_classes[largest].capacity) {
      largest = k;
    }
  }
  std::vector<std::size_t> link_class(edges.size(), largest);
  for (std::size_t e = 0; e < core_edge_count; ++e) {
    const double roll = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < params.capacity_classes.size(); ++k) {
      acc += params.capacity_classes[k].probability;
      if (roll < acc || k + 1 == params.capacity_classes.size()) {
        link_class[e] = k;
        break;
      }
    }
  }

  // Offline paths for every ingress x egress pair.
  std::vector<std::string> node_ids;
  node_ids.reserve(nodes.size());
  for (const Node& n : nodes) node_ids.push_back(n.id);

  struct RawPair {
    std::uint32_t ingress, egress;
    std::vector<std::vector<std::uint32_t>> paths;  // edge indices
  };
  std::vector<RawPair> raw;
  for (int i = 0; i < params.n_ingress; ++i) {
    for (int e = 0; e < params.n_egress; ++e) {
      RawPair rp;
      rp.ingress = static_cast<std::uint32_t>(i);
      rp.egress = static_cast<std::uint32_t>(params.n_ingress + e);
      rp.paths = k_shortest_paths(node_ids, edges, rp.ingress, rp.egress, params.k_paths);
      if (rp.paths.empty()) {
        throw GenerationError("no path from " + node_ids[rp.ingress] + " to " +
                              node_ids[rp.egress]);
      }
      raw.push_back(std::move(rp));
    }
  }

  // Optionally drop edges no path uses, then name links in final order.
  std::vector<char> used_edge(edges.size(), params.prune_unused_links ? 0 : 1);
  if (params.prune_unused_links) {
    for (const RawPair& rp : raw) {
      for (const auto& path : rp.paths) {
        for (std::uint32_t e : path) used_edge[e] = 1;
      }
    }
  }
  std::vector<std::uint32_t> edge_to_link(edges.size(), 0);
  std::vector<Link> links;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!used_edge[e]) continue;
    edge_to_link[e] = static_cast<std::uint32_t>(links.size());
    links.push_back(Link{"", node_ids[edges[e].a], node_ids[edges[e].b],
                         params.capacity_classes[link_class[e]].capacity,
                         params.capacity_classes[link_class[e]].base_power});
  }
  for (std::size_t l = 0; l < links.size(); ++l) {
    links[l].id = padded("l", l, links.size());
  }

  const std::size_t n_pairs = raw.size();
  const double per_pair_demand = n_pairs > 0 ? params.demand_total / n_pairs : 0.0;
  std::vector<IePair> pairs;
  for (std::size_t idx = 0; idx < raw.size(); ++idx) {
    const RawPair& rp = raw[idx];
    IePair pair;
    pair.id = padded("ie", idx, n_pairs);
    pair.ingress = node_ids[rp.ingress];
    pair.egress = node_ids[rp.egress];
    pair.demand = per_pair_demand;
    for (std::size_t p = 0; p < rp.paths.size(); ++p) {
      Path path;
      path.id = padded("p", p, rp.paths.size());
      for (std::uint32_t e : rp.paths[p]) path.links.push_back(edge_to_link[e]);
      pair.paths.push_back(std::move(path));
    }
    pairs.push_back(std::move(pair));
  }

  PowerModel pm;
  pm.idle_fraction = params.idle_fraction;
  return NetworkInstance(std::move(nodes), std::move(links), std::move(pairs), pm);
}

// ---- sweep -----------------------------------------------------------------

SweepResult sweep(const GenParams& params, const std::vector<double>& demand_grid,
                  const std::vector<double>& e_levels, std::size_t opt_es_max_links) {
  if (demand_grid.empty() || e_levels.empty()) {
    throw StructuralError("sweep needs a non-empty demand grid and E levels");
  }
  SweepResult result;
  for (double demand : demand_grid) {
    GenParams p = params;
    p.demand_total = demand;
    std::optional<NetworkInstance> instance;
    try {
      instance = generate_instance(p);
    } catch (const Error&) {
      for (double e : e_levels) {
        SweepCell cell;
        cell.demand_total = demand;
        cell.e_level = e;
        result.rows.push_back(cell);
      }
      OptEsCell es_na;
      es_na.demand_total = demand;
      result.opt_es.push_back(es_na);
      continue;
    }

    std::optional<double> opt_lb_util;
    try {
      opt_lb_util = optimal::solve_opt_lb(*instance).max_utilization;
    } catch (const Error&) {
    }

    OptEsCell es_cell;
    es_cell.demand_total = demand;
    if (instance->links().size() <= opt_es_max_links) {
      try {
        optimal::OptEsOptions opts;
        opts.max_links = opt_es_max_links;
        optimal::OptEsResult es = optimal::solve_opt_es(*instance, opts);
        TeState st = make_state(*instance, es.splits, es.mask);
        es_cell.saving = saved_energy_percent(*instance, st);
        es_cell.util = es.max_utilization;
      } catch (const Error&) {
      }
    }
    result.opt_es.push_back(es_cell);

    for (double e : e_levels) {
      SweepCell cell;
      cell.demand_total = demand;
      cell.e_level = e;
      cell.opt_lb_util = opt_lb_util;
      try {
        heuristic::EteResult ete =
            heuristic::ete_run(*instance, OperatorRequest{e});
        if (!validate(*instance, ete.final_state).empty()) {
          throw InfeasibleError("heuristic final state fails validation");
        }
        cell.ete_util = max_link_utilization(*instance, ete.final_state);
        cell.ete_saving = ete.achieved_saving_percent;
        cell.iterations = ete.iterations;
        std::size_t sleeping = 0;
        for (std::uint8_t a : ete.final_state.mask.active) sleeping += a ? 0 : 1;
        cell.sleeping_pct = 100.0 * sleeping / instance->links().size();
        std::size_t routes = 0;
        for (const IePair& pair : instance->pairs()) routes += pair.paths.size();
        cell.excluded_pct = 100.0 * ete.excluded_paths.size() / routes;
        cell.target_met = ete.target_met;
      } catch (const Error&) {
        // leave the ETE columns NA
      }
      result.rows.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {

constexpr char kSweepHeader[] =
    "demand_total,e_level,opt_lb_util,ete_util,ete_saving,iterations,sleeping_pct,"
    "excluded_pct,target_met";

template <typename T, typename Fn>
void append_opt(std::string& out, const std::optional<T>& v, Fn&& fn) {
  if (v) {
    fn(*v);
  } else {
    out += "NA";
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = kSweepHeader;
  out += '\n';
  for (const SweepCell& c : result.rows) {
    append_double(out, c.demand_total);
    out += ',';
    append_double(out, c.e_level);
    out += ',';
    append_opt(out, c.opt_lb_util, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.ete_util, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.ete_saving, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.iterations, [&](int v) { out += std::to_string(v); });
    out += ',';
    append_opt(out, c.sleeping_pct, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.excluded_pct, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.target_met, [&](bool v) { out += v ? "true" : "false"; });
    out += '\n';
  }
  return out;
}

std::string opt_es_to_csv(const SweepResult& result) {
  std::string out = "demand_total,opt_es_saving,opt_es_util\n";
  for (const OptEsCell& c : result.opt_es) {
    append_double(out, c.demand_total);
    out += ',';
    append_opt(out, c.saving, [&](double v) { append_double(out, v); });
    out += ',';
    append_opt(out, c.util, [&](double v) { append_double(out, v); });
    out += '\n';
  }
  return out;
}

SweepResult sweep_from_csv(const std::string& rows_csv, const std::string& opt_es_csv) {
  SweepResult result;
  std::istringstream in(rows_csv);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw StructuralError("sweep CSV header mismatch");
  }
  auto opt_double = [](const std::string& s) -> std::optional<double> {
    if (s == "NA") return std::nullopt;
    return parse_double(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw StructuralError("sweep CSV row has wrong arity");
    SweepCell c;
    c.demand_total = parse_double(f[0]);
    c.e_level = parse_double(f[1]);
    c.opt_lb_util = opt_double(f[2]);
    c.ete_util = opt_double(f[3]);
    c.ete_saving = opt_double(f[4]);
    if (f[5] != "NA") c.iterations = static_cast<int>(parse_double(f[5]));
    c.sleeping_pct = opt_double(f[6]);
    c.excluded_pct = opt_double(f[7]);
    if (f[8] != "NA") c.target_met = f[8] == "true";
    result.rows.push_back(std::move(c));
  }
  if (!opt_es_csv.empty()) {
    std::istringstream in2(opt_es_csv);
    if (!std::getline(in2, line) || line != "demand_total,opt_es_saving,opt_es_util") {
      throw StructuralError("opt-es CSV header mismatch");
    }
    while (std::getline(in2, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 3) throw StructuralError("opt-es CSV row has wrong arity");
      OptEsCell c;
      c.demand_total = parse_double(f[0]);
      c.saving = opt_double(f[1]);
      c.util = opt_double(f[2]);
      result.opt_es.push_back(std::move(c));
    }
  }
  return result;
}

namespace {

std::vector<double> sorted_demands(const SweepResult& result) {
  std::vector<double> demands;
  for (const SweepCell& c : result.rows) demands.push_back(c.demand_total);
  std::sort(demands.begin(), demands.end());
  demands.erase(std::unique(demands.begin(), demands.end()), demands.end());
  return demands;
}

const SweepCell* find_cell(const SweepResult& result, double demand, double e) {
  for (const SweepCell& c : result.rows) {
    if (c.demand_total == demand && c.e_level == e) return &c;
  }
  return nullptr;
}

}  // namespace

std::string fig2_dat(const SweepResult& result, const std::vector<double>& e_levels) {
  std::string out = "# demand opt_lb_util";
  for (double e : e_levels) {
    out += " ete_util_E";
    append_double(out, e);
  }
  out += '\n';
  for (double d : sorted_demands(result)) {
    append_double(out, d);
    const SweepCell* any = find_cell(result, d, e_levels.front());
    std::optional<double> lb;
    if (any) lb = any->opt_lb_util;
    out += ' ';
    append_opt(out, lb, [&](double v) { append_double(out, v); });
    for (double e : e_levels) {
      const SweepCell* c = find_cell(result, d, e);
      std::optional<double> u;
      if (c) u = c->ete_util;
      out += ' ';
      append_opt(out, u, [&](double v) { append_double(out, v); });
    }
    out += '\n';
  }
  return out;
}

std::string fig3_dat(const SweepResult& result, const std::vector<double>& e_levels) {
  std::string out = "# demand opt_es_saving";
  for (double e : e_levels) {
    out += " ete_saving_E";
    append_double(out, e);
  }
  out += '\n';
  for (double d : sorted_demands(result)) {
    append_double(out, d);
    std::optional<double> es;
    for (const OptEsCell& c : result.opt_es) {
      if (c.demand_total == d) es = c.saving;
    }
    out += ' ';
    append_opt(out, es, [&](double v) { append_double(out, v); });
    for (double e : e_levels) {
      const SweepCell* c = find_cell(result, d, e);
      std::optional<double> s;
      if (c) s = c->ete_saving;
      out += ' ';
      append_opt(out, s, [&](double v) { append_double(out, v); });
    }
    out += '\n';
  }
  return out;
}

}  // namespace greente::harness
