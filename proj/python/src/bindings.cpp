#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "greente/harness.hpp"
#include "greente/heuristic.hpp"
#include "greente/io.hpp"
#include "greente/model.hpp"
#include "greente/optimal.hpp"
#include "greente/simcoord.hpp"

namespace py = pybind11;
using namespace greente;

namespace {

py::dict splits_to_dict(const NetworkInstance& instance, const SplitVector& splits) {
  py::dict out;
  for (std::uint32_t i = 0; i < instance.pairs().size(); ++i) {
    const IePair& pair = instance.pairs()[i];
    py::dict per;
    for (std::uint32_t p = 0; p < pair.paths.size(); ++p) {
      per[py::str(pair.paths[p].id)] = splits.fractions[i][p];
    }
    out[py::str(pair.id)] = per;
  }
  return out;
}

py::dict mask_to_dict(const NetworkInstance& instance, const SleepMask& mask) {
  py::dict out;
  for (std::uint32_t l = 0; l < instance.links().size(); ++l) {
    out[py::str(instance.links()[l].id)] = mask.is_active(l);
  }
  return out;
}

py::dict ete_result_to_dict(const NetworkInstance& instance,
                            const heuristic::EteResult& res) {
  py::dict out;
  out["target_met"] = res.target_met;
  out["iterations"] = res.iterations;
  out["achieved_saving_percent"] = res.achieved_saving_percent;
  py::list excluded;
  for (const auto& e : res.excluded_paths) {
    excluded.append(py::make_tuple(e.pair_id, e.path_id));
  }
  out["excluded_paths"] = excluded;
  py::list trace;
  for (const auto& s : res.trace) {
    py::dict row;
    row["iteration"] = s.iteration;
    row["max_util"] = s.max_util;
    row["saving_percent"] = s.saving_percent;
    if (s.excluded) {
      row["excluded"] = py::make_tuple(s.excluded->pair_id, s.excluded->path_id);
    } else {
      row["excluded"] = py::none();
    }
    trace.append(row);
  }
  out["trace"] = trace;
  out["final_state"] = py::cast(res.final_state);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-aware traffic engineering core";

  py::register_exception<StructuralError>(m, "StructuralError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError");
  py::register_exception<SizeLimitError>(m, "SizeLimitError");

  py::class_<NetworkInstance>(m, "Instance")
      .def_static("from_json", [](const std::string& text) { return io::parse_instance(text); })
      .def("to_json", [](const NetworkInstance& self) { return io::instance_to_json(self); })
      .def_property_readonly("num_nodes",
                             [](const NetworkInstance& self) { return self.nodes().size(); })
      .def_property_readonly("num_links",
                             [](const NetworkInstance& self) { return self.links().size(); })
      .def_property_readonly("num_pairs",
                             [](const NetworkInstance& self) { return self.pairs().size(); })
      .def("link_ids",
           [](const NetworkInstance& self) {
             std::vector<std::string> ids;
             for (const Link& l : self.links()) ids.push_back(l.id);
             return ids;
           })
      .def("pair_ids", [](const NetworkInstance& self) {
        std::vector<std::string> ids;
        for (const IePair& p : self.pairs()) ids.push_back(p.id);
        return ids;
      });

  py::class_<TeState>(m, "State")
      .def("splits",
           [](const TeState& self, const NetworkInstance& inst) {
             return splits_to_dict(inst, self.splits);
           })
      .def("mask", [](const TeState& self, const NetworkInstance& inst) {
        return mask_to_dict(inst, self.mask);
      });

  m.def("generate",
        [](std::uint64_t seed, int n_ingress, int n_egress, int n_core, double avg_degree,
           int k_paths, double demand_total, bool prune_unused_links) {
          harness::GenParams p;
          p.seed = seed;
          p.n_ingress = n_ingress;
          p.n_egress = n_egress;
          p.n_core = n_core;
          p.core_avg_degree = avg_degree;
          p.k_paths = k_paths;
          p.demand_total = demand_total;
          p.prune_unused_links = prune_unused_links;
          return harness::generate_instance(p);
        },
        py::arg("seed") = 0, py::arg("n_ingress") = 4, py::arg("n_egress") = 4,
        py::arg("n_core") = 15, py::arg("avg_degree") = 4.0, py::arg("k_paths") = 3,
        py::arg("demand_total") = 40.0, py::arg("prune_unused_links") = true);

  m.def("initial_state", &initial_state, py::arg("instance"));

  m.def("link_loads",
        [](const NetworkInstance& inst, const TeState& state) {
          py::dict out;
          const auto loads = link_loads(inst, state);
          for (std::uint32_t l = 0; l < inst.links().size(); ++l) {
            out[py::str(inst.links()[l].id)] = loads[l];
          }
          return out;
        },
        py::arg("instance"), py::arg("state"));
  m.def("max_link_utilization", &max_link_utilization, py::arg("instance"), py::arg("state"));
  m.def("energy_consumption", &energy_consumption, py::arg("instance"), py::arg("state"));
  m.def("saved_energy_percent", &saved_energy_percent, py::arg("instance"), py::arg("state"));
  m.def("validate",
        [](const NetworkInstance& inst, const TeState& state) {
          py::list out;
          for (const Violation& v : validate(inst, state)) {
            py::dict d;
            d["constraint"] = v.constraint;
            d["entity"] = v.entity;
            d["detail"] = v.detail;
            out.append(d);
          }
          return out;
        },
        py::arg("instance"), py::arg("state"));

  m.def("solve_opt_lb",
        [](const NetworkInstance& inst) {
          auto res = optimal::solve_opt_lb(inst);
          py::dict out;
          out["max_utilization"] = res.max_utilization;
          out["splits"] = splits_to_dict(inst, res.splits);
          return out;
        },
        py::arg("instance"));

  m.def("solve_opt_es",
        [](const NetworkInstance& inst, std::size_t max_links, bool force, bool exhaustive) {
          optimal::OptEsOptions opts;
          opts.max_links = max_links;
          opts.force = force;
          opts.method = exhaustive ? optimal::OptEsOptions::Method::Exhaustive
                                   : optimal::OptEsOptions::Method::BranchAndBound;
          auto res = optimal::solve_opt_es(inst, opts);
          py::dict out;
          out["energy_watts"] = res.energy;
          out["max_utilization"] = res.max_utilization;
          out["mask"] = mask_to_dict(inst, res.mask);
          out["splits"] = splits_to_dict(inst, res.splits);
          return out;
        },
        py::arg("instance"), py::arg("max_links") = 20, py::arg("force") = false,
        py::arg("exhaustive") = false);

  m.def("ete_run",
        [](const NetworkInstance& inst, double target, double delta, double tolerance,
           int max_rounds) {
          heuristic::LbConfig cfg;
          cfg.delta_fraction = delta;
          cfg.tolerance = tolerance;
          cfg.max_rounds = max_rounds;
          return ete_result_to_dict(inst, heuristic::ete_run(inst, OperatorRequest{target}, cfg));
        },
        py::arg("instance"), py::arg("target"), py::arg("delta") = 0.01,
        py::arg("tolerance") = 1e-4, py::arg("max_rounds") = 10000);

  m.def("simulate",
        [](const NetworkInstance& inst, double target, std::uint64_t seed, double interval_min,
           double interval_max, double horizon) {
          simcoord::SimConfig cfg;
          cfg.seed = seed;
          cfg.interval_min = interval_min;
          cfg.interval_max = interval_max;
          cfg.horizon = horizon;
          auto res = simcoord::simulate(inst, OperatorRequest{target}, cfg);
          py::dict out;
          out["final_state"] = py::cast(res.final_state);
          out["trace_jsonl"] = simcoord::trace_to_jsonl(res.trace);
          out["num_events"] = res.trace.events.size();
          return out;
        },
        py::arg("instance"), py::arg("target"), py::arg("seed") = 0,
        py::arg("interval_min") = 1.0, py::arg("interval_max") = 10.0,
        py::arg("horizon") = 1000.0);

  m.def("replay",
        [](const NetworkInstance& inst, const std::string& trace_jsonl) {
          return simcoord::replay(inst, simcoord::trace_from_jsonl(trace_jsonl));
        },
        py::arg("instance"), py::arg("trace_jsonl"));

  m.def("k_shortest_paths",
        [](const NetworkInstance& inst, const std::string& src, const std::string& dst, int k) {
          std::vector<std::vector<std::string>> out;
          for (const auto& path : harness::k_shortest_paths(inst, src, dst, k)) {
            std::vector<std::string> ids;
            for (std::uint32_t l : path) ids.push_back(inst.links()[l].id);
            out.push_back(std::move(ids));
          }
          return out;
        },
        py::arg("instance"), py::arg("src"), py::arg("dst"), py::arg("k"));
}
