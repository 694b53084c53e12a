#pragma once

#include <limits>
#include <string>
#include <vector>

#include "greente/errors.hpp"

namespace greente::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<double> coeffs;
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
};

struct Bounds {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

// Minimize objective . x subject to the rows and per-variable bounds.
// Lower bounds must be non-negative.
struct LpProblem {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<Bounds> bounds;  // empty means [0, inf) for every variable
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
};

struct SolveOptions {
  // When set, the tableau is dumped as TSV to dump_path at the end of each
  // simplex phase.
  bool dump_tableau = false;
  std::string dump_path = "lp_tableau.tsv";
};

// Two-phase dense simplex, Bland's anti-cycling rule, fixed pivot order:
// deterministic for identical input. Throws SolverFailureError on numerical
// breakdown (candidate pivot below 1e-11).
LpSolution solve(const LpProblem& problem, const SolveOptions& options = {});

// Largest absolute constraint violation of `values`; used by callers to
// spot-check optimal solutions.
double max_violation(const LpProblem& problem, const std::vector<double>& values);

}  // namespace greente::lp
