#include "greente/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace greente::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-9;

// Dense tableau: one row per constraint plus a cost row. Columns are the
// shifted structural variables, then slacks/surpluses, then artificials,
// then the rhs.
struct Tableau {
  std::size_t n_struct = 0;
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  std::size_t m = 0;
  std::vector<std::vector<double>> a;  // m rows
  std::vector<double> rhs;
  std::vector<std::size_t> basis;  // basic column per row

  std::size_t cols() const { return n_struct + n_slack + n_art; }
  bool is_artificial(std::size_t col) const { return col >= n_struct + n_slack; }
};

void dump_tsv(const Tableau& t, const std::vector<double>& cost, double cost_rhs,
              const std::string& path, const std::string& phase) {
  std::ofstream out(path, std::ios::app);
  out << "# phase\t" << phase << "\n";
  for (std::size_t r = 0; r < t.m; ++r) {
    out << "b" << t.basis[r];
    for (std::size_t c = 0; c < t.cols(); ++c) out << "\t" << t.a[r][c];
    out << "\t" << t.rhs[r] << "\n";
  }
  out << "z";
  for (std::size_t c = 0; c < t.cols(); ++c) out << "\t" << cost[c];
  out << "\t" << cost_rhs << "\n";
}

void pivot(Tableau& t, std::vector<double>& cost, double& cost_rhs, std::size_t row,
           std::size_t col) {
  const double p = t.a[row][col];
  for (double& v : t.a[row]) v /= p;
  t.rhs[row] /= p;
  t.a[row][col] = 1.0;  // clean rounding noise on the pivot itself
  for (std::size_t r = 0; r < t.m; ++r) {
    if (r == row) continue;
    const double f = t.a[r][col];
    if (f == 0.0) continue;
    for (std::size_t c = 0; c < t.cols(); ++c) t.a[r][c] -= f * t.a[row][c];
    t.rhs[r] -= f * t.rhs[row];
    t.a[r][col] = 0.0;
  }
  const double f = cost[col];
  if (f != 0.0) {
    for (std::size_t c = 0; c < t.cols(); ++c) cost[c] -= f * t.a[row][c];
    cost_rhs -= f * t.rhs[row];
    cost[col] = 0.0;
  }
  t.basis[row] = col;
}

enum class IterResult { Optimal, Unbounded };

// Bland's rule: entering column is the lowest-index one with a negative
// reduced cost; the leaving row breaks ratio ties by the lowest basic
// variable index. Entering never considers artificial columns once phase 1
// is done (allow_art = false).
IterResult run_simplex(Tableau& t, std::vector<double>& cost, double& cost_rhs,
                       bool allow_art) {
  for (;;) {
    std::size_t enter = t.cols();
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!allow_art && t.is_artificial(c)) continue;
      if (cost[c] < -kReducedCostTol) {
        enter = c;
        break;
      }
    }
    if (enter == t.cols()) return IterResult::Optimal;

    std::size_t leave = t.m;
    double best_ratio = 0.0;
    double best_column_entry = 0.0;
    for (std::size_t r = 0; r < t.m; ++r) {
      const double arc = t.a[r][enter];
      if (arc > best_column_entry) best_column_entry = arc;
      if (arc <= kPivotTol) continue;
      const double ratio = t.rhs[r] / arc;
      if (leave == t.m || ratio < best_ratio ||
          (ratio == best_ratio && t.basis[r] < t.basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == t.m) {
      if (best_column_entry > 0.0) {
        std::ostringstream msg;
        msg << "numerical breakdown: best pivot " << best_column_entry << " in column "
            << enter << " is below " << kPivotTol;
        throw SolverFailureError(msg.str());
      }
      return IterResult::Unbounded;
    }
    pivot(t, cost, cost_rhs, leave, enter);
  }
}

void check_problem(const LpProblem& p) {
  const std::size_t n = p.objective.size();
  if (n == 0) throw StructuralError("LP has no variables");
  if (!p.bounds.empty() && p.bounds.size() != n) {
    throw StructuralError("LP bounds size does not match variable count");
  }
  for (const Row& row : p.rows) {
    if (row.coeffs.size() != n) {
      throw StructuralError("LP row length does not match variable count");
    }
    if (!std::isfinite(row.rhs)) throw StructuralError("LP rhs not finite");
  }
  for (const Bounds& b : p.bounds) {
    if (b.lo < 0.0 || !(b.hi >= b.lo)) {
      throw StructuralError("LP bounds must satisfy 0 <= lo <= hi");
    }
  }
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolveOptions& options) {
  check_problem(problem);
  const std::size_t n = problem.objective.size();
  std::vector<Bounds> bounds = problem.bounds;
  if (bounds.empty()) bounds.resize(n);

  // Shift x = lo + y so every variable is y >= 0; finite upper bounds become
  // explicit rows. Desk-scale problems make the extra rows cheap.
  struct NormRow {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<NormRow> rows;
  rows.reserve(problem.rows.size() + n);
  for (const Row& row : problem.rows) {
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += row.coeffs[j] * bounds[j].lo;
    rows.push_back({row.coeffs, row.rel, row.rhs - shift});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(bounds[j].hi)) {
      std::vector<double> coeffs(n, 0.0);
      coeffs[j] = 1.0;
      rows.push_back({std::move(coeffs), Relation::LessEqual, bounds[j].hi - bounds[j].lo});
    }
  }

  // Normalize to non-negative rhs, then add slack/surplus/artificial columns.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (NormRow& row : rows) {
    if (row.rhs < 0.0) {
      for (double& c : row.coeffs) c = -c;
      row.rhs = -row.rhs;
      if (row.rel == Relation::LessEqual) {
        row.rel = Relation::GreaterEqual;
      } else if (row.rel == Relation::GreaterEqual) {
        row.rel = Relation::LessEqual;
      }
    }
    if (row.rel != Relation::Equal) ++n_slack;
    if (row.rel != Relation::LessEqual) ++n_art;
  }

  Tableau t;
  t.n_struct = n;
  t.n_slack = n_slack;
  t.n_art = n_art;
  t.m = rows.size();
  t.a.assign(t.m, std::vector<double>(t.cols(), 0.0));
  t.rhs.assign(t.m, 0.0);
  t.basis.assign(t.m, 0);

  std::size_t slack_at = n;
  std::size_t art_at = n + n_slack;
  for (std::size_t r = 0; r < t.m; ++r) {
    for (std::size_t j = 0; j < n; ++j) t.a[r][j] = rows[r].coeffs[j];
    t.rhs[r] = rows[r].rhs;
    switch (rows[r].rel) {
      case Relation::LessEqual:
        t.a[r][slack_at] = 1.0;
        t.basis[r] = slack_at++;
        break;
      case Relation::GreaterEqual:
        t.a[r][slack_at] = -1.0;
        ++slack_at;
        t.a[r][art_at] = 1.0;
        t.basis[r] = art_at++;
        break;
      case Relation::Equal:
        t.a[r][art_at] = 1.0;
        t.basis[r] = art_at++;
        break;
    }
  }

  // Phase 1: minimize the sum of artificials.
  if (t.n_art > 0) {
    std::vector<double> cost(t.cols(), 0.0);
    double cost_rhs = 0.0;
    for (std::size_t c = n + n_slack; c < t.cols(); ++c) cost[c] = 1.0;
    for (std::size_t r = 0; r < t.m; ++r) {
      if (!t.is_artificial(t.basis[r])) continue;
      for (std::size_t c = 0; c < t.cols(); ++c) cost[c] -= t.a[r][c];
      cost_rhs -= t.rhs[r];
    }
    run_simplex(t, cost, cost_rhs, true);
    if (options.dump_tableau) dump_tsv(t, cost, cost_rhs, options.dump_path, "1");
    if (-cost_rhs > kPhase1Tol) {
      return {LpStatus::Infeasible, {}, 0.0};
    }
    // Kick remaining artificials out of the basis where a structural or
    // slack pivot exists; rows with none are redundant and harmless since
    // the artificial sits at zero.
    for (std::size_t r = 0; r < t.m; ++r) {
      if (!t.is_artificial(t.basis[r])) continue;
      for (std::size_t c = 0; c < n + n_slack; ++c) {
        if (std::abs(t.a[r][c]) > kPivotTol) {
          pivot(t, cost, cost_rhs, r, c);
          break;
        }
      }
    }
  }

  // Phase 2: the real objective on the shifted variables.
  std::vector<double> cost(t.cols(), 0.0);
  double cost_rhs = 0.0;
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  for (std::size_t r = 0; r < t.m; ++r) {
    const std::size_t b = t.basis[r];
    const double f = cost[b];
    if (f == 0.0) continue;
    for (std::size_t c = 0; c < t.cols(); ++c) cost[c] -= f * t.a[r][c];
    cost_rhs -= f * t.rhs[r];
    cost[b] = 0.0;
  }
  const IterResult res = run_simplex(t, cost, cost_rhs, false);
  if (options.dump_tableau) dump_tsv(t, cost, cost_rhs, options.dump_path, "2");
  if (res == IterResult::Unbounded) {
    return {LpStatus::Unbounded, {}, 0.0};
  }

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.values.assign(n, 0.0);
  for (std::size_t r = 0; r < t.m; ++r) {
    if (t.basis[r] < n) sol.values[t.basis[r]] = t.rhs[r];
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.values[j] += bounds[j].lo;
    obj += problem.objective[j] * sol.values[j];
  }
  sol.objective_value = obj;
  return sol;
}

double max_violation(const LpProblem& problem, const std::vector<double>& values) {
  double worst = 0.0;
  for (const Row& row : problem.rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) lhs += row.coeffs[j] * values[j];
    switch (row.rel) {
      case Relation::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  const std::size_t n = problem.objective.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Bounds b = problem.bounds.empty() ? Bounds{} : problem.bounds[j];
    worst = std::max(worst, b.lo - values[j]);
    if (std::isfinite(b.hi)) worst = std::max(worst, values[j] - b.hi);
  }
  return worst;
}

}  // namespace greente::lp
