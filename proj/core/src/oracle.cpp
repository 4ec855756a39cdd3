#include "reinforce/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace reinforce {

namespace {

// Self-contained count bookkeeping for the enumeration; deliberately
// independent of the simulator's occupation machinery.
struct Counts {
  std::map<Vertex, std::int64_t> z;

  std::int64_t get(Vertex v) const {
    auto it = z.find(v);
    return it == z.end() ? 1 : it->second;
  }
  void bump(Vertex v) { z[v] = get(v) + 1; }
  void unbump(Vertex v) {
    auto it = z.find(v);
    if (--(it->second) == 1) z.erase(it);
  }

  std::vector<std::pair<Vertex, std::int64_t>> visited() const {
    return {z.begin(), z.end()};
  }
};

struct Expansion {
  const GraphSpec* graph;
  std::int64_t horizon;
  OracleTable* out;
  std::vector<Vertex> path;
  Counts counts;

  void dfs(Vertex pos, double prob, std::int64_t depth) {
    if (depth == horizon) {
      (*out).paths[path] += prob;
      (*out).occupations[counts.visited()] += prob;
      return;
    }
    const auto nbrs = graph->neighbors(pos);
    double total = 0.0;
    for (Vertex w : nbrs)
      total += graph->edge_weight(pos, w) * static_cast<double>(counts.get(w));
    if (total <= 0.0) throw std::runtime_error("stuck vertex");
    for (Vertex w : nbrs) {
      const double weight =
          graph->edge_weight(pos, w) * static_cast<double>(counts.get(w));
      if (weight <= 0.0) continue;
      path.push_back(w);
      counts.bump(w);
      dfs(w, prob * (weight / total), depth + 1);
      counts.unbump(w);
      path.pop_back();
    }
  }
};

}  // namespace

double OracleTable::total_mass() const {
  double m = 0.0;
  for (const auto& [k, p] : paths) m += p;
  return m;
}

OracleTable enumerate_exact(const GraphSpec& graph, Vertex start,
                            std::int64_t horizon) {
  if (horizon < 1 || horizon > kOracleMaxHorizon)
    throw std::invalid_argument("oracle horizon must lie in [1, " +
                                std::to_string(kOracleMaxHorizon) + "]");
  graph.validate_start(start);
  OracleTable table;
  table.horizon = horizon;
  Expansion e{&graph, horizon, &table, {start}, {}};
  e.counts.bump(start);  // visit at time 0
  e.dfs(start, 1.0, 0);
  return table;
}

namespace {

struct CoupledExpansion {
  GraphSpec interval_graph;
  Vertex a, b;
  std::int64_t horizon;
  CoupledOracleTable* out;
  std::vector<Vertex> full_path, int_path;
  Counts full_counts, int_counts;

  void record(double prob) {
    out->joint[{full_path, int_path}] += prob;
  }

  // Pre-tau: one branch per full-walk move; the interval path mirrors or
  // reflects. Post-tau: product branching over both walks.
  void dfs_pre(Vertex pos, double prob, std::int64_t depth) {
    if (depth == horizon) {
      record(prob);
      return;
    }
    for (Vertex w : {pos - 1, pos + 1}) {
      const double wz = static_cast<double>(full_counts.get(w));
      const double tot = static_cast<double>(full_counts.get(pos - 1) +
                                             full_counts.get(pos + 1));
      const double p = wz / tot;
      const bool escapes = (w == a - 1) || (w == b + 1);
      const Vertex wi = !escapes ? w : (w < a ? a + 1 : b - 1);
      full_path.push_back(w);
      int_path.push_back(wi);
      full_counts.bump(w);
      int_counts.bump(wi);
      if (escapes)
        dfs_post(w, wi, prob * p, depth + 1);
      else
        dfs_pre(w, prob * p, depth + 1);
      int_counts.unbump(wi);
      full_counts.unbump(w);
      int_path.pop_back();
      full_path.pop_back();
    }
  }

  void dfs_post(Vertex full_pos, Vertex int_pos, double prob,
                std::int64_t depth) {
    if (depth == horizon) {
      record(prob);
      return;
    }
    const double full_tot = static_cast<double>(full_counts.get(full_pos - 1) +
                                                full_counts.get(full_pos + 1));
    for (Vertex w : {full_pos - 1, full_pos + 1}) {
      const double pf = static_cast<double>(full_counts.get(w)) / full_tot;
      full_path.push_back(w);
      full_counts.bump(w);
      for (Vertex wi : interval_graph.neighbors(int_pos)) {
        double int_tot = 0.0;
        for (Vertex x : interval_graph.neighbors(int_pos))
          int_tot += static_cast<double>(int_counts.get(x));
        const double pi = static_cast<double>(int_counts.get(wi)) / int_tot;
        int_path.push_back(wi);
        int_counts.bump(wi);
        dfs_post(w, wi, prob * pf * pi, depth + 1);
        int_counts.unbump(wi);
        int_path.pop_back();
      }
      full_counts.unbump(w);
      full_path.pop_back();
    }
  }
};

}  // namespace

double CoupledOracleTable::total_mass() const {
  double m = 0.0;
  for (const auto& [k, p] : joint) m += p;
  return m;
}

OracleTable CoupledOracleTable::full_marginal() const {
  OracleTable table;
  table.horizon = horizon;
  for (const auto& [pair, p] : joint) table.paths[pair.first] += p;
  for (const auto& [path, p] : table.paths) {
    Counts c;
    for (Vertex v : path) c.bump(v);
    table.occupations[c.visited()] += p;
  }
  return table;
}

OracleTable CoupledOracleTable::interval_marginal() const {
  OracleTable table;
  table.horizon = horizon;
  for (const auto& [pair, p] : joint) table.paths[pair.second] += p;
  for (const auto& [path, p] : table.paths) {
    Counts c;
    for (Vertex v : path) c.bump(v);
    table.occupations[c.visited()] += p;
  }
  return table;
}

CoupledOracleTable enumerate_exact_coupled(Vertex a, Vertex b, Vertex start,
                                           std::int64_t horizon) {
  if (horizon < 1 || horizon > kCoupledOracleMaxHorizon)
    throw std::invalid_argument("coupled oracle horizon must lie in [1, " +
                                std::to_string(kCoupledOracleMaxHorizon) + "]");
  if (a >= b) throw std::invalid_argument("interval requires a < b");
  if (start < a || start > b)
    throw std::invalid_argument("start must lie inside the interval");
  CoupledOracleTable table;
  table.horizon = horizon;
  CoupledExpansion e{GraphSpec::interval(a, b),
                     a,
                     b,
                     horizon,
                     &table,
                     {start},
                     {start},
                     {},
                     {}};
  e.full_counts.bump(start);
  e.int_counts.bump(start);
  e.dfs_pre(start, 1.0, 0);
  return table;
}

double occupation_tv(
    const std::map<std::vector<std::pair<Vertex, std::int64_t>>, double>& exact,
    const std::map<std::vector<std::pair<Vertex, std::int64_t>>, std::int64_t>&
        empirical_counts,
    std::int64_t samples) {
  double tv = 0.0;
  const double n = static_cast<double>(samples);
  for (const auto& [key, p] : exact) {
    auto it = empirical_counts.find(key);
    const double q = it == empirical_counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / n;
    tv += std::abs(p - q);
  }
  for (const auto& [key, cnt] : empirical_counts) {
    if (exact.find(key) == exact.end())
      tv += static_cast<double>(cnt) / n;
  }
  return 0.5 * tv;
}

}  // namespace reinforce
