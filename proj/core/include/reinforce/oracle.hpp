#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "reinforce/graph.hpp"

namespace reinforce {

// Exact distribution of the reinforced walk over all paths of a small
// horizon, by depth-first expansion with exact per-step probabilities
// (double arithmetic over integer counts). Keys are full position paths
// (including X_0) and terminal occupation vectors of visited sites.
struct OracleTable {
  std::int64_t horizon = 0;
  std::map<std::vector<Vertex>, double> paths;
  std::map<std::vector<std::pair<Vertex, std::int64_t>>, double> occupations;

  double total_mass() const;
};

inline constexpr std::int64_t kOracleMaxHorizon = 12;
inline constexpr std::int64_t kCoupledOracleMaxHorizon = 8;

OracleTable enumerate_exact(const GraphSpec& graph, Vertex start,
                            std::int64_t horizon);

// Joint law of the coupled pair (full-line path, interval path) on
// J = [a, b]. Pre-tau nodes branch once (the interval path is a function of
// the full one); post-tau nodes branch over both moves independently.
struct CoupledOracleTable {
  std::int64_t horizon = 0;
  std::map<std::pair<std::vector<Vertex>, std::vector<Vertex>>, double> joint;

  double total_mass() const;
  OracleTable full_marginal() const;
  OracleTable interval_marginal() const;
};

CoupledOracleTable enumerate_exact_coupled(Vertex a, Vertex b, Vertex start,
                                           std::int64_t horizon);

// Total-variation distance between an empirical occupation distribution and
// the oracle's exact one.
double occupation_tv(
    const std::map<std::vector<std::pair<Vertex, std::int64_t>>, double>& exact,
    const std::map<std::vector<std::pair<Vertex, std::int64_t>>, std::int64_t>&
        empirical_counts,
    std::int64_t samples);

}  // namespace reinforce
