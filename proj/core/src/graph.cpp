#include "reinforce/graph.hpp"

#include <algorithm>

namespace reinforce {

GraphSpec GraphSpec::finite(std::vector<std::vector<Vertex>> adjacency) {
  GraphSpec g(GraphKind::Finite);
  const auto n = static_cast<Vertex>(adjacency.size());
  for (Vertex v = 0; v < n; ++v) {
    auto& nbrs = adjacency[static_cast<std::size_t>(v)];
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
      throw std::invalid_argument("duplicate neighbor in adjacency list");
    for (Vertex w : nbrs) {
      if (w < 0 || w >= n)
        throw std::invalid_argument("neighbor id out of range");
    }
  }
  // Non-loop edges must be symmetric.
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w : adjacency[static_cast<std::size_t>(v)]) {
      if (w == v) continue;
      const auto& back = adjacency[static_cast<std::size_t>(w)];
      if (!std::binary_search(back.begin(), back.end(), v))
        throw std::invalid_argument("finite adjacency is not symmetric");
    }
  }
  g.adjacency_ = std::move(adjacency);
  return g;
}

void GraphSpec::validate_start(Vertex start) const {
  if (!contains(start))
    throw std::invalid_argument("start vertex outside the graph");
  double total = 0.0;
  for (Vertex w : neighbors(start)) total += edge_weight(start, w);
  if (total <= 0.0) throw std::invalid_argument("stuck vertex");
}

}  // namespace reinforce
