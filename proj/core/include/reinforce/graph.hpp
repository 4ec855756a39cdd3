#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace reinforce {

using Vertex = std::int64_t;

enum class GraphKind { IntegerLine, Interval, Finite };

// State space of the walk: the integer line, an integer interval [a,b], or
// a finite graph given by adjacency lists (loops permitted). Each oriented
// edge may carry a nonnegative weight; unlisted edges weigh 1.
class GraphSpec {
 public:
  static GraphSpec integer_line() { return GraphSpec(GraphKind::IntegerLine); }

  static GraphSpec interval(Vertex a, Vertex b) {
    if (a >= b) throw std::invalid_argument("interval requires a < b");
    GraphSpec g(GraphKind::Interval);
    g.a_ = a;
    g.b_ = b;
    return g;
  }

  // Adjacency lists indexed by vertex id 0..V-1. A vertex may list itself
  // (a loop); it then appears exactly once among its own neighbors. Non-loop
  // edges must be symmetric.
  static GraphSpec finite(std::vector<std::vector<Vertex>> adjacency);

  GraphKind kind() const { return kind_; }
  Vertex lo() const { return a_; }
  Vertex hi() const { return b_; }
  std::size_t num_vertices() const { return adjacency_.size(); }

  bool has_weights() const { return !weights_.empty(); }
  void set_edge_weight(Vertex from, Vertex to, double w) {
    if (w < 0) throw std::invalid_argument("edge weight must be >= 0");
    weights_[{from, to}] = w;
  }
  double edge_weight(Vertex from, Vertex to) const {
    if (weights_.empty()) return 1.0;
    auto it = weights_.find({from, to});
    return it == weights_.end() ? 1.0 : it->second;
  }

  bool contains(Vertex v) const {
    switch (kind_) {
      case GraphKind::IntegerLine:
        return true;
      case GraphKind::Interval:
        return v >= a_ && v <= b_;
      case GraphKind::Finite:
        return v >= 0 && static_cast<std::size_t>(v) < adjacency_.size();
    }
    return false;
  }

  // Neighbors of v in increasing vertex order.
  std::vector<Vertex> neighbors(Vertex v) const {
    switch (kind_) {
      case GraphKind::IntegerLine:
        return {v - 1, v + 1};
      case GraphKind::Interval:
        if (v == a_) return {v + 1};
        if (v == b_) return {v - 1};
        return {v - 1, v + 1};
      case GraphKind::Finite:
        return adjacency_.at(static_cast<std::size_t>(v));
    }
    return {};
  }

  bool adjacent(Vertex u, Vertex v) const {
    for (Vertex w : neighbors(u))
      if (w == v) return true;
    return false;
  }

  // Throws unless `start` is a valid starting vertex with at least one
  // positive-weight neighbor.
  void validate_start(Vertex start) const;

 private:
  explicit GraphSpec(GraphKind k) : kind_(k) {}

  GraphKind kind_;
  Vertex a_ = 0;
  Vertex b_ = 0;
  std::vector<std::vector<Vertex>> adjacency_;
  std::map<std::pair<Vertex, Vertex>, double> weights_;
};

}  // namespace reinforce
