#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mrfl {

using Node = int;
using NodeSet = std::vector<Node>;
using Edge = std::pair<Node, Node>;

/// Undirected simple graph on nodes 0..p-1.
///
/// Edges are stored normalized (first < second) and sorted lexicographically;
/// adjacency lists are sorted ascending. Immutable after construction.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int p) : p_(p), adj_(static_cast<std::size_t>(p)) {}

  /// Throws std::invalid_argument on self-loops or out-of-range endpoints.
  /// Duplicate edges (in either orientation) are rejected too.
  Graph(int p, std::vector<Edge> edges);

  int num_nodes() const { return p_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const NodeSet& neighbors(Node i) const { return adj_.at(static_cast<std::size_t>(i)); }
  int degree(Node i) const { return static_cast<int>(neighbors(i).size()); }
  bool has_edge(Node i, Node j) const;

  /// Position of edge (i,j) in edges(), or -1.
  int edge_index(Node i, Node j) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.p_ == b.p_ && a.edges_ == b.edges_;
  }

 private:
  int p_ = 0;
  std::vector<Edge> edges_;
  std::vector<NodeSet> adj_;
};

struct Grid4 {
  int rows = 0;
  int cols = 0;
};
struct Grid8 {
  int rows = 0;
  int cols = 0;
};
/// Each of the C(p,2) pairs is an edge independently with probability c/p.
struct ErdosRenyi {
  int p = 0;
  double c = 0.0;
};
struct Explicit {
  int p = 0;
  std::vector<Edge> edges;
};
using GraphKind = std::variant<Grid4, Grid8, ErdosRenyi, Explicit>;

Graph generate(const GraphKind& kind, std::uint64_t seed = 0);

int max_degree(const Graph& g);

inline constexpr int kInfiniteGirth = std::numeric_limits<int>::max();

/// Length of the shortest cycle, kInfiniteGirth for forests.
int girth(const Graph& g);

/// Nodes within hop distance <= radius of i (sorted, includes i).
NodeSet ball(const Graph& g, Node i, int radius);

/// Hop distances from i; -1 marks unreachable nodes.
std::vector<int> hop_distances(const Graph& g, Node i);

inline constexpr std::size_t kDefaultPathLimit = 1'000'000;

/// All simple paths i -> j with at most maxlen edges, in DFS order with
/// neighbors visited ascending. Throws std::length_error past `limit` paths.
std::vector<NodeSet> short_paths(const Graph& g, Node i, Node j, int maxlen,
                                 std::size_t limit = kDefaultPathLimit);

bool is_forest(const Graph& g);

/// Complement on the same node set.
Graph complement(const Graph& g);

}  // namespace mrfl
