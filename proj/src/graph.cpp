#include "mrfl/graph.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <stdexcept>

namespace mrfl {

Graph::Graph(int p, std::vector<Edge> edges) : p_(p), adj_(static_cast<std::size_t>(p)) {
  if (p < 0) throw std::invalid_argument("Graph: negative node count");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= p || b >= p)
      throw std::invalid_argument("Graph: edge endpoint out of range");
    if (a == b) throw std::invalid_argument("Graph: self-loop");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("Graph: duplicate edge");
  edges_ = std::move(edges);
  for (const auto& [a, b] : edges_) {
    adj_[static_cast<std::size_t>(a)].push_back(b);
    adj_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(Node i, Node j) const {
  if (i < 0 || i >= p_) return false;
  const auto& nb = adj_[static_cast<std::size_t>(i)];
  return std::binary_search(nb.begin(), nb.end(), j);
}

int Graph::edge_index(Node i, Node j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{i, j});
  if (it == edges_.end() || *it != Edge{i, j}) return -1;
  return static_cast<int>(it - edges_.begin());
}

namespace {

Graph make_grid(int rows, int cols, bool diagonals) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid: rows and cols must be positive");
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
      if (diagonals && r + 1 < rows) {
        if (c + 1 < cols) edges.emplace_back(id(r, c), id(r + 1, c + 1));
        if (c > 0) edges.emplace_back(id(r, c), id(r + 1, c - 1));
      }
    }
  }
  return Graph(rows * cols, std::move(edges));
}

}  // namespace

Graph generate(const GraphKind& kind, std::uint64_t seed) {
  struct Visitor {
    std::uint64_t seed;
    Graph operator()(const Grid4& k) const { return make_grid(k.rows, k.cols, false); }
    Graph operator()(const Grid8& k) const { return make_grid(k.rows, k.cols, true); }
    Graph operator()(const ErdosRenyi& k) const {
      if (k.p <= 0) throw std::invalid_argument("ErdosRenyi: p must be positive");
      if (!(k.c > 0.0) || !(k.c < k.p)) throw std::invalid_argument("ErdosRenyi: requires 0 < c < p");
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double q = k.c / k.p;
      std::vector<Edge> edges;
      for (int i = 0; i < k.p; ++i)
        for (int j = i + 1; j < k.p; ++j)
          if (unif(rng) < q) edges.emplace_back(i, j);
      return Graph(k.p, std::move(edges));
    }
    Graph operator()(const Explicit& k) const { return Graph(k.p, k.edges); }
  };
  return std::visit(Visitor{seed}, kind);
}

int max_degree(const Graph& g) {
  int d = 0;
  for (Node i = 0; i < g.num_nodes(); ++i) d = std::max(d, g.degree(i));
  return d;
}

int girth(const Graph& g) {
  // BFS from every node; a non-tree edge (u,w) closes a cycle of length
  // dist[u] + dist[w] + 1 through the source. The minimum over all sources
  // is exact.
  const int p = g.num_nodes();
  int best = kInfiniteGirth;
  std::vector<int> dist(static_cast<std::size_t>(p));
  std::vector<int> parent(static_cast<std::size_t>(p));
  for (Node s = 0; s < p; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::queue<Node> q;
    dist[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      Node u = q.front();
      q.pop();
      for (Node w : g.neighbors(u)) {
        auto wu = static_cast<std::size_t>(w);
        if (dist[wu] < 0) {
          dist[wu] = dist[static_cast<std::size_t>(u)] + 1;
          parent[wu] = u;
          q.push(w);
        } else if (parent[static_cast<std::size_t>(u)] != w) {
          best = std::min(best, dist[static_cast<std::size_t>(u)] + dist[wu] + 1);
        }
      }
    }
  }
  return best;
}

std::vector<int> hop_distances(const Graph& g, Node i) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_nodes()), -1);
  std::queue<Node> q;
  dist.at(static_cast<std::size_t>(i)) = 0;
  q.push(i);
  while (!q.empty()) {
    Node u = q.front();
    q.pop();
    for (Node w : g.neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

NodeSet ball(const Graph& g, Node i, int radius) {
  if (i < 0 || i >= g.num_nodes()) throw std::out_of_range("ball: node out of range");
  auto dist = hop_distances(g, i);
  NodeSet out;
  for (Node v = 0; v < g.num_nodes(); ++v) {
    int dv = dist[static_cast<std::size_t>(v)];
    if (dv >= 0 && dv <= radius) out.push_back(v);
  }
  return out;
}

std::vector<NodeSet> short_paths(const Graph& g, Node i, Node j, int maxlen, std::size_t limit) {
  if (maxlen < 1) throw std::invalid_argument("short_paths: maxlen must be >= 1");
  if (i == j) throw std::invalid_argument("short_paths: endpoints must differ");
  const int p = g.num_nodes();
  if (i < 0 || j < 0 || i >= p || j >= p) throw std::out_of_range("short_paths: node out of range");

  // Prune branches that cannot reach j within the remaining budget.
  auto to_j = hop_distances(g, j);
  std::vector<NodeSet> out;
  std::vector<char> on_path(static_cast<std::size_t>(p), 0);
  NodeSet path{i};
  on_path[static_cast<std::size_t>(i)] = 1;

  auto dfs = [&](auto&& self) -> void {
    Node u = path.back();
    if (u == j) {
      if (out.size() >= limit) throw std::length_error("short_paths: path limit exceeded");
      out.push_back(path);
      return;
    }
    const int used = static_cast<int>(path.size()) - 1;
    for (Node w : g.neighbors(u)) {
      auto wu = static_cast<std::size_t>(w);
      if (on_path[wu]) continue;
      if (to_j[wu] < 0 || used + 1 + to_j[wu] > maxlen) continue;
      on_path[wu] = 1;
      path.push_back(w);
      self(self);
      path.pop_back();
      on_path[wu] = 0;
    }
  };
  dfs(dfs);
  return out;
}

bool is_forest(const Graph& g) { return girth(g) == kInfiniteGirth; }

Graph complement(const Graph& g) {
  std::vector<Edge> edges;
  for (Node i = 0; i < g.num_nodes(); ++i)
    for (Node j = i + 1; j < g.num_nodes(); ++j)
      if (!g.has_edge(i, j)) edges.emplace_back(i, j);
  return Graph(g.num_nodes(), std::move(edges));
}

}  // namespace mrfl
