#include "mrfl/sawtree.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mrfl {

std::vector<int> SawTree::terminals() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (nodes_[k].terminal) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<int> SawTree::copies(const NodeSet& s) const {
  std::vector<int> out;
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (!nodes_[k].terminal && std::find(s.begin(), s.end(), nodes_[k].node) != s.end())
      out.push_back(static_cast<int>(k));
  return out;
}

namespace {

struct Builder {
  const IsingModel& m;
  const SawOptions& opts;
  std::vector<int> rank;      // position of each node in the ordering
  std::vector<int> walk_pos;  // index on the current walk, -1 if absent
  NodeSet walk;
  std::vector<SawNode> nodes;
  int cap;

  int add(SawNode n) {
    if (nodes.size() >= opts.node_budget) throw std::length_error("build_saw_tree: node budget exceeded");
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  void expand(int tree_idx) {
    const Node v = walk.back();
    const int depth = static_cast<int>(walk.size()) - 1;
    if (depth >= cap) return;
    const Node pred = walk.size() >= 2 ? walk[walk.size() - 2] : -1;
    for (Node u : m.graph().neighbors(v)) {
      if (u == pred) continue;
      SawNode child;
      child.node = u;
      child.parent = tree_idx;
      child.depth = depth + 1;
      child.coupling = m.coupling(v, u);
      const int pos = walk_pos[static_cast<std::size_t>(u)];
      if (pos >= 0) {
        // Cycle closed at u: compare (u, v) with (u, walk[pos + 1]) at u.
        const Node start = walk[static_cast<std::size_t>(pos) + 1];
        bool larger = rank[static_cast<std::size_t>(v)] > rank[static_cast<std::size_t>(start)];
        if (opts.rule == TerminalRule::Flipped) larger = !larger;
        if (opts.rule == TerminalRule::AtWalkEnd)
          larger = rank[static_cast<std::size_t>(u)] > rank[static_cast<std::size_t>(pred)];
        child.terminal = true;
        child.fixed_spin = larger ? 1 : -1;
        const int c = add(std::move(child));
        nodes[static_cast<std::size_t>(tree_idx)].children.push_back(c);
        continue;
      }
      child.field = m.fields()(u);
      const int c = add(std::move(child));
      nodes[static_cast<std::size_t>(tree_idx)].children.push_back(c);
      walk.push_back(u);
      walk_pos[static_cast<std::size_t>(u)] = static_cast<int>(walk.size()) - 1;
      expand(c);
      walk_pos[static_cast<std::size_t>(u)] = -1;
      walk.pop_back();
    }
  }
};

}  // namespace

SawTree build_saw_tree(const IsingModel& m, Node root, const SawOptions& opts) {
  const int p = m.num_nodes();
  if (root < 0 || root >= p) throw std::invalid_argument("build_saw_tree: root out of range");
  if (opts.depth_cap < 0 && p > 10) throw std::invalid_argument("build_saw_tree: depth cap required for p > 10");
  std::vector<Node> order = opts.ordering;
  if (order.empty())
    for (Node v = 0; v < p; ++v) order.push_back(v);
  if (static_cast<int>(order.size()) != p) throw std::invalid_argument("build_saw_tree: ordering size mismatch");
  Builder b{m, opts, std::vector<int>(static_cast<std::size_t>(p), -1), std::vector<int>(static_cast<std::size_t>(p), -1),
            {}, {}, opts.depth_cap < 0 ? p : opts.depth_cap};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Node v = order[k];
    if (v < 0 || v >= p || b.rank[static_cast<std::size_t>(v)] >= 0)
      throw std::invalid_argument("build_saw_tree: ordering is not a permutation");
    b.rank[static_cast<std::size_t>(v)] = static_cast<int>(k);
  }
  SawNode r;
  r.node = root;
  r.field = m.fields()(root);
  b.add(std::move(r));
  b.walk.push_back(root);
  b.walk_pos[static_cast<std::size_t>(root)] = 0;
  b.expand(0);
  return SawTree(std::move(b.nodes), opts.depth_cap);
}

namespace {

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

double reduce_leaf(double j12, double h2) { return 0.5 * (log_cosh(j12 + h2) - log_cosh(h2 - j12)); }

double tree_cond_prob(const SawTree& t, int root_spin, const std::vector<int>& fixed) {
  if (root_spin != 1 && root_spin != -1) throw std::invalid_argument("tree_cond_prob: spin must be +-1");
  if (fixed.size() != t.size()) throw std::invalid_argument("tree_cond_prob: one clamp entry per tree node");
  // Children always follow their parent in index order, so a reverse sweep
  // finishes every subtree before its parent.
  std::vector<double> h(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) h[k] = t[static_cast<int>(k)].field;
  for (std::size_t k = t.size(); k-- > 1;) {
    const SawNode& n = t[static_cast<int>(k)];
    const int clamp = n.terminal ? n.fixed_spin : fixed[k];
    const double msg = clamp != 0 ? n.coupling * clamp : reduce_leaf(n.coupling, h[k]);
    h[static_cast<std::size_t>(n.parent)] += msg;
  }
  const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * h[0]));
  return root_spin == 1 ? p_plus : 1.0 - p_plus;
}

std::vector<int> clamp_copies(const SawTree& t, const NodeSet& s, const std::vector<int>& spins) {
  if (s.size() != spins.size()) throw std::invalid_argument("clamp_copies: size mismatch");
  std::vector<int> out(t.size(), 0);
  for (int k : t.copies(s)) {
    const auto it = std::find(s.begin(), s.end(), t[k].node);
    out[static_cast<std::size_t>(k)] = spins[static_cast<std::size_t>(it - s.begin())];
  }
  return out;
}

double verify_saw_identity(const IsingModel& m, Node root, const NodeSet& s, const SawOptions& opts, int trials,
                           std::uint64_t seed) {
  if (m.num_nodes() > 10) throw std::invalid_argument("verify_saw_identity: p must be <= 10");
  if (std::find(s.begin(), s.end(), root) != s.end()) throw std::invalid_argument("verify_saw_identity: root in S");
  const JointTable joint = exact_joint(m);
  const SawTree tree = build_saw_tree(m, root, opts);
  const std::size_t k = s.size();
  const std::size_t total = std::size_t{1} << k;
  std::mt19937_64 rng(seed);
  const bool exhaustive = total <= static_cast<std::size_t>(std::max(trials, 0));
  const std::size_t rounds = exhaustive ? total : static_cast<std::size_t>(trials);

  double worst = 0.0;
  std::vector<int> idx(k), spins(k);
  for (std::size_t r = 0; r < rounds; ++r) {
    const std::uint64_t bits = exhaustive ? r : rng();
    for (std::size_t q = 0; q < k; ++q) {
      idx[q] = static_cast<int>((bits >> q) & 1u);
      spins[q] = index_to_spin(idx[q]);
    }
    const Assignment given(s, idx);
    if (joint.mass(given) <= 0.0) continue;
    const auto clamp = clamp_copies(tree, s, spins);
    for (int x : {0, 1}) {
      const double graph_side = cond_prob(joint, root, x, given);
      const double tree_side = tree_cond_prob(tree, index_to_spin(x), clamp);
      worst = std::max(worst, std::abs(graph_side - tree_side));
    }
  }
  return worst;
}

}  // namespace mrfl
