#pragma once

// Self-avoiding-walk trees with fixed terminals, for checking that a root
// conditional on the graph equals the same conditional on the tree.

#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"

#include <cstdint>
#include <vector>

namespace mrfl {

struct SawNode {
  Node node = 0;       ///< graph node this copy stands for
  int parent = -1;     ///< tree index, -1 at the root
  std::vector<int> children;
  int depth = 0;
  bool terminal = false;
  int fixed_spin = 0;  ///< +-1 on terminals
  double coupling = 0.0;  ///< J on the edge to the parent
  double field = 0.0;     ///< h of the graph node (0 on terminals)
};

/// Terminal comparison. Standard compares at the terminal node u: closing
/// edge (u, v_k) against starting edge (u, v_{m+1}). Flipped negates every
/// terminal. AtWalkEnd compares at v_k instead: (v_k, u) against
/// (v_k, v_{k-1}).
enum class TerminalRule { Standard, Flipped, AtWalkEnd };

struct SawOptions {
  /// Ordering used for edge comparisons; empty means identity 0..p-1.
  std::vector<Node> ordering;
  /// Maximum depth; negative expands fully (allowed only for p <= 10).
  int depth_cap = -1;
  std::size_t node_budget = 1'000'000;
  TerminalRule rule = TerminalRule::Standard;
};

class SawTree {
 public:
  SawTree() = default;
  SawTree(std::vector<SawNode> nodes, int depth_cap) : nodes_(std::move(nodes)), depth_cap_(depth_cap) {}

  const SawNode& operator[](int k) const { return nodes_.at(static_cast<std::size_t>(k)); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<SawNode>& nodes() const { return nodes_; }
  Node root_node() const { return nodes_.front().node; }
  int depth_cap() const { return depth_cap_; }

  /// Tree indices of terminal nodes (A).
  std::vector<int> terminals() const;
  /// Tree indices of non-terminal copies of nodes in S (U(S)).
  std::vector<int> copies(const NodeSet& s) const;

 private:
  std::vector<SawNode> nodes_;
  int depth_cap_ = -1;
};

/// Walks start at `root`; neighbors are expanded in ascending order. A
/// neighbor u already on the walk v_0..v_k (other than v_{k-1}) becomes a
/// terminal leaf, fixed to +1 iff the closing edge (u, v_k) is larger than
/// the starting edge (u, v_{m+1}) in the ordering. Throws std::length_error
/// past the node budget.
SawTree build_saw_tree(const IsingModel& m, Node root, const SawOptions& opts = {});

/// Induced field on node 1 after summing out a leaf node 2:
/// (1/2) log[(e^{J+h2} + e^{-J-h2}) / (e^{-J+h2} + e^{J-h2})].
double reduce_leaf(double j12, double h2);

/// P(root = root_spin | fixed) by upward elimination. `fixed` holds one
/// entry per tree node: 0 for free, +-1 for clamped. Terminals always use
/// their fixed spin.
double tree_cond_prob(const SawTree& t, int root_spin, const std::vector<int>& fixed);

/// Clamp vector for conditioning every non-terminal copy of S on spins `x`.
std::vector<int> clamp_copies(const SawTree& t, const NodeSet& s, const std::vector<int>& spins);

/// max over x_root and assignments of x_S (all of them when 2^|S| <= trials,
/// else `trials` random draws) of |P(x_i | x_S; G) - P(x_i | x_U(S), x_A; T)|.
/// Requires p <= 10.
double verify_saw_identity(const IsingModel& m, Node root, const NodeSet& s, const SawOptions& opts = {},
                           int trials = 64, std::uint64_t seed = 0);

}  // namespace mrfl
