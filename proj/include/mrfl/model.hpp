#pragma once

#include "mrfl/graph.hpp"
#include "mrfl/samples.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace mrfl {

/// Partial configuration: values (alphabet indices) on a set of nodes.
struct Assignment {
  NodeSet nodes;
  std::vector<int> values;

  Assignment() = default;
  Assignment(NodeSet n, std::vector<int> v);
  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
};

/// Pairwise binary model on a graph. Couplings are aligned with
/// graph().edges(); spins take values in {-1,+1}.
class IsingModel {
 public:
  IsingModel() = default;
  IsingModel(Graph g, std::vector<double> couplings, Eigen::VectorXd fields);

  const Graph& graph() const { return graph_; }
  int num_nodes() const { return graph_.num_nodes(); }
  const std::vector<double>& couplings() const { return couplings_; }
  const Eigen::VectorXd& fields() const { return fields_; }

  /// J_ij, 0 for non-edges.
  double coupling(Node i, Node j) const;

  /// Dense symmetric coupling matrix.
  Eigen::MatrixXd coupling_matrix() const;

  /// min / max of |J_ij| over edges (0 for an empty graph).
  double min_abs_coupling() const;
  double max_abs_coupling() const;
  bool ferromagnetic() const;

 private:
  Graph graph_;
  std::vector<double> couplings_;
  Eigen::VectorXd fields_;
};

/// Exact probability mass function over all |X|^p configurations.
///
/// Configuration index: node i contributes digit x_i at position i in base
/// |X| (node 0 least significant). For Ising tables (`spins()`), index 0 is
/// spin -1 and index 1 is spin +1.
class JointTable {
 public:
  JointTable() = default;

  /// Validates nonnegativity and normalization (1e-12). With
  /// `require_positive`, every mass must be strictly positive.
  JointTable(int alphabet, int p, Eigen::VectorXd probs, bool spins = false,
             bool require_positive = false);

  int alphabet_size() const { return alphabet_; }
  int num_nodes() const { return p_; }
  bool spins() const { return spins_; }
  std::size_t num_configs() const { return static_cast<std::size_t>(probs_.size()); }
  const Eigen::VectorXd& probs() const { return probs_; }
  double prob(std::size_t config) const { return probs_(static_cast<Eigen::Index>(config)); }

  /// Digit of `node` in configuration `config`.
  int value(std::size_t config, Node node) const;
  std::size_t index_of(std::span<const int> values) const;

  /// Marginal over `vars` laid out with vars[0] fastest. Empty vars -> {1}.
  Eigen::VectorXd marginal(std::span<const Node> vars) const;

  /// P(X_S = x_S).
  double mass(const Assignment& a) const;

 private:
  int alphabet_ = 2;
  int p_ = 0;
  bool spins_ = false;
  Eigen::VectorXd probs_;
  std::vector<std::size_t> stride_;
};

inline constexpr int kMaxExactNodes = 24;

/// Enumerates exp(sum J x_i x_j + sum h x_i) / Z. Throws for p > 24.
JointTable exact_joint(const IsingModel& m);

/// X1, X2 uniform independent bits; X3 = X1 xor X2 with probability 0.9.
/// Nodes are 0-based: X1 -> 0, X2 -> 1, X3 -> 2.
JointTable xor_triangle(double agreement = 0.9);

/// Exact conditional law of V \ S given X_S = x_S. Remaining nodes keep their
/// relative order. Throws std::domain_error on zero-probability conditions.
JointTable condition(const JointTable& t, const Assignment& given);

/// Ising model on V \ S with h_i + sum_{j in S} J_ij x_j and unchanged
/// couplings among the remaining nodes. Assignment values are indices.
IsingModel reduce_by_conditioning(const IsingModel& m, const Assignment& given);

/// P(X_i = x_i | given). Throws std::domain_error on zero-mass conditions.
double cond_prob(const JointTable& t, Node i, int xi, const Assignment& given = {});

/// I(X_i; X_j | X_S) in bits.
double cond_mutual_info(const JointTable& t, Node i, Node j, std::span<const Node> s = {});

/// Probability-test statistic on the exact table.
double probability_test(const JointTable& t, Node i, Node j, std::span<const Node> s = {});

struct GibbsOptions {
  int burnin = 200;
  int thin = 5;
};

/// Systematic-scan single-site Gibbs sampler (scan order 0..p-1), one chain,
/// started from a uniformly random configuration. After `burnin` sweeps one
/// sample is recorded every `thin` sweeps.
SampleSet gibbs_sample(const IsingModel& m, int n, std::uint64_t seed, GibbsOptions opts = {});

/// n i.i.d. draws by inverse CDF over the table.
SampleSet exact_sample(const JointTable& t, int n, std::uint64_t seed);

enum class CouplingMode { General, Ferromagnetic };

/// Zero-field model with |J_ij| ~ U[jmin, jmax] per edge (edge order), and an
/// independent fair sign in General mode.
IsingModel random_coefficients(const Graph& g, double jmin, double jmax, CouplingMode mode,
                               std::uint64_t seed);

}  // namespace mrfl
