#pragma once

#include "mrfl/estimate.hpp"
#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"

#include <Eigen/Core>

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrfl {

/// Backends answer marginal queries over small variable subsets.
template <typename B>
concept Distribution = requires(const B& b, std::span<const Node> vars) {
  { b.num_nodes() } -> std::convertible_to<int>;
  { b.alphabet_size() } -> std::convertible_to<int>;
  { b.marginal(vars) } -> std::convertible_to<Eigen::VectorXd>;
};

enum class TestKind { MutualInformation, Probability };

std::string to_string(TestKind kind);
TestKind parse_test_kind(const std::string& s);

/// Conditional-independence statistic for (i, j) given X_C: conditional MI
/// in bits, or the max conditional-probability difference. Zero-mass
/// conditioning events are skipped.
template <Distribution B>
double delta(const B& backend, TestKind kind, Node i, Node j, std::span<const Node> cond);

struct SearchOptions {
  /// Decision mode: stop the S loop at the first S whose max over T is
  /// <= threshold, and abandon an S as soon as some T exceeds it. The
  /// returned score is then only a certificate: score > threshold iff the
  /// pair is declared an edge.
  std::optional<double> threshold;
  /// Branch and bound on the min: abandon an S once its running max reaches
  /// the best completed S. Leaves the score and witnesses unchanged.
  bool prune = true;
};

struct MaxMinResult {
  double score = 0.0;
  NodeSet separator;  ///< argmin S
  NodeSet breaker;    ///< argmax T for that S
  std::uint64_t evaluations = 0;
};

/// min over S (|S| <= d1) of max over T (|T| <= d2, T disjoint from S) of
/// delta(i, j, S u T), with S, T drawn from `search_space` (i and j are
/// dropped if present). Subsets run by size, then lexicographically in the
/// order of `search_space`; ties keep the earliest subset.
template <Distribution B>
MaxMinResult maxmin_score(const B& backend, TestKind kind, Node i, Node j, int d1, int d2,
                          std::span<const Node> search_space, const SearchOptions& opts = {});

/// Symmetric p x p matrix of min-max scores plus witnesses per pair.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(int p, int d1, int d2, TestKind kind, std::string backend);

  int num_nodes() const { return static_cast<int>(scores_.rows()); }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  TestKind kind() const { return kind_; }
  const std::string& backend() const { return backend_; }

  double operator()(Node i, Node j) const { return scores_(i, j); }
  const Eigen::MatrixXd& matrix() const { return scores_; }
  const MaxMinResult& witness(Node i, Node j) const;

  void set(Node i, Node j, MaxMinResult r);

  /// Upper-triangle scores in pair order (0,1), (0,2), ..., (p-2,p-1).
  std::vector<double> pair_scores() const;

  /// Graph of pairs with score > threshold.
  Graph threshold(double threshold) const;

 private:
  Eigen::MatrixXd scores_;
  std::vector<MaxMinResult> witnesses_;
  int d1_ = 0;
  int d2_ = 0;
  TestKind kind_ = TestKind::MutualInformation;
  std::string backend_;
};

std::size_t pair_index(int p, Node i, Node j);

struct ScoreOptions {
  SearchOptions search;
  /// Worker threads for the pair loop; 0 picks hardware concurrency.
  int workers = 0;
};

/// Score every unordered pair. With per-node `search_spaces`, direction
/// i -> j searches L_i and direction j -> i searches L_j. Both directions
/// are also evaluated for the (asymmetric) probability test; the matrix keeps
/// the larger directional score. Without spaces, V \ {i,j} is used.
template <Distribution B>
ScoreMatrix score_matrix(const B& backend, TestKind kind, int d1, int d2,
                         const std::vector<NodeSet>* search_spaces = nullptr,
                         const ScoreOptions& opts = {});

std::string backend_name(const JointTable&);
std::string backend_name(const EmpiricalDist&);

}  // namespace mrfl
